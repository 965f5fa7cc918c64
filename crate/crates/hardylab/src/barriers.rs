//! Barrier constructions and p-superharmonicity certificates.
//!
//! Three positive barriers drive the Hardy machinery:
//!   · v = δ on convex domains, where δ is a pointwise minimum of affine
//!     functions and hence p-superharmonic for every p;
//!   · v = δ^α with α = (p−n)/(p−1) > 0 when p > n, on any domain;
//!   · v = 1/R^β − 1/(R+δ)^β with β = (n−p)/(p−1) > 0 when p < n, on
//!     domains with an exterior sphere of radius R.
//!
//! A barrier is certified by checking the discrete weak form
//!   ∫ |∇v|^{p−2} ⟨∇v, ∇φ⟩ dx ≥ −tol
//! against every nonneg hat function φ supported at one admissible node;
//! those hats are the extreme rays of the nonnegative piecewise-linear test
//! class on the lattice, so the sweep is an exhaustive falsifiable check.

use crate::fields::{
    abs_powp, caccioppoli_sides, grad_pow_pm2, grad_values, HardyParams, ScalarField,
};
use crate::geometry::{dilate_linf, DistanceField};
use crate::{Error, Result};

/// Off-collar pairing tolerance: `OFF_COLLAR_TOL_SCALE · h^{n+1} · max|∇v|^{p−1}`.
/// Genuine barriers keep off-collar pairings ≳ 0 (≥ −O(h^{n+2})); bulk-wise
/// p-subharmonic fakes violate at O(h^n) and are rejected.
pub(crate) const OFF_COLLAR_TOL_SCALE: f64 = 0.35;
/// Collar pairing tolerance as a fraction of the largest |pairing| in the
/// basis; ridge kinks bias a genuine barrier's collar pairings no lower
/// than about a quarter of that scale.
pub(crate) const COLLAR_TOL_FRACTION: f64 = 0.45;

/// Which barrier to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BarrierKind {
    Distance,
    DistancePower,
    ExteriorSphere,
}

/// How a barrier was built, with its derived parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum Construction {
    Distance,
    DistancePower { alpha: f64 },
    ExteriorSphere { radius: f64, beta: f64 },
}

/// A positive field with certified-construction metadata.
#[derive(Debug, Clone)]
pub struct BarrierField {
    pub field: ScalarField,
    pub construction: Construction,
    pub params: HardyParams,
    /// Ridge mask of the generating distance field; the barrier's kinks
    /// (and the certificate's collar zone) live here.
    pub ridge: Vec<bool>,
}

/// Build one of the three barrier constructions from a distance field.
/// An explicit `radius` overrides the domain's exterior-sphere radius.
pub fn make_barrier(
    delta: &DistanceField,
    params: &HardyParams,
    kind: BarrierKind,
    radius: Option<f64>,
) -> Result<BarrierField> {
    let n = params.n;
    if n != delta.domain.dimension {
        return Err(Error::ParamRange(format!(
            "params.n = {n} but the domain is {}-dimensional",
            delta.domain.dimension
        )));
    }
    let p = params.p;
    let grid = delta.grid.clone();
    let (construction, values): (Construction, Vec<f64>) = match kind {
        BarrierKind::Distance => {
            if !delta.domain.is_convex() {
                return Err(Error::NonConvexDomain);
            }
            (Construction::Distance, delta.values.clone())
        }
        BarrierKind::DistancePower => {
            if p <= n as f64 {
                return Err(Error::ParamRange(format!(
                    "distance-power barrier needs p > n, got p = {p}, n = {n}"
                )));
            }
            let alpha = (p - n as f64) / (p - 1.0);
            let values = delta
                .values
                .iter()
                .map(|&d| if d > 0.0 { d.powf(alpha) } else { 0.0 })
                .collect();
            (Construction::DistancePower { alpha }, values)
        }
        BarrierKind::ExteriorSphere => {
            if p >= n as f64 {
                return Err(Error::ParamRange(format!(
                    "exterior-sphere barrier needs p < n, got p = {p}, n = {n}"
                )));
            }
            let r = radius
                .or(delta.domain.exterior_sphere_radius)
                .ok_or(Error::MissingRadius)?;
            if !(r > 0.0) {
                return Err(Error::ParamRange(format!("exterior-sphere radius must be positive, got {r}")));
            }
            let beta = (n as f64 - p) / (p - 1.0);
            let lead = r.powf(-beta);
            let values = delta
                .values
                .iter()
                .map(|&d| if d > 0.0 { lead - (r + d).powf(-beta) } else { 0.0 })
                .collect();
            (Construction::ExteriorSphere { radius: r, beta }, values)
        }
    };
    debug_assert!(grid
        .interior
        .iter()
        .zip(&values)
        .all(|(&int, &v)| !int || v > 0.0));
    Ok(BarrierField {
        field: ScalarField { grid, values, compact_support: false },
        construction,
        params: *params,
        ridge: delta.ridge.clone(),
    })
}

/// Discrete weak-form pairing ∫ |∇v|^{p−2} ⟨∇v, ∇φ⟩ dx for a nonnegative
/// compactly supported test function φ.
pub fn weak_form_pairing(
    v: &BarrierField,
    phi: &ScalarField,
    params: &HardyParams,
) -> Result<f64> {
    phi.check_same_grid(&v.field.grid)?;
    if phi.values.iter().any(|&x| x < 0.0) {
        return Err(Error::NegativeTestFunction);
    }
    debug_assert!(phi.compact_support, "weak_form_pairing requires compact support");
    let grid = &v.field.grid;
    let p = params.p;
    let gv = grad_values(grid, &v.field.values);
    let gphi = grad_values(grid, &phi.values);
    let mut s = 0.0f64;
    for idx in 0..grid.len() {
        if !grid.interior[idx] {
            continue;
        }
        let g2: f64 = gv.iter().map(|gk| gk[idx] * gk[idx]).sum();
        let c = grad_pow_pm2(g2, p);
        if c == 0.0 {
            continue;
        }
        let dot: f64 = gv.iter().zip(&gphi).map(|(gk, pk)| gk[idx] * pk[idx]).sum();
        s += c * dot;
    }
    Ok(s * grid.h.powi(grid.n as i32))
}

/// All hat pairings at once: entry i is the pairing against the hat at node
/// i (admissible nodes only; other entries stay 0). For the hat at i the
/// pairing telescopes to h^{n−1} Σ_k [F_k(i−e_k) − F_k(i)] with flux
/// F_k = |∇v|^{p−2} D_k v, which is what one weak_form_pairing call per hat
/// would produce, evaluated in O(N) total.
pub(crate) fn hat_pairings(v: &BarrierField, params: &HardyParams) -> Vec<f64> {
    let grid = &v.field.grid;
    let n = grid.n;
    let h = grid.h;
    let len = grid.len();
    let p = params.p;
    let dv = grad_values(grid, &v.field.values);
    let mut flux = vec![vec![0.0f64; len]; n];
    for idx in 0..len {
        let g2: f64 = dv.iter().map(|gk| gk[idx] * gk[idx]).sum();
        let c = grad_pow_pm2(g2, p);
        if c == 0.0 {
            continue;
        }
        for (fk, gk) in flux.iter_mut().zip(&dv) {
            fk[idx] = c * gk[idx];
        }
    }
    let scale = h.powi(n as i32 - 1);
    let mut out = vec![0.0f64; len];
    for idx in 0..len {
        if !grid.admissible[idx] {
            continue;
        }
        let mut acc = 0.0f64;
        for k in 0..n {
            let s = grid.strides[k];
            acc += flux[k][idx - s] - flux[k][idx];
        }
        out[idx] = scale * acc;
    }
    out
}

/// Outcome of the exhaustive hat-basis sweep, with the two-zone tolerance
/// split: pairings off the ridge collar obey a strict O(h^{n+1}) tolerance,
/// pairings on the collar (where the barrier kinks) a relative one.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Certificate {
    pub construction: Construction,
    pub p: f64,
    pub h: f64,
    pub basis_size: usize,
    pub min_pairing: f64,
    pub argmin_node: Vec<f64>,
    pub min_off_collar: f64,
    pub min_collar: f64,
    pub tol_off_collar: f64,
    pub tol_collar: f64,
    pub max_abs_pairing: f64,
    pub pass: bool,
}

/// Run the weak form against the full nonnegative hat basis (one hat per
/// admissible node) and grade the minima zone by zone.
pub fn certify_superharmonic(v: &BarrierField, params: &HardyParams) -> Result<Certificate> {
    let grid = &v.field.grid;
    let n = grid.n;
    let h = grid.h;
    let pairings = hat_pairings(v, params);
    let collar = dilate_linf(grid, &v.ridge, 2);
    let dv = grad_values(grid, &v.field.values);

    let mut basis_size = 0usize;
    let mut min_pairing = f64::INFINITY;
    let mut argmin = 0usize;
    let mut min_off = f64::INFINITY;
    let mut min_col = f64::INFINITY;
    let mut max_abs = 0.0f64;
    let mut max_flux_off = 0.0f64;
    for idx in 0..grid.len() {
        if !grid.admissible[idx] {
            continue;
        }
        basis_size += 1;
        let pi = pairings[idx];
        if pi < min_pairing {
            min_pairing = pi;
            argmin = idx;
        }
        max_abs = max_abs.max(pi.abs());
        if collar[idx] {
            min_col = min_col.min(pi);
        } else {
            min_off = min_off.min(pi);
            let g2: f64 = dv.iter().map(|gk| gk[idx] * gk[idx]).sum();
            if g2 > 0.0 {
                max_flux_off = max_flux_off.max(g2.powf(0.5 * (params.p - 1.0)));
            }
        }
    }
    if basis_size == 0 {
        return Err(Error::GridTooCoarse("no admissible nodes to build hats on".into()));
    }
    let tol_off_collar = OFF_COLLAR_TOL_SCALE * h.powi(n as i32 + 1) * max_flux_off;
    let tol_collar = COLLAR_TOL_FRACTION * max_abs;
    let pass = min_off >= -tol_off_collar && min_col >= -tol_collar;
    Ok(Certificate {
        construction: v.construction,
        p: params.p,
        h,
        basis_size,
        min_pairing,
        argmin_node: grid.node_point(argmin),
        min_off_collar: min_off,
        min_collar: min_col,
        tol_off_collar,
        tol_collar,
        max_abs_pairing: max_abs,
        pass,
    })
}

/// Per-batch outcome of the Caccioppoli estimate on a family of ζ, plus the
/// proof-identity diagnostic for φ = |ζ|^p v^{1−p}.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CaccioppoliReport {
    pub p: f64,
    pub zeta_count: usize,
    pub violations: usize,
    pub max_ratio: f64,
    pub worst_margin: f64,
    pub tol_fraction: f64,
    pub identity_residual: f64,
    pub pass: bool,
}

/// Relative tolerance on lhs ≤ rhs: lhs ≤ rhs·(1 + CACC_TOL_FRACTION).
pub const CACC_TOL_FRACTION: f64 = 0.02;

/// Check lhs ≤ rhs·(1+tol) for each ζ and evaluate the product-rule
/// residual max|∇φ − (p|ζ|^{p−2}ζ v^{1−p}∇ζ − (p−1)|ζ|^p v^{−p}∇v)|, which
/// decays O(h) for smooth ζ.
pub fn caccioppoli_check(
    v: &BarrierField,
    zetas: &[ScalarField],
    params: &HardyParams,
) -> Result<CaccioppoliReport> {
    let mut violations = 0usize;
    let mut max_ratio = 0.0f64;
    let mut worst_margin = f64::INFINITY;
    let mut identity_residual = 0.0f64;
    for zeta in zetas {
        let (lhs, rhs) = caccioppoli_sides(zeta, &v.field, params)?;
        let margin = rhs * (1.0 + CACC_TOL_FRACTION) - lhs;
        worst_margin = worst_margin.min(margin);
        if rhs > 0.0 {
            max_ratio = max_ratio.max(lhs / rhs);
        }
        if margin < 0.0 {
            violations += 1;
        }
        identity_residual = identity_residual.max(phi_identity_residual(zeta, &v.field, params.p));
    }
    Ok(CaccioppoliReport {
        p: params.p,
        zeta_count: zetas.len(),
        violations,
        max_ratio,
        worst_margin,
        tol_fraction: CACC_TOL_FRACTION,
        identity_residual,
        pass: violations == 0,
    })
}

/// max over support nodes of |∇φ − (p|ζ|^{p−2}ζ v^{1−p}∇ζ − (p−1)|ζ|^p v^{−p}∇v)|₂
/// for φ = |ζ|^p v^{1−p}.
pub(crate) fn phi_identity_residual(zeta: &ScalarField, v: &ScalarField, p: f64) -> f64 {
    let grid = &zeta.grid;
    let len = grid.len();
    let mut phi = vec![0.0f64; len];
    for i in 0..len {
        if zeta.values[i] != 0.0 {
            phi[i] = abs_powp(zeta.values[i], p) * v.values[i].powf(1.0 - p);
        }
    }
    let gphi = grad_values(grid, &phi);
    let gz = grad_values(grid, &zeta.values);
    let gv = grad_values(grid, &v.values);
    let mut max_res = 0.0f64;
    for idx in 0..len {
        let z = zeta.values[idx];
        if !grid.interior[idx] || z == 0.0 {
            continue;
        }
        let vv = v.values[idx];
        let zp1 = abs_powp(z, p - 1.0) * z.signum();
        let a = p * zp1 * vv.powf(1.0 - p);
        let b = (p - 1.0) * abs_powp(z, p) * vv.powf(-p);
        let mut res2 = 0.0f64;
        for k in 0..grid.n {
            let r = gphi[k][idx] - (a * gz[k][idx] - b * gv[k][idx]);
            res2 += r * r;
        }
        max_res = max_res.max(res2.sqrt());
    }
    max_res
}

/// Outcome of the nodewise gradient lower bound |∇log v| ≥ C^{1/p}/δ.
#[derive(Debug, Clone, serde::Serialize)]
pub struct LogGradientReport {
    pub constant: f64,
    pub beta: f64,
    pub radius: f64,
    pub diameter: f64,
    pub nodes_checked: usize,
    pub min_slack: f64,
    pub min_ratio: f64,
    pub pass: bool,
}

/// For the exterior-sphere barrier, compute the constant
///   C = (R/(R+diam Ω))^{βp}  when β ≥ 1,
///   C = (R/(R+diam Ω))^p     when 0 < β < 1,
/// and verify |∇log v| ≥ C^{1/p}/δ at admissible nodes off the ridge
/// collar. Returns (C, report).
pub fn log_gradient_lower_bound(
    v: &BarrierField,
    delta: &DistanceField,
    params: &HardyParams,
) -> Result<(f64, LogGradientReport)> {
    let (radius, beta) = match v.construction {
        Construction::ExteriorSphere { radius, beta } => (radius, beta),
        other => {
            return Err(Error::WrongConstruction(format!(
                "log gradient bound applies to the exterior-sphere barrier, got {other:?}"
            )))
        }
    };
    v.field.check_same_grid(&delta.grid)?;
    let p = params.p;
    let diameter = delta.domain.diameter;
    let base = radius / (radius + diameter);
    let constant = if beta >= 1.0 { base.powf(beta * p) } else { base.powf(p) };
    let c_root = constant.powf(1.0 / p);

    let grid = &v.field.grid;
    let gv = grad_values(grid, &v.field.values);
    let collar = dilate_linf(grid, &v.ridge, 2);
    let mut nodes_checked = 0usize;
    let mut min_slack = f64::INFINITY;
    let mut min_ratio = f64::INFINITY;
    for idx in 0..grid.len() {
        if !grid.admissible[idx] || collar[idx] {
            continue;
        }
        nodes_checked += 1;
        let g2: f64 = gv.iter().map(|gk| gk[idx] * gk[idx]).sum();
        let log_grad = g2.sqrt() / v.field.values[idx];
        let bound = c_root / delta.values[idx];
        min_slack = min_slack.min(log_grad - bound);
        min_ratio = min_ratio.min(log_grad / bound);
    }
    let pass = min_slack >= -1e-9 * c_root;
    Ok((
        constant,
        LogGradientReport {
            constant,
            beta,
            radius,
            diameter,
            nodes_checked,
            min_slack,
            min_ratio,
            pass,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{gradient_energy, hardy_quotient, random_bump_field, weighted_mass};
    use crate::geometry::{distance_field_grid, Domain, Grid};

    fn square_delta(h: f64) -> DistanceField {
        let d = Domain::unit_square();
        let g = Grid::build(&d, h).unwrap();
        distance_field_grid(&d, g).unwrap()
    }

    fn annulus_delta(h: f64) -> DistanceField {
        let d = Domain::annulus(vec![0.0, 0.0], 0.5, 1.0).unwrap();
        let g = Grid::build(&d, h).unwrap();
        distance_field_grid(&d, g).unwrap()
    }

    fn ball3_delta(h: f64, r_ext: Option<f64>) -> DistanceField {
        let mut d = Domain::ball(vec![0.0, 0.0, 0.0], 0.5).unwrap();
        if let Some(r) = r_ext {
            d = d.with_exterior_sphere(r).unwrap();
        }
        let g = Grid::build(&d, h).unwrap();
        distance_field_grid(&d, g).unwrap()
    }

    #[test]
    fn distance_power_alpha_is_half_for_p3_n2() {
        let delta = square_delta(1.0 / 16.0);
        let params = HardyParams::new(3.0, 2).unwrap();
        let b = make_barrier(&delta, &params, BarrierKind::DistancePower, None).unwrap();
        match b.construction {
            Construction::DistancePower { alpha } => assert!((alpha - 0.5).abs() < 1e-15),
            other => panic!("wrong construction {other:?}"),
        }
        for i in 0..delta.values.len() {
            if delta.grid.interior[i] {
                assert!((b.field.values[i] - delta.values[i].sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exterior_sphere_values_match_hand_formula() {
        // p = 2, n = 3, R = 1: β = 1, v = 1 − 1/(1+δ); at δ = 0.5 (center
        // of the radius-1/2 ball... center has δ = 0.5) v = 1 − 1/1.5 = 1/3.
        let delta = ball3_delta(1.0 / 8.0, None);
        let params = HardyParams::new(2.0, 3).unwrap();
        let b = make_barrier(&delta, &params, BarrierKind::ExteriorSphere, Some(1.0)).unwrap();
        match b.construction {
            Construction::ExteriorSphere { radius, beta } => {
                assert_eq!(radius, 1.0);
                assert!((beta - 1.0).abs() < 1e-15);
            }
            other => panic!("wrong construction {other:?}"),
        }
        let grid = &b.field.grid;
        let center = (0..grid.len())
            .find(|&i| grid.node_point(i).iter().all(|&x| x.abs() < 1e-12))
            .unwrap();
        assert!((delta.values[center] - 0.5).abs() < 1e-12);
        assert!((b.field.values[center] - (1.0 - 1.0 / 1.5)).abs() < 1e-12);
    }

    #[test]
    fn distance_barrier_is_delta_and_needs_convexity() {
        let delta = square_delta(1.0 / 16.0);
        let params = HardyParams::new(2.0, 2).unwrap();
        let b = make_barrier(&delta, &params, BarrierKind::Distance, None).unwrap();
        assert_eq!(b.field.values, delta.values);

        let ann = annulus_delta(1.0 / 16.0);
        assert!(matches!(
            make_barrier(&ann, &params, BarrierKind::Distance, None),
            Err(Error::NonConvexDomain)
        ));
    }

    #[test]
    fn barrier_param_domain_checks() {
        let delta = square_delta(1.0 / 16.0);
        // DistancePower needs p > n.
        let p2 = HardyParams::new(2.0, 2).unwrap();
        assert!(matches!(
            make_barrier(&delta, &p2, BarrierKind::DistancePower, None),
            Err(Error::ParamRange(_))
        ));
        // ExteriorSphere needs p < n.
        assert!(matches!(
            make_barrier(&delta, &p2, BarrierKind::ExteriorSphere, Some(0.5)),
            Err(Error::ParamRange(_))
        ));
        // and a radius from somewhere.
        let d3 = ball3_delta(1.0 / 8.0, None);
        let p23 = HardyParams::new(2.0, 3).unwrap();
        assert!(matches!(
            make_barrier(&d3, &p23, BarrierKind::ExteriorSphere, None),
            Err(Error::MissingRadius)
        ));
        // dimension mismatch between params and domain.
        let p24 = HardyParams::new(2.0, 4).unwrap();
        assert!(matches!(
            make_barrier(&delta, &p24, BarrierKind::Distance, None),
            Err(Error::ParamRange(_))
        ));
    }

    #[test]
    fn hat_pairings_match_weak_form_one_by_one() {
        let delta = square_delta(1.0 / 24.0);
        for p in [2.0, 3.0] {
            let params = HardyParams::new(p, 2).unwrap();
            let v = make_barrier(&delta, &params, BarrierKind::Distance, None).unwrap();
            let fast = hat_pairings(&v, &params);
            let grid = v.field.grid.clone();
            let adm: Vec<usize> = (0..grid.len()).filter(|&i| grid.admissible[i]).collect();
            for &idx in adm.iter().step_by(adm.len() / 20 + 1) {
                let mut hat = ScalarField::zeros(grid.clone());
                hat.values[idx] = 1.0;
                let slow = weak_form_pairing(&v, &hat, &params).unwrap();
                // Same four flux products, different association order.
                assert!(
                    (fast[idx] - slow).abs() <= 1e-11,
                    "p {p} node {idx}: fast {} vs slow {slow}",
                    fast[idx]
                );
            }
        }
    }

    #[test]
    fn weak_form_rejects_negative_test_function() {
        let delta = square_delta(1.0 / 16.0);
        let params = HardyParams::new(2.0, 2).unwrap();
        let v = make_barrier(&delta, &params, BarrierKind::Distance, None).unwrap();
        let mut phi = ScalarField::zeros(v.field.grid.clone());
        let idx = (0..phi.grid.len()).find(|&i| phi.grid.admissible[i]).unwrap();
        phi.values[idx] = -0.5;
        assert!(matches!(
            weak_form_pairing(&v, &phi, &params),
            Err(Error::NegativeTestFunction)
        ));
    }

    #[test]
    fn pairing_vanishes_where_distance_is_affine() {
        // Hat away from the square's diagonals: δ is affine on the stencil,
        // so the p-Laplacian pairing is 0 to rounding.
        let delta = square_delta(1.0 / 32.0);
        let params = HardyParams::new(2.0, 2).unwrap();
        let v = make_barrier(&delta, &params, BarrierKind::Distance, None).unwrap();
        let grid = v.field.grid.clone();
        let idx = (0..grid.len())
            .find(|&i| {
                let pt = grid.node_point(i);
                grid.admissible[i] && (pt[0] - 0.25).abs() < 1e-9 && (pt[1] - 0.0625).abs() < 1e-9
            })
            .unwrap();
        let pairings = hat_pairings(&v, &params);
        assert!(pairings[idx].abs() < 1e-12, "pairing {}", pairings[idx]);
    }

    #[test]
    fn certificates_pass_for_genuine_barriers() {
        // v = δ on the convex square, all four exponents, two resolutions.
        for h in [1.0 / 32.0, 1.0 / 48.0] {
            let delta = square_delta(h);
            for p in [1.5, 2.0, 3.0, 5.0] {
                let params = HardyParams::new(p, 2).unwrap();
                let v = make_barrier(&delta, &params, BarrierKind::Distance, None).unwrap();
                let cert = certify_superharmonic(&v, &params).unwrap();
                assert!(cert.pass, "square δ p={p} h={h}: {cert:?}");
            }
        }
        // v = δ^α on the annulus, p > n.
        for h in [1.0 / 32.0, 1.0 / 48.0] {
            let delta = annulus_delta(h);
            for p in [3.0, 5.0] {
                let params = HardyParams::new(p, 2).unwrap();
                let v = make_barrier(&delta, &params, BarrierKind::DistancePower, None).unwrap();
                let cert = certify_superharmonic(&v, &params).unwrap();
                assert!(cert.pass, "annulus δ^α p={p} h={h}: {cert:?}");
            }
        }
        // Exterior-sphere barrier on a 3-D ball, p < n.
        for h in [1.0 / 12.0, 1.0 / 16.0] {
            let delta = ball3_delta(h, Some(0.5));
            for p in [1.5, 2.0] {
                let params = HardyParams::new(p, 3).unwrap();
                let v = make_barrier(&delta, &params, BarrierKind::ExteriorSphere, None).unwrap();
                let cert = certify_superharmonic(&v, &params).unwrap();
                assert!(cert.pass, "ball3 ext p={p} h={h}: {cert:?}");
            }
        }
    }

    #[test]
    fn certificates_reject_fake_barriers() {
        let params2 = HardyParams::new(2.0, 2).unwrap();
        // δ² is p-subharmonic in the bulk on the square.
        let delta = square_delta(1.0 / 32.0);
        let fake = BarrierField {
            field: ScalarField {
                grid: delta.grid.clone(),
                values: delta.values.iter().map(|&d| d * d).collect(),
                compact_support: false,
            },
            construction: Construction::Distance,
            params: params2,
            ridge: delta.ridge.clone(),
        };
        let cert = certify_superharmonic(&fake, &params2).unwrap();
        assert!(!cert.pass, "δ² wrongly certified: {cert:?}");

        // δ on the (non-convex) annulus is not 2-superharmonic.
        let ann = annulus_delta(1.0 / 32.0);
        let fake = BarrierField {
            field: ScalarField {
                grid: ann.grid.clone(),
                values: ann.values.clone(),
                compact_support: false,
            },
            construction: Construction::Distance,
            params: params2,
            ridge: ann.ridge.clone(),
        };
        let cert = certify_superharmonic(&fake, &params2).unwrap();
        assert!(!cert.pass, "annulus δ wrongly certified: {cert:?}");

        // Wrong power: δ^1 on the annulus at p = 4 (true α = 2/3).
        let params4 = HardyParams::new(4.0, 2).unwrap();
        let fake = BarrierField {
            field: ScalarField {
                grid: ann.grid.clone(),
                values: ann.values.clone(),
                compact_support: false,
            },
            construction: Construction::DistancePower { alpha: 1.0 },
            params: params4,
            ridge: ann.ridge.clone(),
        };
        let cert = certify_superharmonic(&fake, &params4).unwrap();
        assert!(!cert.pass, "annulus δ^1 at p=4 wrongly certified: {cert:?}");
    }

    #[test]
    fn caccioppoli_identity_residual_halves_on_ball() {
        let params = HardyParams::new(2.0, 2).unwrap();
        let mut residuals = Vec::new();
        for h in [1.0 / 32.0, 1.0 / 64.0] {
            let d = Domain::ball(vec![0.0, 0.0], 0.5).unwrap();
            let g = Grid::build(&d, h).unwrap();
            let delta = distance_field_grid(&d, g.clone()).unwrap();
            let v = make_barrier(&delta, &params, BarrierKind::Distance, None).unwrap();
            // Single smooth cubic bump, fixed position.
            let zeta = ScalarField::compact_from_fn(g, |x| {
                let d2 = (x[0] - 0.15).powi(2) + (x[1] - 0.05).powi(2);
                let u2 = d2 / (0.12 * 0.12);
                if u2 >= 1.0 {
                    0.0
                } else {
                    (1.0 - u2).powi(3)
                }
            });
            let rep = caccioppoli_check(&v, &[zeta], &params).unwrap();
            assert!(rep.pass, "h={h}: {rep:?}");
            residuals.push(rep.identity_residual);
        }
        let ratio = residuals[1] / residuals[0];
        assert!(
            (0.4..=0.6).contains(&ratio),
            "identity residual should halve: {residuals:?}, ratio {ratio}"
        );
    }

    #[test]
    fn caccioppoli_check_many_bumps_three_exponents() {
        let delta = square_delta(1.0 / 64.0);
        let g = delta.grid.clone();
        let zetas: Vec<ScalarField> =
            (0..10).map(|s| random_bump_field(&g, 2f64.sqrt(), s)).collect();
        for p in [1.5, 2.0, 3.0] {
            let params = HardyParams::new(p, 2).unwrap();
            let v = make_barrier(&delta, &params, BarrierKind::Distance, None).unwrap();
            let rep = caccioppoli_check(&v, &zetas, &params).unwrap();
            assert!(rep.pass && rep.violations == 0, "p={p}: {rep:?}");
            assert!(rep.max_ratio > 0.0, "p={p}: nonzero ζ should give nonzero sides");
        }
    }

    #[test]
    fn log_gradient_constant_two_cases() {
        // β = 1 (p = 2, n = 3), R = 1, diam = 1 → C = (1/2)² = 0.25.
        let delta = ball3_delta(1.0 / 8.0, None);
        let params = HardyParams::new(2.0, 3).unwrap();
        let v = make_barrier(&delta, &params, BarrierKind::ExteriorSphere, Some(1.0)).unwrap();
        let (c, rep) = log_gradient_lower_bound(&v, &delta, &params).unwrap();
        assert!((c - 0.25).abs() < 1e-15, "C = {c}");
        assert!(rep.pass, "{rep:?}");
        assert!(rep.min_slack >= 0.0, "bound should hold with slack: {rep:?}");

        // 0 < β < 1: p = 2.5, n = 3 → β = 1/3, C = base^p not base^{βp}.
        let params = HardyParams::new(2.5, 3).unwrap();
        let v = make_barrier(&delta, &params, BarrierKind::ExteriorSphere, Some(1.0)).unwrap();
        let (c, rep) = log_gradient_lower_bound(&v, &delta, &params).unwrap();
        let base: f64 = 1.0 / 2.0;
        assert!((c - base.powf(2.5)).abs() < 1e-15, "C = {c}");
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn log_gradient_needs_exterior_sphere_construction() {
        let delta = square_delta(1.0 / 16.0);
        let params = HardyParams::new(2.0, 2).unwrap();
        let v = make_barrier(&delta, &params, BarrierKind::Distance, None).unwrap();
        assert!(matches!(
            log_gradient_lower_bound(&v, &delta, &params),
            Err(Error::WrongConstruction(_))
        ));
    }

    #[test]
    fn log_gradient_matches_radial_closed_form() {
        // |∇v|/v = βR^β / ((R+δ)((R+δ)^β − R^β)), here with β = 1. The
        // boundary staircase is ridge-flagged, so 1/16 leaves almost no
        // off-collar nodes on this ball; 1/24 leaves thousands.
        let h = 1.0 / 24.0;
        let delta = ball3_delta(h, Some(0.5));
        let params = HardyParams::new(2.0, 3).unwrap();
        let v = make_barrier(&delta, &params, BarrierKind::ExteriorSphere, None).unwrap();
        let grid = &v.field.grid;
        let gv = grad_values(grid, &v.field.values);
        let collar = dilate_linf(grid, &v.ridge, 2);
        let r = 0.5f64;
        let mut checked = 0usize;
        for idx in 0..grid.len() {
            if !grid.admissible[idx] || collar[idx] {
                continue;
            }
            let g2: f64 = gv.iter().map(|gk| gk[idx] * gk[idx]).sum();
            let measured = g2.sqrt() / v.field.values[idx];
            let d = delta.values[idx];
            let closed = r / ((r + d) * d);
            assert!(
                (measured - closed).abs() <= 8.0 * h * closed,
                "δ={d}: measured {measured} vs closed {closed}"
            );
            checked += 1;
        }
        assert!(checked > 100);
    }

    #[test]
    fn distance_power_log_gradient_scales_by_alpha() {
        // |∇log δ^α| = α|∇log δ| away from kinks; in the band δ ≥ 0.15 the
        // O(h/δ) error stays within 4h. The wide annulus keeps the band
        // populated (the narrow one never reaches δ = 0.15).
        let h = 1.0 / 32.0;
        let d = Domain::annulus(vec![0.0, 0.0], 0.25, 1.0).unwrap();
        let g = Grid::build(&d, h).unwrap();
        let delta = distance_field_grid(&d, g).unwrap();
        let params = HardyParams::new(4.0, 2).unwrap();
        let v = make_barrier(&delta, &params, BarrierKind::DistancePower, None).unwrap();
        let alpha = match v.construction {
            Construction::DistancePower { alpha } => alpha,
            _ => unreachable!(),
        };
        assert!((alpha - 2.0 / 3.0).abs() < 1e-15);
        let grid = &v.field.grid;
        let gv = grad_values(grid, &v.field.values);
        let gd = grad_values(grid, &delta.values);
        let collar = dilate_linf(grid, &v.ridge, 2);
        let mut checked = 0usize;
        for idx in 0..grid.len() {
            if !grid.admissible[idx] || collar[idx] || delta.values[idx] < 0.15 {
                continue;
            }
            let gv2: f64 = gv.iter().map(|gk| gk[idx] * gk[idx]).sum();
            let gd2: f64 = gd.iter().map(|gk| gk[idx] * gk[idx]).sum();
            let log_v = gv2.sqrt() / v.field.values[idx];
            let log_d = gd2.sqrt() / delta.values[idx];
            let ratio = log_v / log_d;
            assert!((ratio - alpha).abs() <= 4.0 * h, "δ={}: ratio {ratio}", delta.values[idx]);
            checked += 1;
        }
        assert!(checked > 50);
    }

    #[test]
    fn exterior_sphere_chain_composes_into_hardy_bound() {
        // ∫|ζ/δ|^p ≤ (p/(p−1))^p C^{−1} ∫|∇ζ|^p on random ζ.
        let h = 1.0 / 16.0;
        let delta = ball3_delta(h, Some(0.5));
        let params = HardyParams::new(2.0, 3).unwrap();
        let v = make_barrier(&delta, &params, BarrierKind::ExteriorSphere, None).unwrap();
        let (c, rep) = log_gradient_lower_bound(&v, &delta, &params).unwrap();
        assert!(rep.pass);
        let bound = params.caccioppoli_constant() / c;
        let g = delta.grid.clone();
        for seed in 0..5u64 {
            let zeta = random_bump_field(&g, 1.0, seed);
            let num = weighted_mass(&zeta, &delta, params.p);
            let den = gradient_energy(&zeta, params.p);
            assert!(num <= bound * den * (1.0 + 1e-9), "seed {seed}: {num} vs {}", bound * den);
            // Cross-check through the public quotient.
            let q = hardy_quotient(&zeta, &delta, &params).unwrap();
            assert!(q <= bound * (1.0 + 1e-9));
        }
    }
}
