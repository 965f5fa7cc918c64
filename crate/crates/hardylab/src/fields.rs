//! Discrete calculus on grid fields: gradients, pᵗʰ-power quadrature, and
//! the two sides of the Hardy and Caccioppoli inequalities.
//!
//! The Hardy quotient of a compactly supported ζ is
//!   Q(ζ) = ∫ |ζ/δ|^p dx / ∫ |∇ζ|^p dx,
//! and the logarithmic Caccioppoli estimate for a positive p-superharmonic v
//! bounds ∫ |ζ ∇log v|^p ≤ (p/(p−1))^p ∫ |∇ζ|^p.
//!
//! All integrals are midpoint sums hⁿ·Σ over interior nodes in a fixed
//! axis-major order; gradients are forward differences with zero extension.
//! The compact-support class vanishes on boundary-adjacent interior nodes,
//! so ζ/δ never evaluates near δ = 0 and forward differences of ζ never
//! straddle the boundary; 0^p = 0 exactly and no epsilon regularization is
//! applied anywhere.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{for_each_node, DistanceField, Grid};
use crate::{Error, Result};

/// Exponent p and spatial dimension n; rejects p = 1 and p = ∞.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HardyParams {
    pub p: f64,
    pub n: usize,
}

impl HardyParams {
    pub fn new(p: f64, n: usize) -> Result<Self> {
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::ParamRange(format!("exponent must satisfy 1 < p < ∞, got {p}")));
        }
        if n < 1 {
            return Err(Error::ParamRange("dimension must be at least 1".into()));
        }
        Ok(HardyParams { p, n })
    }

    /// (p/(p−1))^p, the constant in the Caccioppoli bound and the sharp
    /// Hardy constant on convex domains.
    pub fn caccioppoli_constant(&self) -> f64 {
        (self.p / (self.p - 1.0)).powf(self.p)
    }
}

/// Nodal values on a grid with zero extension outside the interior.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
    /// Asserts values vanish on non-interior nodes and on interior nodes
    /// adjacent to the exterior (discrete stand-in for ζ ∈ C_0^∞(Ω)).
    pub compact_support: bool,
}

impl ScalarField {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let len = grid.len();
        ScalarField { grid, values: vec![0.0; len], compact_support: true }
    }

    /// Evaluate `f` at interior nodes; zero elsewhere. Not compact-support.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        let n = grid.n;
        let mut point = vec![0.0; n];
        for_each_node(&grid.shape, |idx, pos| {
            if grid.interior[idx] {
                for k in 0..n {
                    point[k] = grid.coord(pos[k], k);
                }
                values[idx] = f(&point);
            }
        });
        ScalarField { grid, values, compact_support: false }
    }

    /// Evaluate `f` at admissible nodes only (interior nodes with a fully
    /// interior Moore neighborhood); zero on the one-node boundary ring.
    pub fn compact_from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        let n = grid.n;
        let mut point = vec![0.0; n];
        for_each_node(&grid.shape, |idx, pos| {
            if grid.admissible[idx] {
                for k in 0..n {
                    point[k] = grid.coord(pos[k], k);
                }
                values[idx] = f(&point);
            }
        });
        ScalarField { grid, values, compact_support: true }
    }

    /// Restrict an arbitrary nodal array to the admissible set (one-node
    /// trim), producing a compact-support field.
    pub fn compact_from_values(grid: Arc<Grid>, values: &[f64]) -> Self {
        let trimmed = values
            .iter()
            .enumerate()
            .map(|(i, &v)| if grid.admissible[i] { v } else { 0.0 })
            .collect();
        ScalarField { grid, values: trimmed, compact_support: true }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| c * v).collect(),
            compact_support: self.compact_support,
        }
    }

    pub(crate) fn check_same_grid(&self, other: &Grid) -> Result<()> {
        if self.grid.same_layout(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// |x|^p with 0^p = 0 and multiply/sqrt fast paths for the exponents the
/// toolkit sweeps most.
pub fn abs_powp(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        return 0.0;
    }
    if p == 2.0 {
        a * a
    } else if p == 1.0 {
        a
    } else if p == 0.5 {
        a.sqrt()
    } else if p == 1.5 {
        a * a.sqrt()
    } else if p == 3.0 {
        a * a * a
    } else if p == 4.0 {
        let s = a * a;
        s * s
    } else if p == 5.0 {
        let s = a * a;
        s * s * a
    } else {
        a.powf(p)
    }
}

/// |g|^p given g² ≥ 0.
pub(crate) fn grad_pow_p(g2: f64, p: f64) -> f64 {
    if g2 == 0.0 {
        return 0.0;
    }
    if p == 2.0 {
        g2
    } else if p == 1.5 {
        let r = g2.sqrt();
        r * r.sqrt()
    } else if p == 3.0 {
        g2 * g2.sqrt()
    } else if p == 4.0 {
        g2 * g2
    } else if p == 5.0 {
        g2 * g2 * g2.sqrt()
    } else {
        g2.powf(0.5 * p)
    }
}

/// |g|^{p−2} given g², under the convention that the caller multiplies the
/// result by a component of g, so the product → 0 as |g| → 0 for all p > 1.
pub(crate) fn grad_pow_pm2(g2: f64, p: f64) -> f64 {
    if g2 == 0.0 {
        return 0.0;
    }
    if p == 2.0 {
        1.0
    } else if p == 1.5 {
        1.0 / g2.sqrt().sqrt()
    } else if p == 3.0 {
        g2.sqrt()
    } else if p == 4.0 {
        g2
    } else if p == 5.0 {
        g2 * g2.sqrt()
    } else {
        g2.powf(0.5 * (p - 2.0))
    }
}

/// Forward differences with zero extension, one array per axis.
pub fn grad(field: &ScalarField) -> Vec<Vec<f64>> {
    grad_values(&field.grid, &field.values)
}

pub(crate) fn grad_values(grid: &Grid, values: &[f64]) -> Vec<Vec<f64>> {
    let n = grid.n;
    let h = grid.h;
    let mut out = vec![vec![0.0f64; values.len()]; n];
    for_each_node(&grid.shape, |idx, pos| {
        for (k, out_k) in out.iter_mut().enumerate() {
            let fwd = if pos[k] + 1 < grid.shape[k] { values[idx + grid.strides[k]] } else { 0.0 };
            out_k[idx] = (fwd - values[idx]) / h;
        }
    });
    out
}

/// hⁿ-weighted sum over interior nodes in axis-major order.
pub fn integrate(field: &ScalarField) -> f64 {
    integrate_values(&field.grid, &field.values)
}

pub(crate) fn integrate_values(grid: &Grid, values: &[f64]) -> f64 {
    let mut s = 0.0f64;
    for idx in 0..grid.len() {
        if grid.interior[idx] {
            s += values[idx];
        }
    }
    s * grid.h.powi(grid.n as i32)
}

/// ∫ |∇f|^p dx for the forward-difference gradient.
pub fn gradient_energy(field: &ScalarField, p: f64) -> f64 {
    let grid = &field.grid;
    let g = grad(field);
    let mut s = 0.0f64;
    for idx in 0..grid.len() {
        if !grid.interior[idx] {
            continue;
        }
        let g2: f64 = g.iter().map(|gk| gk[idx] * gk[idx]).sum();
        s += grad_pow_p(g2, p);
    }
    s * grid.h.powi(grid.n as i32)
}

/// ∫ |ζ/δ|^p dx; safe because ζ vanishes where δ is one cell from 0.
pub fn weighted_mass(zeta: &ScalarField, delta: &DistanceField, p: f64) -> f64 {
    let grid = &zeta.grid;
    let mut s = 0.0f64;
    for idx in 0..grid.len() {
        if !grid.interior[idx] || zeta.values[idx] == 0.0 {
            continue;
        }
        s += abs_powp(zeta.values[idx] / delta.values[idx], p);
    }
    s * grid.h.powi(grid.n as i32)
}

/// Hardy quotient ∫|ζ/δ|^p / ∫|∇ζ|^p. Requires compact support so the
/// weight never sees δ → 0; ∇ζ ≡ 0 can only happen for ζ ≡ 0 and is
/// reported as a caller bug.
pub fn hardy_quotient(
    zeta: &ScalarField,
    delta: &DistanceField,
    params: &HardyParams,
) -> Result<f64> {
    zeta.check_same_grid(&delta.grid)?;
    debug_assert!(zeta.compact_support, "hardy_quotient requires a compact-support field");
    let den = gradient_energy(zeta, params.p);
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let num = weighted_mass(zeta, delta, params.p);
    Ok(num / den)
}

/// Both sides of the logarithmic Caccioppoli estimate:
/// lhs = ∫ |ζ ∇log v|^p, rhs = (p/(p−1))^p ∫ |∇ζ|^p.
pub fn caccioppoli_sides(
    zeta: &ScalarField,
    v: &ScalarField,
    params: &HardyParams,
) -> Result<(f64, f64)> {
    zeta.check_same_grid(&v.grid)?;
    let grid = &zeta.grid;
    let p = params.p;
    for idx in 0..grid.len() {
        if grid.interior[idx] && zeta.values[idx] != 0.0 && v.values[idx] <= 0.0 {
            return Err(Error::NonpositiveBarrier);
        }
    }
    let gv = grad(v);
    let mut lhs = 0.0f64;
    for idx in 0..grid.len() {
        if !grid.interior[idx] || zeta.values[idx] == 0.0 {
            continue;
        }
        let g2: f64 = gv.iter().map(|gk| gk[idx] * gk[idx]).sum();
        // |ζ|^p · (|∇v| / v)^p
        lhs += abs_powp(zeta.values[idx], p) * grad_pow_p(g2, p) / abs_powp(v.values[idx], p);
    }
    lhs *= grid.h.powi(grid.n as i32);
    let rhs = params.caccioppoli_constant() * gradient_energy(zeta, p);
    Ok((lhs, rhs))
}

/// Sum of 1–5 smooth polynomial bumps (1−u²)³ with seeded random centers,
/// radii, and amplitudes, restricted to the admissible node set.
pub fn random_bump_field(grid: &Arc<Grid>, diameter: f64, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let interior_nodes: Vec<usize> = (0..grid.len()).filter(|&i| grid.interior[i]).collect();
    if interior_nodes.is_empty() {
        return ScalarField::zeros(grid.clone());
    }
    for _ in 0..64 {
        let count = rng.gen_range(1..=5usize);
        let mut bumps: Vec<(Vec<f64>, f64, f64)> = Vec::with_capacity(count);
        for _ in 0..count {
            let center_idx = interior_nodes[rng.gen_range(0..interior_nodes.len())];
            let center = grid.node_point(center_idx);
            let radius = (diameter * rng.gen_range(0.05..0.25)).max(3.0 * grid.h);
            let amplitude = rng.gen_range(0.3..1.0);
            bumps.push((center, radius, amplitude));
        }
        let field = ScalarField::compact_from_fn(grid.clone(), |x| {
            bumps
                .iter()
                .map(|(c, r, a)| {
                    let d2: f64 = x.iter().zip(c).map(|(xi, ci)| (xi - ci) * (xi - ci)).sum();
                    let u2 = d2 / (r * r);
                    if u2 >= 1.0 {
                        0.0
                    } else {
                        let w = 1.0 - u2;
                        a * w * w * w
                    }
                })
                .sum()
        });
        if !field.is_zero() {
            return field;
        }
    }
    ScalarField::zeros(grid.clone())
}

/// CSV dump: coordinates and value at interior nodes.
pub fn field_csv(field: &ScalarField) -> String {
    let grid = &field.grid;
    let n = grid.n;
    let coords = ["x", "y", "z"];
    let mut out = String::new();
    let mut header: Vec<String> = coords[..n].iter().map(|s| s.to_string()).collect();
    header.push("value".into());
    out.push_str(&header.join(","));
    out.push('\n');
    for_each_node(&grid.shape, |idx, pos| {
        if !grid.interior[idx] {
            return;
        }
        let mut row: Vec<String> =
            (0..n).map(|k| format!("{:.16e}", grid.coord(pos[k], k))).collect();
        row.push(format!("{:.16e}", field.values[idx]));
        out.push_str(&row.join(","));
        out.push('\n');
    });
    out
}

/// Read a field back from `field_csv` output; rows are matched to nodes by
/// rounding coordinates to the lattice.
pub fn field_from_csv(grid: Arc<Grid>, csv: &str) -> Result<ScalarField> {
    let mut values = vec![0.0f64; grid.len()];
    let n = grid.n;
    let mut lines = csv.lines();
    let header = lines.next().ok_or_else(|| Error::Config("empty field CSV".into()))?;
    let cols = header.split(',').count();
    if cols != n + 1 {
        return Err(Error::Config(format!("field CSV has {cols} columns, expected {}", n + 1)));
    }
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != n + 1 {
            return Err(Error::Config(format!("row {}: wrong column count", lineno + 2)));
        }
        let mut idx = 0usize;
        for k in 0..n {
            let x: f64 = parts[k]
                .parse()
                .map_err(|e| Error::Config(format!("row {}: {e}", lineno + 2)))?;
            let pos = ((x - grid.lo[k]) / grid.h).round() as isize + 1;
            if pos < 0 || pos as usize >= grid.shape[k] {
                return Err(Error::Config(format!("row {}: point off the grid", lineno + 2)));
            }
            idx += pos as usize * grid.strides[k];
        }
        values[idx] = parts[n]
            .parse()
            .map_err(|e| Error::Config(format!("row {}: {e}", lineno + 2)))?;
    }
    Ok(ScalarField { grid, values, compact_support: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{distance_field_grid, Domain};

    fn interval_setup(h: f64) -> (Domain, Arc<Grid>, DistanceField) {
        let d = Domain::interval(0.0, 1.0).unwrap();
        let g = Grid::build(&d, h).unwrap();
        let f = distance_field_grid(&d, g.clone()).unwrap();
        (d, g, f)
    }

    #[test]
    fn constant_field_has_zero_gradient_inside() {
        let (_, g, _) = interval_setup(0.01);
        let f = ScalarField::from_fn(g.clone(), |_| 1.0);
        let gr = grad(&f);
        // Away from the support edge the difference of equal values is 0.
        for idx in 0..g.len() {
            if g.admissible[idx] {
                assert_eq!(gr[0][idx], 0.0);
            }
        }
    }

    #[test]
    fn affine_field_gradient_is_exact() {
        let (_, g, _) = interval_setup(0.01);
        let f = ScalarField::from_fn(g.clone(), |x| x[0]);
        let gr = grad(&f);
        for idx in 0..g.len() {
            if g.admissible[idx] {
                assert!((gr[0][idx] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn integrate_indicator_and_identity() {
        let (_, g, _) = interval_setup(0.001);
        let one = ScalarField::from_fn(g.clone(), |_| 1.0);
        assert!((integrate(&one) - 1.0).abs() <= 2.0 * 0.001);
        let x = ScalarField::from_fn(g.clone(), |x| x[0]);
        assert!((integrate(&x) - 0.5).abs() <= 2.0 * 0.001);
        let zero = ScalarField::zeros(g);
        assert_eq!(integrate(&zero), 0.0);
    }

    #[test]
    fn tent_quotient_is_one() {
        // ζ = δ trimmed to the admissible set: ζ/δ ≡ 1 on the support and
        // |ζ'| = 1 a.e., so the quotient → 1 with an O(h) trim effect.
        let h = 1.0 / 256.0;
        let (_, g, delta) = interval_setup(h);
        let zeta = ScalarField::compact_from_values(g, &delta.values);
        let params = HardyParams::new(2.0, 1).unwrap();
        let q = hardy_quotient(&zeta, &delta, &params).unwrap();
        assert!((q - 1.0).abs() <= 8.0 * h, "q = {q}");
    }

    #[test]
    fn sine_quotient_converges_to_quadrature_oracle() {
        // ∫(sin πx / δ)² dx / (π²/2) = 1.547390019806 on (0,1) by dense
        // quadrature. The compact-support trim doubles the slope at the two
        // boundary-adjacent nodes, so the discrete quotient sits below the
        // limit by ≈ 18h; assert the bound and the first-order rate.
        let oracle = 1.547390019806;
        let params = HardyParams::new(2.0, 1).unwrap();
        let mut errs = Vec::new();
        for h in [1.0 / 512.0, 1.0 / 1024.0] {
            let (_, g, delta) = interval_setup(h);
            let zeta =
                ScalarField::compact_from_fn(g, |x| (std::f64::consts::PI * x[0]).sin());
            let q = hardy_quotient(&zeta, &delta, &params).unwrap();
            assert!((q - oracle).abs() <= 24.0 * h, "h={h}: q = {q}");
            errs.push((q - oracle).abs());
        }
        let rate = errs[0] / errs[1];
        assert!((1.7..=2.3).contains(&rate), "halving h should halve the error: {errs:?}");
    }

    #[test]
    fn quotient_homogeneity_is_exact_for_dyadic_scaling() {
        let h = 1.0 / 128.0;
        let (_, g, delta) = interval_setup(h);
        for p in [1.5, 2.0, 3.0] {
            let params = HardyParams::new(p, 1).unwrap();
            let zeta = random_bump_field(&g, 1.0, 11);
            let q1 = hardy_quotient(&zeta, &delta, &params).unwrap();
            let q2 = hardy_quotient(&zeta.scaled(-4.0), &delta, &params).unwrap();
            assert_eq!(q1, q2, "p = {p}");
        }
    }

    #[test]
    fn zero_field_quotient_is_zero_denominator() {
        let (_, g, delta) = interval_setup(0.01);
        let zeta = ScalarField::zeros(g);
        let params = HardyParams::new(2.0, 1).unwrap();
        assert!(matches!(hardy_quotient(&zeta, &delta, &params), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn grid_mismatch_is_detected() {
        let (_, g1, delta) = interval_setup(0.01);
        let _ = g1;
        let d2 = Domain::interval(0.0, 1.0).unwrap();
        let g2 = Grid::build(&d2, 0.02).unwrap();
        let zeta = random_bump_field(&g2, 1.0, 3);
        let params = HardyParams::new(2.0, 1).unwrap();
        assert!(matches!(hardy_quotient(&zeta, &delta, &params), Err(Error::GridMismatch)));
    }

    #[test]
    fn caccioppoli_zero_zeta_gives_zero_sides() {
        let (_, g, delta) = interval_setup(0.01);
        let zeta = ScalarField::zeros(g.clone());
        let v = ScalarField { grid: g, values: delta.values.clone(), compact_support: false };
        let params = HardyParams::new(2.0, 1).unwrap();
        assert_eq!(caccioppoli_sides(&zeta, &v, &params).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn caccioppoli_constant_at_p2_is_four() {
        let params = HardyParams::new(2.0, 1).unwrap();
        assert_eq!(params.caccioppoli_constant(), 4.0);
    }

    #[test]
    fn caccioppoli_rejects_nonpositive_barrier() {
        let (_, g, _) = interval_setup(0.01);
        // Bump supported in (0.05, 0.45), where x − 0.5 < 0.
        let zeta = ScalarField::compact_from_fn(g.clone(), |x| {
            let u2 = ((x[0] - 0.25) / 0.2).powi(2);
            if u2 >= 1.0 {
                0.0
            } else {
                (1.0 - u2).powi(3)
            }
        });
        let v = ScalarField::from_fn(g, |x| x[0] - 0.5);
        let params = HardyParams::new(2.0, 1).unwrap();
        assert!(matches!(caccioppoli_sides(&zeta, &v, &params), Err(Error::NonpositiveBarrier)));
    }

    #[test]
    fn caccioppoli_lhs_for_distance_barrier_matches_weighted_mass() {
        // |∇log δ| = |∇δ|/δ = 1/δ a.e.; exact on an interval where the
        // forward slope is ±1 at every interior node.
        let h = 1.0 / 128.0;
        let (_, g, delta) = interval_setup(h);
        let zeta = random_bump_field(&g, 1.0, 21);
        let v = ScalarField { grid: g, values: delta.values.clone(), compact_support: false };
        for p in [1.5, 2.0, 3.0] {
            let params = HardyParams::new(p, 1).unwrap();
            let (lhs, _) = caccioppoli_sides(&zeta, &v, &params).unwrap();
            let mass = weighted_mass(&zeta, &delta, p);
            assert!(
                (lhs - mass).abs() <= 1e-10 * mass.max(1.0),
                "p = {p}: lhs = {lhs}, mass = {mass}"
            );
        }
    }

    #[test]
    fn caccioppoli_holds_for_distance_barrier_on_square() {
        let d = Domain::unit_square();
        let g = Grid::build(&d, 1.0 / 64.0).unwrap();
        let delta = distance_field_grid(&d, g.clone()).unwrap();
        let v = ScalarField { grid: g.clone(), values: delta.values.clone(), compact_support: false };
        for seed in 0..10u64 {
            let zeta = random_bump_field(&g, d.diameter, seed);
            for p in [1.5, 2.0, 3.0] {
                let params = HardyParams::new(p, 2).unwrap();
                let (lhs, rhs) = caccioppoli_sides(&zeta, &v, &params).unwrap();
                assert!(lhs <= rhs * 1.02, "seed {seed}, p {p}: lhs = {lhs}, rhs = {rhs}");
            }
        }
    }

    #[test]
    fn minkowski_inequality_on_discrete_norm() {
        let (_, g, _) = interval_setup(1.0 / 64.0);
        for p in [1.5, 2.0, 3.0] {
            let f = random_bump_field(&g, 1.0, 100);
            let gfield = random_bump_field(&g, 1.0, 200);
            let sum = ScalarField {
                grid: g.clone(),
                values: f.values.iter().zip(&gfield.values).map(|(a, b)| a + b).collect(),
                compact_support: true,
            };
            let norm = |fld: &ScalarField| {
                integrate_values(
                    &g,
                    &fld.values.iter().map(|&v| abs_powp(v, p)).collect::<Vec<_>>(),
                )
                .powf(1.0 / p)
            };
            assert!(norm(&sum) <= norm(&f) + norm(&gfield) + 1e-12);
        }
    }

    #[test]
    fn grad_of_ball_distance_near_unit_length_off_ridge() {
        let d = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let g = Grid::build(&d, 1.0 / 32.0).unwrap();
        let delta = distance_field_grid(&d, g.clone()).unwrap();
        let v = ScalarField { grid: g.clone(), values: delta.values.clone(), compact_support: false };
        let gr = grad(&v);
        let collar = delta.ridge_collar();
        for idx in 0..g.len() {
            if !g.admissible[idx] || collar[idx] {
                continue;
            }
            let g2: f64 = gr.iter().map(|gk| gk[idx] * gk[idx]).sum();
            let err = (g2.sqrt() - 1.0).abs();
            assert!(err <= 4.0 / 32.0, "node {idx}: |∇δ| error {err}");
        }
    }

    #[test]
    fn field_csv_roundtrip() {
        let (_, g, _) = interval_setup(0.125);
        let f = ScalarField::from_fn(g.clone(), |x| 2.0 * x[0] + 0.25);
        let csv = field_csv(&f);
        let back = field_from_csv(g.clone(), &csv).unwrap();
        for idx in 0..g.len() {
            if g.interior[idx] {
                assert_eq!(f.values[idx], back.values[idx]);
            }
        }
    }

    #[test]
    fn params_reject_bad_exponents() {
        assert!(HardyParams::new(1.0, 2).is_err());
        assert!(HardyParams::new(0.5, 2).is_err());
        assert!(HardyParams::new(f64::INFINITY, 2).is_err());
        assert!(HardyParams::new(2.0, 0).is_err());
        assert!(HardyParams::new(1.0000001, 3).is_ok());
    }
}
