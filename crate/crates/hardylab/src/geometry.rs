//! Domains, grids, and distance-to-boundary fields.
//!
//! The distance function δ(x) = min_{ξ∈∂Ω} |x−ξ| is computed from closed
//! forms for every primitive domain (interval, ball, annulus, convex
//! polytope, punctured ball) and from per-edge minima for simple polygons,
//! so the eikonal equation |∇δ| = 1 is an audited property of the field, not
//! the method that produced it. Grids are uniform lattices with at least one
//! exterior node layer on every side; a node is interior iff δ > 0 strictly
//! (with a 10⁻¹²·diam floor against roundoff on lattice-aligned boundaries).
//!
//! δ is 1-Lipschitz and differentiable away from the ridge set (the medial
//! axis, where several boundary points are nearest). Ridge nodes are
//! detected by a forward/backward difference disagreement > 0.5 in some
//! axis; eikonal assertions exclude the ridge plus a 2-cell collar.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Interior strictness floor as a fraction of the domain diameter.
pub const GEOM_EPS_FACTOR: f64 = 1e-12;
/// Forward/backward slope disagreement that flags a ridge node.
pub const RIDGE_THRESHOLD: f64 = 0.5;
/// Ridge collar half-width in lattice cells (L∞ metric).
pub const RIDGE_COLLAR_CELLS: usize = 2;

/// Closed halfspace {x : normal·x ≤ offset} with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    Interval { a: f64, b: f64 },
    Ball { center: Vec<f64>, radius: f64 },
    Annulus { center: Vec<f64>, r_inner: f64, r_outer: f64 },
    ConvexPolytope { halfspaces: Vec<Halfspace> },
    /// Ball with its center removed; the boundary includes the puncture, so
    /// δ = min(|x−c|, radius − |x−c|).
    PuncturedBall { center: Vec<f64>, radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

/// A bounded domain Ω ⊂ ℝⁿ with optional exterior-sphere radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub kind: DomainKind,
    pub dimension: usize,
    pub exterior_sphere_radius: Option<f64>,
    pub diameter: f64,
    convex: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidDomain(format!("interval requires a < b, got [{a}, {b}]")));
        }
        Ok(Domain {
            kind: DomainKind::Interval { a, b },
            dimension: 1,
            exterior_sphere_radius: None,
            diameter: b - a,
            convex: true,
        })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidDomain(format!("ball radius must be positive, got {radius}")));
        }
        let n = center.len();
        if n == 0 {
            return Err(Error::InvalidDomain("ball center must have at least one coordinate".into()));
        }
        Ok(Domain {
            kind: DomainKind::Ball { center, radius },
            dimension: n,
            exterior_sphere_radius: None,
            diameter: 2.0 * radius,
            convex: true,
        })
    }

    pub fn annulus(center: Vec<f64>, r_inner: f64, r_outer: f64) -> Result<Self> {
        if !(0.0 < r_inner && r_inner < r_outer) {
            return Err(Error::InvalidDomain(format!(
                "annulus requires 0 < r_inner < r_outer, got ({r_inner}, {r_outer})"
            )));
        }
        let n = center.len();
        Ok(Domain {
            kind: DomainKind::Annulus { center, r_inner, r_outer },
            dimension: n,
            exterior_sphere_radius: None,
            diameter: 2.0 * r_outer,
            convex: false,
        })
    }

    pub fn punctured_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidDomain(format!("ball radius must be positive, got {radius}")));
        }
        let n = center.len();
        Ok(Domain {
            kind: DomainKind::PuncturedBall { center, radius },
            dimension: n,
            exterior_sphere_radius: None,
            diameter: 2.0 * radius,
            convex: false,
        })
    }

    /// Bounded intersection of halfspaces; normals are unit-normalized here.
    pub fn convex_polytope(halfspaces: Vec<Halfspace>) -> Result<Self> {
        if halfspaces.is_empty() {
            return Err(Error::InvalidDomain("polytope needs at least one halfspace".into()));
        }
        let n = halfspaces[0].normal.len();
        if n == 0 || n > 3 {
            return Err(Error::InvalidDomain(format!("polytope dimension {n} unsupported (1..=3)")));
        }
        let mut hs = Vec::with_capacity(halfspaces.len());
        for h in halfspaces {
            if h.normal.len() != n {
                return Err(Error::InvalidDomain("halfspace normals disagree in dimension".into()));
            }
            let m = norm(&h.normal);
            if !(m > 0.0) {
                return Err(Error::InvalidDomain("halfspace normal must be nonzero".into()));
            }
            hs.push(Halfspace {
                normal: h.normal.iter().map(|x| x / m).collect(),
                offset: h.offset / m,
            });
        }
        let vertices = polytope_vertices(&hs, n)?;
        if vertices.len() < n + 1 {
            return Err(Error::InvalidDomain("polytope is empty or unbounded".into()));
        }
        let diameter = max_pairwise_distance(&vertices);
        Ok(Domain {
            kind: DomainKind::ConvexPolytope { halfspaces: hs },
            dimension: n,
            exterior_sphere_radius: None,
            diameter,
            convex: true,
        })
    }

    /// Simple (non-self-intersecting) polygon from a vertex loop.
    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidDomain("polygon needs at least 3 vertices".into()));
        }
        if polygon_self_intersects(&vertices) {
            return Err(Error::InvalidDomain("polygon is self-intersecting".into()));
        }
        let pts: Vec<Vec<f64>> = vertices.iter().map(|v| v.to_vec()).collect();
        let diameter = max_pairwise_distance(&pts);
        let convex = polygon_is_convex(&vertices);
        Ok(Domain {
            kind: DomainKind::Polygon { vertices },
            dimension: 2,
            exterior_sphere_radius: None,
            diameter,
            convex,
        })
    }

    /// The unit square [0,1]² as a convex polytope.
    pub fn unit_square() -> Self {
        Domain::convex_polytope(vec![
            Halfspace { normal: vec![-1.0, 0.0], offset: 0.0 },
            Halfspace { normal: vec![1.0, 0.0], offset: 1.0 },
            Halfspace { normal: vec![0.0, -1.0], offset: 0.0 },
            Halfspace { normal: vec![0.0, 1.0], offset: 1.0 },
        ])
        .expect("unit square is a valid polytope")
    }

    /// Attach an exterior-sphere radius. Only balls and annuli admit a
    /// uniform exterior tangent ball (polytope corners do not).
    pub fn with_exterior_sphere(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidDomain(format!("exterior sphere radius must be positive, got {r}")));
        }
        match &self.kind {
            DomainKind::Ball { .. } => {}
            DomainKind::Annulus { r_inner, .. } => {
                if r > *r_inner {
                    return Err(Error::InvalidDomain(format!(
                        "exterior sphere of radius {r} does not fit inside the annulus hole (r_inner = {r_inner})"
                    )));
                }
            }
            _ => {
                return Err(Error::UnsupportedKind(
                    "exterior sphere radius is only decidable for Ball and Annulus".into(),
                ))
            }
        }
        self.exterior_sphere_radius = Some(r);
        Ok(self)
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.kind {
            DomainKind::Interval { a, b } => (vec![*a], vec![*b]),
            DomainKind::Ball { center, radius } | DomainKind::PuncturedBall { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            DomainKind::Annulus { center, r_outer, .. } => (
                center.iter().map(|c| c - r_outer).collect(),
                center.iter().map(|c| c + r_outer).collect(),
            ),
            DomainKind::ConvexPolytope { halfspaces } => {
                let vs = polytope_vertices(halfspaces, self.dimension).expect("validated at construction");
                bbox_of(&vs)
            }
            DomainKind::Polygon { vertices } => {
                let vs: Vec<Vec<f64>> = vertices.iter().map(|v| v.to_vec()).collect();
                bbox_of(&vs)
            }
        }
    }

    /// Short name used in reports and output file keys.
    pub fn name(&self) -> String {
        match &self.kind {
            DomainKind::Interval { a, b } => format!("Interval({a},{b})"),
            DomainKind::Ball { radius, .. } => format!("Ball(r={radius})"),
            DomainKind::Annulus { r_inner, r_outer, .. } => format!("Annulus({r_inner},{r_outer})"),
            DomainKind::ConvexPolytope { halfspaces } => {
                format!("ConvexPolytope({} faces)", halfspaces.len())
            }
            DomainKind::PuncturedBall { radius, .. } => format!("PuncturedBall(r={radius})"),
            DomainKind::Polygon { vertices } => format!("Polygon({} vertices)", vertices.len()),
        }
    }

    fn geom_eps(&self) -> f64 {
        GEOM_EPS_FACTOR * self.diameter
    }
}

fn bbox_of(points: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = points[0].len();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for p in points {
        for k in 0..n {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

fn max_pairwise_distance(points: &[Vec<f64>]) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.max(dist(&points[i], &points[j]));
        }
    }
    best
}

/// Enumerate polytope vertices by intersecting n-tuples of face planes and
/// keeping feasible intersection points. Exact for n ≤ 3.
fn polytope_vertices(hs: &[Halfspace], n: usize) -> Result<Vec<Vec<f64>>> {
    let m = hs.len();
    let feas_eps = 1e-9;
    let mut verts: Vec<Vec<f64>> = Vec::new();
    let push_if_feasible = |x: Vec<f64>, verts: &mut Vec<Vec<f64>>| {
        if x.iter().any(|v| !v.is_finite()) {
            return;
        }
        if hs.iter().all(|h| {
            h.normal.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() <= h.offset + feas_eps
        }) && !verts.iter().any(|v| dist(v, &x) < 1e-9)
        {
            verts.push(x);
        }
    };
    match n {
        1 => {
            for h in hs {
                push_if_feasible(vec![h.offset / h.normal[0]], &mut verts);
            }
        }
        2 => {
            for i in 0..m {
                for j in i + 1..m {
                    let (a, b) = (&hs[i], &hs[j]);
                    let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
                    if det.abs() < 1e-12 {
                        continue;
                    }
                    let x = (a.offset * b.normal[1] - b.offset * a.normal[1]) / det;
                    let y = (a.normal[0] * b.offset - b.normal[0] * a.offset) / det;
                    push_if_feasible(vec![x, y], &mut verts);
                }
            }
        }
        3 => {
            for i in 0..m {
                for j in i + 1..m {
                    for k in j + 1..m {
                        if let Some(x) = solve3(&hs[i], &hs[j], &hs[k]) {
                            push_if_feasible(x, &mut verts);
                        }
                    }
                }
            }
        }
        _ => return Err(Error::InvalidDomain(format!("polytope dimension {n} unsupported"))),
    }
    Ok(verts)
}

fn solve3(a: &Halfspace, b: &Halfspace, c: &Halfspace) -> Option<Vec<f64>> {
    let m = [&a.normal, &b.normal, &c.normal];
    let r = [a.offset, b.offset, c.offset];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.abs() < 1e-12 {
        return None;
    }
    // Cramer's rule, one column replaced per coordinate.
    let col = |j: usize| -> f64 {
        let mut t = [[0.0f64; 3]; 3];
        for (row, mi) in m.iter().enumerate() {
            for c2 in 0..3 {
                t[row][c2] = if c2 == j { r[row] } else { mi[c2] };
            }
        }
        t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1])
            - t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0])
            + t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0])
    };
    Some(vec![col(0) / det, col(1) / det, col(2) / det])
}

fn segments_properly_intersect(p1: &[f64; 2], p2: &[f64; 2], q1: &[f64; 2], q2: &[f64; 2]) -> bool {
    let orient = |a: &[f64; 2], b: &[f64; 2], c: &[f64; 2]| -> f64 {
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    };
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn polygon_self_intersects(v: &[[f64; 2]]) -> bool {
    let m = v.len();
    for i in 0..m {
        let (a1, a2) = (&v[i], &v[(i + 1) % m]);
        for j in i + 1..m {
            // Skip adjacent edges, which share a vertex by construction.
            if j == i || (j + 1) % m == i || (i + 1) % m == j {
                continue;
            }
            let (b1, b2) = (&v[j], &v[(j + 1) % m]);
            if segments_properly_intersect(a1, a2, b1, b2) {
                return true;
            }
        }
    }
    false
}

fn polygon_is_convex(v: &[[f64; 2]]) -> bool {
    let m = v.len();
    let mut sign = 0.0f64;
    for i in 0..m {
        let a = v[i];
        let b = v[(i + 1) % m];
        let c = v[(i + 2) % m];
        let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if cross.abs() < 1e-14 {
            continue;
        }
        if sign == 0.0 {
            sign = cross.signum();
        } else if cross.signum() != sign {
            return false;
        }
    }
    true
}

fn point_in_polygon(v: &[[f64; 2]], p: &[f64]) -> bool {
    // Even-odd ray crossing, ray toward +x.
    let m = v.len();
    let mut inside = false;
    for i in 0..m {
        let a = v[i];
        let b = v[(i + 1) % m];
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let t = (p[1] - a[1]) / (b[1] - a[1]);
            let x = a[0] + t * (b[0] - a[0]);
            if x > p[0] {
                inside = !inside;
            }
        }
    }
    inside
}

fn point_segment_distance(p: &[f64], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cy) = (a[0] + t * dx, a[1] + t * dy);
    ((p[0] - cx) * (p[0] - cx) + (p[1] - cy) * (p[1] - cy)).sqrt()
}

/// Exact distance to the boundary for primitives with closed forms.
/// Returns 0 for points on or outside the boundary.
pub fn distance_exact(domain: &Domain, point: &[f64]) -> Result<f64> {
    if point.len() != domain.dimension {
        return Err(Error::InvalidDomain(format!(
            "point dimension {} does not match domain dimension {}",
            point.len(),
            domain.dimension
        )));
    }
    match &domain.kind {
        DomainKind::Polygon { .. } => Err(Error::UnsupportedKind(
            "Polygon has no closed-form distance; use distance_field_grid".into(),
        )),
        _ => Ok(distance_any(domain, point)),
    }
}

/// Distance for every kind, including Polygon (per-edge minimum).
pub(crate) fn distance_any(domain: &Domain, point: &[f64]) -> f64 {
    let d = match &domain.kind {
        DomainKind::Interval { a, b } => (point[0] - a).min(b - point[0]),
        DomainKind::Ball { center, radius } => radius - dist(center, point),
        DomainKind::Annulus { center, r_inner, r_outer } => {
            let r = dist(center, point);
            (r - r_inner).min(r_outer - r)
        }
        DomainKind::ConvexPolytope { halfspaces } => halfspaces
            .iter()
            .map(|h| h.offset - h.normal.iter().zip(point).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::INFINITY, f64::min),
        DomainKind::PuncturedBall { center, radius } => {
            let r = dist(center, point);
            r.min(radius - r)
        }
        DomainKind::Polygon { vertices } => {
            if !point_in_polygon(vertices, point) {
                return 0.0;
            }
            let m = vertices.len();
            (0..m)
                .map(|i| point_segment_distance(point, &vertices[i], &vertices[(i + 1) % m]))
                .fold(f64::INFINITY, f64::min)
        }
    };
    d.max(0.0)
}

/// Uniform lattice covering a domain with one exterior layer per side.
/// Nodes sit at origin + i·h with origin = lo − h, so boundary coordinates
/// that are lattice multiples are hit exactly.
#[derive(Debug)]
pub struct Grid {
    pub lo: Vec<f64>,
    pub h: f64,
    pub shape: Vec<usize>,
    pub strides: Vec<usize>,
    pub n: usize,
    /// Node strictly inside Ω (δ > 0).
    pub interior: Vec<bool>,
    /// Interior nodes whose full Moore-1 neighborhood is interior; the
    /// compact-support class vanishes outside this set.
    pub admissible: Vec<bool>,
    pub interior_count: usize,
}

impl Grid {
    pub fn build(domain: &Domain, h: f64) -> Result<Arc<Grid>> {
        if !(h > 0.0) {
            return Err(Error::InvalidDomain(format!("grid spacing must be positive, got {h}")));
        }
        let n = domain.dimension;
        let (lo, hi) = domain.bounding_box();
        let mut shape = Vec::with_capacity(n);
        for k in 0..n {
            let steps = ((hi[k] - lo[k]) / h).round() as usize;
            shape.push(steps + 3);
        }
        let len: usize = shape.iter().product();
        let mut strides = vec![0usize; n];
        let mut s = 1usize;
        for k in (0..n).rev() {
            strides[k] = s;
            s *= shape[k];
        }
        let eps = domain.geom_eps();
        let mut interior = vec![false; len];
        let mut count = 0usize;
        let mut point = vec![0.0f64; n];
        for_each_node(&shape, |idx, pos| {
            for k in 0..n {
                point[k] = lo[k] + h * (pos[k] as f64 - 1.0);
            }
            if distance_any(domain, &point) > eps {
                interior[idx] = true;
                count += 1;
            }
        });
        let admissible = moore_admissible(&shape, &strides, &interior);
        Ok(Arc::new(Grid {
            lo,
            h,
            shape,
            strides,
            n,
            interior,
            admissible,
            interior_count: count,
        }))
    }

    pub fn len(&self) -> usize {
        self.interior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_empty()
    }

    pub fn coord(&self, pos_k: usize, axis: usize) -> f64 {
        self.lo[axis] + self.h * (pos_k as f64 - 1.0)
    }

    pub fn node_point(&self, idx: usize) -> Vec<f64> {
        let mut rem = idx;
        (0..self.n)
            .map(|k| {
                let p = rem / self.strides[k];
                rem %= self.strides[k];
                self.coord(p, k)
            })
            .collect()
    }

    /// Structural equality; fields on structurally equal grids interoperate.
    pub fn same_layout(&self, other: &Grid) -> bool {
        self.n == other.n && self.h == other.h && self.lo == other.lo && self.shape == other.shape
    }
}

/// Visit nodes in axis-major (row-major) order; `pos` is the multi-index.
pub fn for_each_node(shape: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let n = shape.len();
    let len: usize = shape.iter().product();
    let mut pos = vec![0usize; n];
    for idx in 0..len {
        f(idx, &pos);
        for k in (0..n).rev() {
            pos[k] += 1;
            if pos[k] < shape[k] {
                break;
            }
            pos[k] = 0;
        }
    }
}

fn moore_admissible(shape: &[usize], strides: &[usize], interior: &[bool]) -> Vec<bool> {
    let n = shape.len();
    // Signed flat offsets of the full 3^n Moore window.
    let mut offsets: Vec<isize> = vec![0];
    for k in 0..n {
        let s = strides[k] as isize;
        let mut next = Vec::with_capacity(offsets.len() * 3);
        for &o in &offsets {
            next.push(o - s);
            next.push(o);
            next.push(o + s);
        }
        offsets = next;
    }
    let mut adm = vec![false; interior.len()];
    for (idx, adm_i) in adm.iter_mut().enumerate() {
        if !interior[idx] {
            continue;
        }
        // Interior nodes are at least one cell from the array edge, so the
        // window never leaves the array.
        *adm_i = offsets.iter().all(|&o| interior[(idx as isize + o) as usize]);
    }
    adm
}

/// L∞ dilation of a node mask by `steps` cells, clipped to the array.
pub fn dilate_linf(grid: &Grid, mask: &[bool], steps: usize) -> Vec<bool> {
    let n = grid.n;
    // Full Moore window as (per-axis deltas, flat offset), origin excluded.
    let mut window: Vec<(Vec<isize>, isize)> = vec![(Vec::new(), 0)];
    for k in 0..n {
        let s = grid.strides[k] as isize;
        let mut next = Vec::with_capacity(window.len() * 3);
        for (deltas, off) in &window {
            for d in [-1isize, 0, 1] {
                let mut nd = deltas.clone();
                nd.push(d);
                next.push((nd, off + d * s));
            }
        }
        window = next;
    }
    window.retain(|(d, _)| d.iter().any(|&x| x != 0));
    let mut cur = mask.to_vec();
    for _ in 0..steps {
        let mut next = cur.clone();
        for_each_node(&grid.shape, |idx, pos| {
            if next[idx] {
                return;
            }
            for (deltas, off) in &window {
                let in_bounds = (0..n).all(|k| {
                    let q = pos[k] as isize + deltas[k];
                    q >= 0 && (q as usize) < grid.shape[k]
                });
                if in_bounds && cur[(idx as isize + off) as usize] {
                    next[idx] = true;
                    return;
                }
            }
        });
        cur = next;
    }
    cur
}

/// δ on a grid together with its upwind gradient and eikonal diagnostics.
#[derive(Debug)]
pub struct DistanceField {
    pub grid: Arc<Grid>,
    pub domain: Domain,
    /// δ per node, exactly 0 on non-interior nodes.
    pub values: Vec<f64>,
    /// One array per axis; steepest one-sided difference at interior nodes.
    pub gradient: Vec<Vec<f64>>,
    /// | |∇δ| − 1 | at interior nodes, 0 elsewhere.
    pub eikonal_residual: Vec<f64>,
    /// Nodes where forward and backward slopes disagree by > 0.5 in some axis.
    pub ridge: Vec<bool>,
}

impl DistanceField {
    /// Ridge mask dilated by the standard 2-cell collar.
    pub fn ridge_collar(&self) -> Vec<bool> {
        dilate_linf(&self.grid, &self.ridge, RIDGE_COLLAR_CELLS)
    }
}

/// Populate δ from exact distances and fill gradient, residual and ridge
/// diagnostics. The gradient picks, per axis, the one-sided difference of
/// larger magnitude; on a distance field this equals the derivative toward
/// decreasing δ away from the ridge and stays consistent at nodes whose
/// downhill neighbor is exterior (where the zero extension would corrupt
/// the slope).
pub fn distance_field_grid(domain: &Domain, grid: Arc<Grid>) -> Result<DistanceField> {
    let n = grid.n;
    let h = grid.h;
    let len = grid.len();
    if grid.interior_count == 0 {
        return Err(Error::GridTooCoarse("no interior nodes at this spacing".into()));
    }
    let eps = domain.geom_eps();
    let mut values = vec![0.0f64; len];
    let mut point = vec![0.0f64; n];
    for_each_node(&grid.shape, |idx, pos| {
        if grid.interior[idx] {
            for k in 0..n {
                point[k] = grid.coord(pos[k], k);
            }
            let d = distance_any(domain, &point);
            debug_assert!(d > eps);
            values[idx] = d;
        }
    });
    // Isolated interior nodes make every difference quotient degenerate.
    for idx in 0..len {
        if grid.interior[idx] {
            let has_neighbor = (0..n).any(|k| {
                let s = grid.strides[k];
                grid.interior[idx - s] || grid.interior[idx + s]
            });
            if !has_neighbor {
                return Err(Error::GridTooCoarse(format!(
                    "interior node {idx} has no interior neighbor at h = {h}"
                )));
            }
        }
    }
    let mut gradient = vec![vec![0.0f64; len]; n];
    let mut eikonal_residual = vec![0.0f64; len];
    let mut ridge = vec![false; len];
    for idx in 0..len {
        if !grid.interior[idx] {
            continue;
        }
        let mut g2 = 0.0f64;
        for k in 0..n {
            let s = grid.strides[k];
            let fwd = (values[idx + s] - values[idx]) / h;
            let bwd = (values[idx] - values[idx - s]) / h;
            if (fwd - bwd).abs() > RIDGE_THRESHOLD {
                ridge[idx] = true;
            }
            let g = if bwd.abs() >= fwd.abs() { bwd } else { fwd };
            gradient[k][idx] = g;
            g2 += g * g;
        }
        eikonal_residual[idx] = (g2.sqrt() - 1.0).abs();
    }
    Ok(DistanceField { grid, domain: domain.clone(), values, gradient, eikonal_residual, ridge })
}

/// Outcome of the exterior-sphere identity check min_y |x−y| = R + δ(x),
/// with y ranging over points at distance ≥ R from the closed domain.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ExteriorSphereReport {
    pub samples: usize,
    pub directions: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Verify min_y |x−y| = R + δ(x) on sampled interior nodes, minimizing over
/// a dense sample of admissible exterior points y.
pub fn exterior_sphere_identity_check(
    field: &DistanceField,
    samples: usize,
) -> Result<ExteriorSphereReport> {
    let radius = field.domain.exterior_sphere_radius.ok_or(Error::MissingRadius)?;
    let grid = &field.grid;
    let n = grid.n;
    // Candidate y sets: sphere(s) of exterior centers nearest to the domain.
    // For a ball the admissible y with dist(y, closure) >= R nearest to any
    // interior x lie on the sphere |y - c| = r_outer + R; an annulus adds the
    // concentric sphere |y - c| = r_inner - R inside the hole.
    let (center, spheres) = match &field.domain.kind {
        DomainKind::Ball { center, radius: r0 } => (center.clone(), vec![r0 + radius]),
        DomainKind::Annulus { center, r_inner, r_outer } => {
            let mut s = vec![r_outer + radius];
            // R = r_inner degenerates the hole's admissible set to {center}.
            if r_inner - radius >= 0.0 {
                s.push(r_inner - radius);
            }
            (center.clone(), s)
        }
        _ => {
            return Err(Error::UnsupportedKind(
                "exterior-sphere identity requires Ball or Annulus".into(),
            ))
        }
    };
    let directions = unit_directions(n, 4096);
    let mut ys: Vec<Vec<f64>> = Vec::with_capacity(directions.len() * spheres.len());
    for rho in &spheres {
        if *rho == 0.0 {
            ys.push(center.clone());
            continue;
        }
        for u in &directions {
            ys.push(center.iter().zip(u).map(|(c, ui)| c + rho * ui).collect());
        }
    }
    // Deterministic interior sample: evenly strided over the interior list.
    let interior_nodes: Vec<usize> =
        (0..grid.len()).filter(|&i| grid.interior[i]).collect();
    let m = samples.max(1).min(interior_nodes.len());
    let stride = interior_nodes.len() / m;
    let mut max_dev = 0.0f64;
    for j in 0..m {
        let idx = interior_nodes[j * stride.max(1)];
        let x = grid.node_point(idx);
        let best = ys
            .iter()
            .map(|y| dist(&x, y))
            .fold(f64::INFINITY, f64::min);
        let dev = (best - (radius + field.values[idx])).abs();
        max_dev = max_dev.max(dev);
    }
    // Angular sampling misses the true minimizer by at most rho*(dtheta^2/2).
    let rho_max = spheres.iter().fold(0.0f64, |a, &b| a.max(b));
    let dtheta = angular_gap(n, directions.len());
    let tolerance = (4.0 * grid.h).max(rho_max * dtheta * dtheta);
    Ok(ExteriorSphereReport {
        samples: m,
        directions: directions.len(),
        max_deviation: max_dev,
        tolerance,
        pass: max_dev <= tolerance,
    })
}

fn unit_directions(n: usize, m: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![-1.0], vec![1.0]],
        2 => (0..m)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * (i as f64) / (m as f64);
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            // Fibonacci sphere.
            let phi = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
            (0..m)
                .map(|i| {
                    let y = 1.0 - 2.0 * (i as f64 + 0.5) / (m as f64);
                    let r = (1.0 - y * y).max(0.0).sqrt();
                    let t = phi * i as f64;
                    vec![r * t.cos(), y, r * t.sin()]
                })
                .collect()
        }
        _ => Vec::new(),
    }
}

fn angular_gap(n: usize, m: usize) -> f64 {
    match n {
        1 => 0.0,
        2 => 2.0 * std::f64::consts::PI / m as f64,
        // Fibonacci points have near-uniform density ~ 4pi/m steradians.
        _ => 2.0 * (4.0 * std::f64::consts::PI / m as f64).sqrt(),
    }
}

/// Outcome of the pairwise Lipschitz audit and the off-ridge eikonal audit.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AuditReport {
    pub pairs_tested: usize,
    pub max_lipschitz_violation: f64,
    pub lipschitz_tolerance: f64,
    pub interior_count: usize,
    pub collar_count: usize,
    pub high_residual_count: usize,
    pub off_collar_max_residual: f64,
    pub residual_bound: f64,
    pub pass: bool,
}

/// Audit |δ(x) − δ(y)| ≤ |x−y| over random node pairs and |∇δ| = 1 ± 4h at
/// interior nodes off the ridge collar.
pub fn lipschitz_and_eikonal_audit(field: &DistanceField, pairs: usize, seed: u64) -> AuditReport {
    let grid = &field.grid;
    let interior_nodes: Vec<usize> = (0..grid.len()).filter(|&i| grid.interior[i]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_viol = 0.0f64;
    for _ in 0..pairs {
        let a = interior_nodes[rng.gen_range(0..interior_nodes.len())];
        let b = interior_nodes[rng.gen_range(0..interior_nodes.len())];
        let pa = grid.node_point(a);
        let pb = grid.node_point(b);
        let viol = (field.values[a] - field.values[b]).abs() - dist(&pa, &pb);
        max_viol = max_viol.max(viol);
    }
    let collar = field.ridge_collar();
    let bound = 4.0 * grid.h;
    let mut high = 0usize;
    let mut off_max = 0.0f64;
    let mut collar_count = 0usize;
    for &idx in &interior_nodes {
        if collar[idx] {
            collar_count += 1;
            continue;
        }
        let r = field.eikonal_residual[idx];
        off_max = off_max.max(r);
        if r > bound {
            high += 1;
        }
    }
    let lip_tol = GEOM_EPS_FACTOR * field.domain.diameter;
    AuditReport {
        pairs_tested: pairs,
        max_lipschitz_violation: max_viol,
        lipschitz_tolerance: lip_tol,
        interior_count: interior_nodes.len(),
        collar_count,
        high_residual_count: high,
        off_collar_max_residual: off_max,
        residual_bound: bound,
        pass: max_viol <= lip_tol && high == 0,
    }
}

/// CSV dump: coordinates, delta, gradient components, eikonal residual.
pub fn distance_field_csv(field: &DistanceField) -> String {
    let grid = &field.grid;
    let n = grid.n;
    let mut out = String::new();
    let coords = ["x", "y", "z"];
    let mut header: Vec<String> = coords[..n].iter().map(|s| s.to_string()).collect();
    header.push("delta".into());
    for c in &coords[..n] {
        header.push(format!("grad_{c}"));
    }
    header.push("residual".into());
    out.push_str(&header.join(","));
    out.push('\n');
    for_each_node(&grid.shape, |idx, pos| {
        if !grid.interior[idx] {
            return;
        }
        let mut row: Vec<String> = (0..n).map(|k| format!("{:.16e}", grid.coord(pos[k], k))).collect();
        row.push(format!("{:.16e}", field.values[idx]));
        for g in &field.gradient {
            row.push(format!("{:.16e}", g[idx]));
        }
        row.push(format!("{:.16e}", field.eikonal_residual[idx]));
        out.push_str(&row.join(","));
        out.push('\n');
    });
    out
}
