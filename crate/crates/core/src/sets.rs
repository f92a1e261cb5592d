//! Catalog of projectable sets: exact projectors, distances, membership
//! tests, relaxed projectors, and a brute-force grid oracle for testing.
//!
//! All variants are immutable after construction and their operations are
//! pure, so values can be shared freely across threads.

use crate::geometry::{self, axpy, dist, dot, is_finite, norm, scale, sub, unit, AffineSubspace};
use crate::{check_dim, Error, Result};

/// Default membership tolerance, overridable per call.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Hard cap on polyhedron constraint count; projection enumerates up to
/// `2^m` candidate active sets.
pub const MAX_POLYHEDRON_FACES: usize = 20;

/// A halfspace `{x : <normal, x> <= offset}` with unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if !n.is_finite() || n < 1e-14 {
            return Err(Error::InvalidParameter(
                "halfspace normal must be nonzero".into(),
            ));
        }
        Ok(Self {
            normal: scale(&normal, 1.0 / n),
            offset: offset / n,
        })
    }

    fn violation(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }
}

/// A set with an exact projector, distance, and membership oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum ProjectableSet {
    /// An affine subspace.
    Affine(AffineSubspace),
    /// `{x : <normal, x> = offset}`, unit normal.
    Hyperplane { normal: Vec<f64>, offset: f64 },
    /// `{x : <normal, x> <= offset}`, unit normal.
    Halfspace(Halfspace),
    /// Axis-aligned box `[lower, upper]`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Closed ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// Sphere (boundary only; nonconvex).
    Sphere { center: Vec<f64>, radius: f64 },
    /// Finite point set (nonconvex unless a singleton).
    FinitePoints { points: Vec<Vec<f64>> },
    /// Intersection of finitely many halfspaces, nonempty by construction.
    Polyhedron { halfspaces: Vec<Halfspace>, dim: usize },
    /// Epigraph of the absolute value, `{x : x[t] >= |x[s]|}` in two named
    /// coordinates, identity elsewhere.
    EpiAbs { s_axis: usize, t_axis: usize, dim: usize },
}

use ProjectableSet as Set;

impl ProjectableSet {
    pub fn affine(sub: AffineSubspace) -> Self {
        Set::Affine(sub)
    }

    pub fn hyperplane(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let h = Halfspace::new(normal, offset)?;
        Ok(Set::Hyperplane {
            normal: h.normal,
            offset: h.offset,
        })
    }

    pub fn halfspace(normal: Vec<f64>, offset: f64) -> Result<Self> {
        Ok(Set::Halfspace(Halfspace::new(normal, offset)?))
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidParameter("box: lower > upper".into()));
        }
        Ok(Set::Box { lower, upper })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter("ball radius must be > 0".into()));
        }
        Ok(Set::Ball { center, radius })
    }

    pub fn sphere(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter("sphere radius must be > 0".into()));
        }
        Ok(Set::Sphere { center, radius })
    }

    pub fn finite_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput("finite_points"))?;
        let dim = first.len();
        for p in &points {
            check_dim(dim, p.len())?;
        }
        Ok(Set::FinitePoints { points })
    }

    /// Builds a polyhedron and verifies it is nonempty by projecting the
    /// origin through the face enumeration.
    pub fn polyhedron(halfspaces: Vec<Halfspace>, dim: usize) -> Result<Self> {
        if halfspaces.is_empty() {
            return Err(Error::EmptyInput("polyhedron"));
        }
        if halfspaces.len() > MAX_POLYHEDRON_FACES {
            return Err(Error::UnsupportedSize(format!(
                "polyhedron with {} halfspaces (max {})",
                halfspaces.len(),
                MAX_POLYHEDRON_FACES
            )));
        }
        for h in &halfspaces {
            check_dim(dim, h.normal.len())?;
        }
        project_polyhedron(&halfspaces, &vec![0.0; dim])?; // feasibility check
        Ok(Set::Polyhedron { halfspaces, dim })
    }

    pub fn epi_abs(s_axis: usize, t_axis: usize, dim: usize) -> Result<Self> {
        if s_axis == t_axis || s_axis >= dim || t_axis >= dim {
            return Err(Error::InvalidParameter(
                "epi_abs: axes must be distinct and within dimension".into(),
            ));
        }
        Ok(Set::EpiAbs { s_axis, t_axis, dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            Set::Affine(l) => l.dim_ambient(),
            Set::Hyperplane { normal, .. } => normal.len(),
            Set::Halfspace(h) => h.normal.len(),
            Set::Box { lower, .. } => lower.len(),
            Set::Ball { center, .. } | Set::Sphere { center, .. } => center.len(),
            Set::FinitePoints { points } => points[0].len(),
            Set::Polyhedron { dim, .. } | Set::EpiAbs { dim, .. } => *dim,
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Set::Sphere { .. } => false,
            Set::FinitePoints { points } => points.len() == 1,
            _ => true,
        }
    }

    /// Nearest point of the set. Ties in the nonconvex variants are broken
    /// deterministically: a sphere queried at its center returns
    /// `center + radius * e1`, finite point sets keep the lowest index.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        if !is_finite(x) {
            return Err(Error::InvalidParameter("project: non-finite input".into()));
        }
        Ok(match self {
            Set::Affine(l) => l.project(x)?,
            Set::Hyperplane { normal, offset } => {
                axpy(x, -(dot(normal, x) - offset), normal)
            }
            Set::Halfspace(h) => {
                let v = h.violation(x);
                if v > 0.0 {
                    axpy(x, -v, &h.normal)
                } else {
                    x.to_vec()
                }
            }
            Set::Box { lower, upper } => x
                .iter()
                .zip(lower)
                .zip(upper)
                .map(|((a, l), u)| a.max(*l).min(*u))
                .collect(),
            Set::Ball { center, radius } => {
                let d = dist(x, center);
                if d <= *radius {
                    x.to_vec()
                } else {
                    axpy(center, radius / d, &sub(x, center))
                }
            }
            Set::Sphere { center, radius } => {
                let d = dist(x, center);
                if d < 1e-300 {
                    axpy(center, *radius, &unit(center.len(), 0))
                } else {
                    axpy(center, radius / d, &sub(x, center))
                }
            }
            Set::FinitePoints { points } => {
                let mut best = &points[0];
                let mut best_d = dist(x, best);
                for p in &points[1..] {
                    let d = dist(x, p);
                    if d < best_d {
                        best = p;
                        best_d = d;
                    }
                }
                best.clone()
            }
            Set::Polyhedron { halfspaces, .. } => project_polyhedron(halfspaces, x)?,
            Set::EpiAbs { s_axis, t_axis, .. } => {
                let mut p = x.to_vec();
                let (a, b) = (x[*s_axis], x[*t_axis]);
                if b >= a.abs() {
                    // inside
                } else if b <= -a.abs() {
                    p[*s_axis] = 0.0;
                    p[*t_axis] = 0.0;
                } else if a > 0.0 {
                    let m = 0.5 * (a + b);
                    p[*s_axis] = m;
                    p[*t_axis] = m;
                } else {
                    let m = 0.5 * (a - b);
                    p[*s_axis] = m;
                    p[*t_axis] = -m;
                }
                p
            }
        })
    }

    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        Ok(dist(x, &self.project(x)?))
    }

    /// `true` iff `distance(x) <= tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        if tol < 0.0 {
            return Err(Error::InvalidParameter("contains: tol < 0".into()));
        }
        Ok(self.distance(x)? <= tol)
    }

    /// Points whose affine hull equals the affine hull of the set. Used to
    /// build `L = aff(A u B)` for shadow and Z-set computations.
    pub fn spanning_points(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        match self {
            Set::Affine(l) => {
                let mut pts = vec![l.anchor().to_vec()];
                for b in l.basis() {
                    pts.push(add_vec(l.anchor(), b));
                }
                pts
            }
            Set::Hyperplane { normal, offset } => {
                let p0 = scale(normal, *offset);
                let mut pts = vec![p0.clone()];
                for t in tangent_basis(normal) {
                    pts.push(add_vec(&p0, &t));
                }
                pts
            }
            Set::Halfspace(h) => {
                let p0 = scale(&h.normal, h.offset);
                let mut pts = vec![p0.clone()];
                for t in tangent_basis(&h.normal) {
                    pts.push(add_vec(&p0, &t));
                }
                pts.push(sub(&p0, &h.normal)); // interior point: hull is R^n
                pts
            }
            Set::Box { lower, upper } => {
                let center: Vec<f64> =
                    lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect();
                let mut pts = vec![center.clone()];
                for k in 0..n {
                    let w = 0.5 * (upper[k] - lower[k]);
                    if w > 0.0 {
                        pts.push(axpy(&center, w, &unit(n, k)));
                        pts.push(axpy(&center, -w, &unit(n, k)));
                    }
                }
                pts
            }
            Set::Ball { center, radius } | Set::Sphere { center, radius } => {
                let mut pts = Vec::new();
                for k in 0..n {
                    pts.push(axpy(center, *radius, &unit(n, k)));
                    pts.push(axpy(center, -*radius, &unit(n, k)));
                }
                pts
            }
            Set::FinitePoints { points } => points.clone(),
            Set::Polyhedron { .. } => {
                // Probe points projected into the set span its hull for the
                // catalog shapes (every face direction gets exercised).
                let mut probes = vec![vec![0.0; n]];
                for k in 0..n {
                    probes.push(scale(&unit(n, k), 1.0));
                    probes.push(scale(&unit(n, k), -1.0));
                    probes.push(scale(&unit(n, k), 2.0));
                    probes.push(scale(&unit(n, k), -2.0));
                    for j in (k + 1)..n {
                        probes.push(add_vec(&unit(n, k), &unit(n, j)));
                        probes.push(sub(&unit(n, k), &unit(n, j)));
                    }
                }
                probes
                    .iter()
                    .filter_map(|p| self.project(p).ok())
                    .collect()
            }
            Set::EpiAbs { s_axis, t_axis, .. } => {
                let mut pts = vec![vec![0.0; n]];
                let mut up = vec![0.0; n];
                up[*t_axis] = 1.0;
                pts.push(up.clone());
                let mut right = up.clone();
                right[*s_axis] = 1.0;
                pts.push(right);
                let mut left = up;
                left[*s_axis] = -1.0;
                pts.push(left);
                for k in 0..n {
                    if k != *s_axis && k != *t_axis {
                        pts.push(unit(n, k));
                        pts.push(scale(&unit(n, k), -1.0));
                    }
                }
                pts
            }
        }
    }

    /// Affine hull of the set, built from [`Self::spanning_points`].
    pub fn affine_hull(&self) -> Result<AffineSubspace> {
        geometry::affine_hull_of_points(&self.spanning_points())
    }
}

fn add_vec(x: &[f64], y: &[f64]) -> Vec<f64> {
    geometry::add(x, y)
}

/// Completes `normal` to an orthonormal basis and returns the tangential part.
fn tangent_basis(normal: &[f64]) -> Vec<Vec<f64>> {
    let n = normal.len();
    let mut basis = vec![normal.to_vec()];
    let mut tangents = Vec::new();
    for k in 0..n {
        let mut v = unit(n, k);
        for b in &basis {
            let t = dot(&v, b);
            v = axpy(&v, -t, b);
        }
        let nv = norm(&v);
        if nv > 1e-10 {
            let v = scale(&v, 1.0 / nv);
            basis.push(v.clone());
            tangents.push(v);
        }
    }
    tangents
}

/// Exact projection onto an intersection of halfspaces by active-set
/// enumeration: for each subset of constraints, solve the equality-constrained
/// least-distance problem and keep the feasible candidate of minimal distance.
fn project_polyhedron(halfspaces: &[Halfspace], x: &[f64]) -> Result<Vec<f64>> {
    let feas_tol = 1e-9;
    if halfspaces.iter().all(|h| h.violation(x) <= feas_tol) {
        return Ok(x.to_vec());
    }
    let m = halfspaces.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << m) {
        let rows: Vec<Vec<f64>> = (0..m)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| halfspaces[i].normal.clone())
            .collect();
        let rhs: Vec<f64> = (0..m)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| halfspaces[i].offset)
            .collect();
        let (q, c) = match geometry::orthonormalize_with_offsets(&rows, &rhs, 1e-12) {
            Some(qc) => qc,
            None => continue, // inconsistent active set
        };
        let mut cand = x.to_vec();
        for (qk, ck) in q.iter().zip(&c) {
            let t = dot(&cand, qk) - ck;
            cand = axpy(&cand, -t, qk);
        }
        if halfspaces.iter().any(|h| h.violation(&cand) > feas_tol) {
            continue;
        }
        let d = dist(x, &cand);
        match &best {
            Some((bd, _)) if *bd <= d => {}
            _ => best = Some((d, cand)),
        }
    }
    best.map(|(_, p)| p).ok_or(Error::InfeasiblePolyhedron)
}

/// A relaxed projector `P_C^lambda = (1 - lambda) Id + lambda P_C` with
/// `lambda` in `]0, 2]`; `lambda = 0` (the identity) is admitted only through
/// [`RelaxedProjector::identity`].
#[derive(Debug, Clone)]
pub struct RelaxedProjector {
    set: ProjectableSet,
    lambda: f64,
}

impl RelaxedProjector {
    pub fn new(set: ProjectableSet, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "relaxation parameter {lambda} outside ]0, 2]"
            )));
        }
        Ok(Self { set, lambda })
    }

    /// The identity relaxation (`lambda = 0`).
    pub fn identity(set: ProjectableSet) -> Self {
        Self { set, lambda: 0.0 }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn set(&self) -> &ProjectableSet {
        &self.set
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        relaxed_project(&self.set, self.lambda, x)
    }
}

/// `(1 - lambda) x + lambda P_C(x)`.
pub fn relaxed_project(set: &ProjectableSet, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
    let p = set.project(x)?;
    Ok(x.iter()
        .zip(&p)
        .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
        .collect())
}

/// Brute-force projection oracle: argmin of `|x - c|` over grid points `c`
/// with `contains(C, c, grid_step)`. Test-only companion to
/// [`ProjectableSet::project`]; the grid must cover a neighborhood of the
/// true nearest point.
pub fn brute_force_project(
    set: &ProjectableSet,
    x: &[f64],
    grid_lower: &[f64],
    grid_upper: &[f64],
    grid_step: f64,
) -> Result<Vec<f64>> {
    let n = set.dim();
    check_dim(n, x.len())?;
    check_dim(n, grid_lower.len())?;
    check_dim(n, grid_upper.len())?;
    if !(grid_step > 0.0) {
        return Err(Error::InvalidParameter("grid_step must be > 0".into()));
    }
    let counts: Vec<usize> = grid_lower
        .iter()
        .zip(grid_upper)
        .map(|(l, u)| ((u - l) / grid_step).floor() as usize + 1)
        .collect();
    let total: usize = counts.iter().product();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut point = vec![0.0; n];
    for flat in 0..total {
        let mut rem = flat;
        for k in 0..n {
            let i = rem % counts[k];
            rem /= counts[k];
            point[k] = grid_lower[k] + i as f64 * grid_step;
        }
        if !set.contains(&point, grid_step)? {
            continue;
        }
        let d = dist(x, &point);
        match &best {
            Some((bd, _)) if *bd <= d => {}
            _ => best = Some((d, point.clone())),
        }
    }
    best.map(|(_, p)| p)
        .ok_or_else(|| Error::DegenerateSampling("empty feasible grid".into()))
}
