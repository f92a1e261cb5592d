//! Euclidean vector arithmetic and affine-subspace primitives.
//!
//! Points are plain `Vec<f64>`; the helpers here panic on dimension mismatch
//! (they are internal building blocks), while the checked entry points
//! ([`inner`], [`AffineSubspace::project`], ...) return [`Error`] so callers
//! fed from external input get a diagnosable failure instead of a panic.

use crate::{check_dim, Error, Result};

/// Rank/drop tolerance used by Gram-Schmidt when building orthonormal bases.
pub const GRAM_SCHMIDT_DROP_TOL: f64 = 1e-10;

/// Absolute comparison tolerance, scaled by `max(1, magnitudes)` at use sites.
pub const DEFAULT_TOL: f64 = 1e-12;

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "dot: dimension mismatch");
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), y.len(), "sub: dimension mismatch");
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn add(x: &[f64], y: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), y.len(), "add: dimension mismatch");
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn scale(x: &[f64], s: f64) -> Vec<f64> {
    x.iter().map(|a| a * s).collect()
}

/// `x + s*y`, the workhorse of every projector formula.
pub fn axpy(x: &[f64], s: f64, y: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), y.len(), "axpy: dimension mismatch");
    x.iter().zip(y).map(|(a, b)| a + s * b).collect()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "dist: dimension mismatch");
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

pub fn is_finite(x: &[f64]) -> bool {
    x.iter().all(|a| a.is_finite())
}

/// Unit vector along coordinate axis `k`.
pub fn unit(dim: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[k] = 1.0;
    e
}

/// Checked inner product; errors on dimension mismatch.
pub fn inner(x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(x.len(), y.len())?;
    Ok(dot(x, y))
}

/// An affine subspace `L = anchor + span(basis)` stored via an orthonormal
/// basis, so projection is a closed formula.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    anchor: Vec<f64>,
    basis: Vec<Vec<f64>>,
    dim_ambient: usize,
}

impl AffineSubspace {
    /// Builds a subspace from an anchor and spanning directions. The
    /// directions are orthonormalized; dependent ones are dropped.
    pub fn new(anchor: Vec<f64>, directions: &[Vec<f64>]) -> Result<Self> {
        if !is_finite(&anchor) {
            return Err(Error::InvalidParameter("non-finite anchor".into()));
        }
        let dim = anchor.len();
        for d in directions {
            check_dim(dim, d.len())?;
        }
        let basis = orthonormalize(directions, GRAM_SCHMIDT_DROP_TOL);
        Ok(Self {
            anchor,
            basis,
            dim_ambient: dim,
        })
    }

    /// The whole ambient space as a (trivial) affine subspace.
    pub fn full_space(dim: usize) -> Self {
        Self {
            anchor: vec![0.0; dim],
            basis: (0..dim).map(|k| unit(dim, k)).collect(),
            dim_ambient: dim,
        }
    }

    /// Zero-dimensional subspace: a single point.
    pub fn point(anchor: Vec<f64>) -> Self {
        let dim = anchor.len();
        Self {
            anchor,
            basis: Vec::new(),
            dim_ambient: dim,
        }
    }

    /// Smallest affine subspace containing all `points`.
    pub fn hull_of_points(points: &[Vec<f64>]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput("hull_of_points"))?;
        let dirs: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, first)).collect();
        Self::new(first.clone(), &dirs)
    }

    /// Solution set of the linear system `rows[i] . x = rhs[i]`, i.e. the
    /// converter from equation form. Errors when the system is inconsistent.
    pub fn from_equations(rows: &[Vec<f64>], rhs: &[f64], dim: usize) -> Result<Self> {
        if rows.len() != rhs.len() {
            return Err(Error::InvalidParameter(
                "from_equations: rows/rhs length mismatch".into(),
            ));
        }
        for r in rows {
            check_dim(dim, r.len())?;
        }
        let (q, c) = match orthonormalize_with_offsets(rows, rhs, GRAM_SCHMIDT_DROP_TOL) {
            Some(qc) => qc,
            None => {
                return Err(Error::InvalidParameter(
                    "from_equations: inconsistent system (empty solution set)".into(),
                ))
            }
        };
        // anchor = sum c_k q_k satisfies every (orthonormalized) equation.
        let mut anchor = vec![0.0; dim];
        for (qk, ck) in q.iter().zip(&c) {
            anchor = axpy(&anchor, *ck, qk);
        }
        // The kernel basis completes {q_k} to an orthonormal basis of R^n.
        let mut all = q.clone();
        let mut kernel = Vec::new();
        for k in 0..dim {
            let mut v = unit(dim, k);
            for b in &all {
                let t = dot(&v, b);
                v = axpy(&v, -t, b);
            }
            let n = norm(&v);
            if n > GRAM_SCHMIDT_DROP_TOL {
                let v = scale(&v, 1.0 / n);
                all.push(v.clone());
                kernel.push(v);
            }
        }
        Ok(Self {
            anchor,
            basis: kernel,
            dim_ambient: dim,
        })
    }

    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    /// Dimension of the subspace itself.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn is_full_space(&self) -> bool {
        self.basis.len() == self.dim_ambient
    }

    /// Nearest point of `L`: `anchor + sum <x - anchor, b_k> b_k`.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim_ambient, x.len())?;
        let d = sub(x, &self.anchor);
        let mut p = self.anchor.clone();
        for b in &self.basis {
            let t = dot(&d, b);
            p = axpy(&p, t, b);
        }
        Ok(p)
    }

    /// Component of `x - anchor` orthogonal to the subspace directions, i.e.
    /// the projection of the displacement onto `(L - L)^perp`.
    pub fn complement_project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim_ambient, x.len())?;
        let mut r = sub(x, &self.anchor);
        for b in &self.basis {
            let t = dot(&r, b);
            r = axpy(&r, -t, b);
        }
        Ok(r)
    }

    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        Ok(norm(&self.complement_project(x)?))
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        Ok(self.distance(x)? <= tol)
    }
}

/// Smallest affine subspace containing all points (Gram-Schmidt with drop
/// tolerance [`GRAM_SCHMIDT_DROP_TOL`]).
pub fn affine_hull_of_points(points: &[Vec<f64>]) -> Result<AffineSubspace> {
    AffineSubspace::hull_of_points(points)
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Vectors whose
/// residual falls below `drop_tol * max(1, |v|)` are dropped as dependent.
fn orthonormalize(vectors: &[Vec<f64>], drop_tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let scale_ref = norm(v).max(1.0);
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let t = dot(&r, b);
                r = axpy(&r, -t, b);
            }
        }
        let n = norm(&r);
        if n > drop_tol * scale_ref {
            basis.push(scale(&r, 1.0 / n));
        }
    }
    basis
}

/// Orthonormalizes equation rows together with their right-hand sides, so the
/// solution sets agree. Returns `None` when the system is inconsistent
/// (a dependent row with an incompatible offset).
pub(crate) fn orthonormalize_with_offsets(
    rows: &[Vec<f64>],
    rhs: &[f64],
    drop_tol: f64,
) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut c: Vec<f64> = Vec::new();
    for (row, &b) in rows.iter().zip(rhs) {
        let scale_ref = norm(row).max(1.0);
        let mut r = row.clone();
        let mut beta = b;
        for _ in 0..2 {
            for (qk, ck) in q.iter().zip(&c) {
                let t = dot(&r, qk);
                r = axpy(&r, -t, qk);
                beta -= t * ck;
            }
        }
        let n = norm(&r);
        if n > drop_tol * scale_ref {
            q.push(scale(&r, 1.0 / n));
            c.push(beta / n);
        } else if beta.abs() > 1e-9 * scale_ref.max(b.abs()) {
            return None; // 0 = beta != 0: inconsistent
        }
    }
    Some((q, c))
}
