//! The generalized Douglas-Rachford operator
//! `T_{lambda,mu}^alpha = (1 - alpha) Id + alpha P_B^mu P_A^lambda`,
//! its named specializations, and fixed-point / gap analysis for convex pairs.

use crate::geometry::{dist, sub};
use crate::sets::{relaxed_project, ProjectableSet};
use crate::{check_dim, Error, Result};

/// One pair `(A, B)` with parameters `(lambda, mu, alpha)` and the derived
/// constants every rate formula consumes.
#[derive(Debug, Clone)]
pub struct GdrOperator {
    set_a: ProjectableSet,
    set_b: ProjectableSet,
    lambda: f64,
    mu: f64,
    alpha: f64,
    beta_hat: f64,
    eta: f64,
}

impl GdrOperator {
    pub fn new(set_a: ProjectableSet, set_b: ProjectableSet, lambda: f64, mu: f64, alpha: f64) -> Result<Self> {
        check_dim(set_a.dim(), set_b.dim())?;
        for (name, v) in [("lambda", lambda), ("mu", mu)] {
            if !(v > 0.0 && v <= 2.0) {
                return Err(Error::InvalidParameter(format!("{name} = {v} outside ]0, 2]")));
            }
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must be > 0")));
        }
        let beta_hat = beta_hat(lambda, mu);
        let eta = 1.0 - alpha + alpha * (1.0 - lambda) * (1.0 - mu);
        Ok(Self { set_a, set_b, lambda, mu, alpha, beta_hat, eta })
    }

    pub fn set_a(&self) -> &ProjectableSet {
        &self.set_a
    }

    pub fn set_b(&self) -> &ProjectableSet {
        &self.set_b
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Harmonic-mean constant `(lambda/(2-lambda) + mu/(2-mu))^-1`, zero when
    /// either relaxation is a full reflection.
    pub fn beta_hat(&self) -> f64 {
        self.beta_hat
    }

    /// Shadow-scaling factor `1 - alpha + alpha (1-lambda)(1-mu)`.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Whether `alpha < 1 + beta_hat`, the averagedness condition.
    pub fn is_averaged(&self) -> bool {
        self.alpha < 1.0 + self.beta_hat
    }

    pub fn dim(&self) -> usize {
        self.set_a.dim()
    }

    /// One gDR step: `(1 - alpha) x + alpha P_B^mu(P_A^lambda(x))`.
    pub fn step(&self, x: &[f64]) -> Result<Vec<f64>> {
        let r = relaxed_project(&self.set_a, self.lambda, x)?;
        let s = relaxed_project(&self.set_b, self.mu, &r)?;
        Ok(x.iter()
            .zip(&s)
            .map(|(xi, si)| (1.0 - self.alpha) * xi + self.alpha * si)
            .collect())
    }

    /// The shadow `P_A x` of an iterate.
    pub fn shadow(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.set_a.project(x)
    }
}

/// `(lambda/(2-lambda) + mu/(2-mu))^-1` with the convention that the value is
/// zero as soon as one relaxation equals 2.
pub fn beta_hat(lambda: f64, mu: f64) -> f64 {
    if lambda >= 2.0 || mu >= 2.0 {
        0.0
    } else {
        1.0 / (lambda / (2.0 - lambda) + mu / (2.0 - mu))
    }
}

/// Named parameter triples from the literature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    /// `T_{1,1}^1 = P_B P_A`.
    AlternatingProjections,
    /// `T_{2,2}^{1/2} = (Id + R_B R_A)/2`.
    ClassicalDr,
    /// Relaxed averaged alternating reflections `T_{2,2a}^{1/2}`.
    Raar(f64),
    /// `T_{1+a,1+a}^{1/(1+a)}`, an affine combination of alternating
    /// projections and classical DR; requires `B` affine.
    AffineCombo(f64),
}

/// Builds a gDR operator from a named specialization.
pub fn named_operator(kind: OperatorKind, set_a: ProjectableSet, set_b: ProjectableSet) -> Result<GdrOperator> {
    let (lambda, mu, alpha) = match kind {
        OperatorKind::AlternatingProjections => (1.0, 1.0, 1.0),
        OperatorKind::ClassicalDr => (2.0, 2.0, 0.5),
        OperatorKind::Raar(a) => {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::InvalidParameter(format!("RAAR parameter {a} outside ]0, 1]")));
            }
            (2.0, 2.0 * a, 0.5)
        }
        OperatorKind::AffineCombo(a) => {
            if !(a > 0.0) {
                return Err(Error::InvalidParameter(format!("AffineCombo parameter {a} must be > 0")));
            }
            if !matches!(set_b, ProjectableSet::Affine(_) | ProjectableSet::Hyperplane { .. }) {
                return Err(Error::InvalidParameter(
                    "AffineCombo requires an affine second set".into(),
                ));
            }
            (1.0 + a, 1.0 + a, 1.0 / (1.0 + a))
        }
    };
    GdrOperator::new(set_a, set_b, lambda, mu, alpha)
}

/// Residual of the algebraic identity
/// `T_{2,2a}^{1/2} x = (1-a) P_A x + (a/2)(x + R_B R_A x)`;
/// expected below 1e-10 for convex pairs.
pub fn raar_identity_check(set_a: &ProjectableSet, set_b: &ProjectableSet, alpha: f64, x: &[f64]) -> Result<f64> {
    let t = GdrOperator::new(set_a.clone(), set_b.clone(), 2.0, 2.0 * alpha, 0.5)?;
    let lhs = t.step(x)?;
    let pa = set_a.project(x)?;
    let ra = relaxed_project(set_a, 2.0, x)?;
    let rbra = relaxed_project(set_b, 2.0, &ra)?;
    let rhs: Vec<f64> = (0..x.len())
        .map(|i| (1.0 - alpha) * pa[i] + 0.5 * alpha * (x[i] + rbra[i]))
        .collect();
    Ok(dist(&lhs, &rhs))
}

/// Result of the infimal-displacement computation for a convex pair.
#[derive(Debug, Clone)]
pub struct GapAnalysis {
    /// Gap vector `g = b - a` from a mutually nearest pair.
    pub gap: Vec<f64>,
    /// Nearest point on `A` of the final iterate.
    pub nearest_a: Vec<f64>,
    /// `P_B` of `nearest_a`.
    pub nearest_b: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub tol: f64,
}

impl GapAnalysis {
    /// Membership test for `E = A n (B - g)`.
    pub fn e_contains(&self, set_a: &ProjectableSet, set_b: &ProjectableSet, x: &[f64], tol: f64) -> Result<bool> {
        Ok(set_a.contains(x, tol)?
            && set_b.contains(&crate::geometry::add(x, &self.gap), tol)?)
    }

    /// Membership test for `F = (A + g) n B`.
    pub fn f_contains(&self, set_a: &ProjectableSet, set_b: &ProjectableSet, x: &[f64], tol: f64) -> Result<bool> {
        Ok(set_b.contains(x, tol)?
            && set_a.contains(&sub(x, &self.gap), tol)?)
    }
}

/// Computes the gap vector between two convex sets by alternating
/// projections `a_{k+1} = P_A(P_B(a_k))` from `a_0 = P_A(0)`. A mutually
/// nearest pair `(a, b)` characterizes the gap as `g = b - a`; when the two
/// sets intersect the gap is zero. A run that exhausts `max_iter` returns a
/// non-converged result carrying the last iterate (the infimal displacement
/// may be unattained).
pub fn compute_gap(set_a: &ProjectableSet, set_b: &ProjectableSet, tol: f64, max_iter: usize) -> Result<GapAnalysis> {
    check_dim(set_a.dim(), set_b.dim())?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("compute_gap: tol must be > 0".into()));
    }
    let dim = set_a.dim();
    let mut a = set_a.project(&vec![0.0; dim])?;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        let b = set_b.project(&a)?;
        let next = set_a.project(&b)?;
        iterations += 1;
        let step = dist(&next, &a);
        a = next;
        if step < tol {
            converged = true;
            break;
        }
    }
    let b = set_b.project(&a)?;
    Ok(GapAnalysis {
        gap: sub(&b, &a),
        nearest_a: a,
        nearest_b: b,
        converged,
        iterations,
        tol,
    })
}

/// Structural fixed-point classification for convex pairs with
/// `min(lambda, mu) < 2`: the shadow must land in `E` and the offset
/// `x - P_A x` must equal `mu / (lambda + mu - lambda mu) * g`.
#[derive(Debug, Clone)]
pub struct StructuralClassification {
    pub gap: Vec<f64>,
    pub shadow_in_e: bool,
    pub offset_matches: bool,
}

impl StructuralClassification {
    pub fn passed(&self) -> bool {
        self.shadow_in_e && self.offset_matches
    }
}

#[derive(Debug, Clone)]
pub struct FixedPointReport {
    pub residual: f64,
    pub is_fixed: bool,
    pub classification: Option<StructuralClassification>,
}

/// Checks whether `x` is a fixed point of `T` and, for convex pairs with
/// `min(lambda, mu) < 2`, verifies the structural description of the fixed
/// point set (`Fix T = E + mu/(lambda+mu-lambda mu) g`).
pub fn fixed_point_check(op: &GdrOperator, x: &[f64], tol: f64) -> Result<FixedPointReport> {
    let next = op.step(x)?;
    let residual = dist(x, &next);
    let is_fixed = residual <= tol;
    let classification = if op.set_a().is_convex()
        && op.set_b().is_convex()
        && op.lambda().min(op.mu()) < 2.0
    {
        let gap = compute_gap(op.set_a(), op.set_b(), (tol * 1e-2).max(1e-14), 200_000)?;
        let shadow = op.shadow(x)?;
        let shadow_shift = crate::geometry::add(&shadow, &gap.gap);
        let shadow_in_e = op.set_b().distance(&shadow_shift)? <= tol;
        let coef = op.mu() / (op.lambda() + op.mu() - op.lambda() * op.mu());
        let expected_offset = crate::geometry::scale(&gap.gap, coef);
        let offset = sub(x, &shadow);
        let offset_matches = dist(&offset, &expected_offset) <= tol;
        Some(StructuralClassification {
            gap: gap.gap,
            shadow_in_e,
            offset_matches,
        })
    } else {
        None
    };
    Ok(FixedPointReport {
        residual,
        is_fixed,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{axpy, norm, AffineSubspace};

    fn x_axis() -> ProjectableSet {
        ProjectableSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap()
    }

    fn y_axis() -> ProjectableSet {
        ProjectableSet::hyperplane(vec![1.0, 0.0], 0.0).unwrap()
    }

    #[test]
    fn classical_dr_step_on_axes() {
        // R_A (1,1) = (1,-1); R_B (1,-1) = (-1,-1); T x = ((1,1)+(-1,-1))/2 = 0.
        let t = named_operator(OperatorKind::ClassicalDr, x_axis(), y_axis()).unwrap();
        let y = t.step(&[1.0, 1.0]).unwrap();
        assert!(norm(&y) < 1e-14);
    }

    #[test]
    fn intersection_points_are_fixed() {
        let t = GdrOperator::new(x_axis(), y_axis(), 1.7, 0.3, 0.9).unwrap();
        let c = [0.0, 0.0];
        assert!(dist(&t.step(&c).unwrap(), &c) < 1e-14);
    }

    #[test]
    fn alternating_projections_specialization() {
        let t = named_operator(OperatorKind::AlternatingProjections, x_axis(), y_axis()).unwrap();
        let x = [0.37, -1.41];
        let composed = y_axis().project(&x_axis().project(&x).unwrap()).unwrap();
        assert_eq!(t.step(&x).unwrap(), composed);
    }

    #[test]
    fn named_parameter_triples() {
        let dr = named_operator(OperatorKind::ClassicalDr, x_axis(), y_axis()).unwrap();
        assert_eq!((dr.lambda(), dr.mu(), dr.alpha()), (2.0, 2.0, 0.5));
        let ap = named_operator(OperatorKind::AlternatingProjections, x_axis(), y_axis()).unwrap();
        assert_eq!((ap.lambda(), ap.mu(), ap.alpha()), (1.0, 1.0, 1.0));
        let raar = named_operator(OperatorKind::Raar(0.6), x_axis(), y_axis()).unwrap();
        assert_eq!((raar.lambda(), raar.mu(), raar.alpha()), (2.0, 1.2, 0.5));
        let combo = named_operator(OperatorKind::AffineCombo(1.0), x_axis(), y_axis()).unwrap();
        assert_eq!((combo.lambda(), combo.mu(), combo.alpha()), (2.0, 2.0, 0.5));
        // AffineCombo demands an affine second set
        let ball = ProjectableSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!(named_operator(OperatorKind::AffineCombo(0.5), x_axis(), ball).is_err());
    }

    #[test]
    fn beta_hat_convention() {
        assert_eq!(beta_hat(2.0, 0.7), 0.0);
        assert_eq!(beta_hat(1.3, 2.0), 0.0);
        assert!((beta_hat(1.0, 1.0) - 0.5).abs() < 1e-15);
        // eta for classical DR is 1 (shadow-preserving)
        let t = named_operator(OperatorKind::ClassicalDr, x_axis(), y_axis()).unwrap();
        assert_eq!(t.eta(), 1.0);
        let ap = named_operator(OperatorKind::AlternatingProjections, x_axis(), y_axis()).unwrap();
        assert_eq!(ap.eta(), 0.0);
    }

    #[test]
    fn raar_identity_holds_for_convex_pairs() {
        let pairs = [
            (x_axis(), y_axis()),
            (
                ProjectableSet::ball(vec![0.4, 0.0], 1.0).unwrap(),
                ProjectableSet::halfspace(vec![1.0, 1.0], 0.3).unwrap(),
            ),
        ];
        for (a, b) in pairs {
            for alpha in [0.5, 1.0] {
                let r = raar_identity_check(&a, &b, alpha, &[0.9, -1.3]).unwrap();
                assert!(r <= 1e-10, "identity residual {r}");
            }
        }
    }

    #[test]
    fn raar_identity_first_order_in_alpha() {
        // As alpha -> 0, T_{2,2a}^{1/2} x - P_A x = O(alpha).
        let a = ProjectableSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        let b = x_axis();
        let x = [0.9, -1.3];
        let alpha = 1e-8;
        let t = GdrOperator::new(a.clone(), b, 2.0, 2.0 * alpha, 0.5).unwrap();
        let tx = t.step(&x).unwrap();
        let pa = a.project(&x).unwrap();
        // T x = (x + R_A x)/2 + O(alpha) = P_A x + O(alpha)
        assert!(dist(&tx, &pa) < 1e-6);
    }

    #[test]
    fn gap_for_parallel_lines() {
        let a = x_axis();
        let b = ProjectableSet::hyperplane(vec![0.0, 1.0], 1.0).unwrap();
        let g = compute_gap(&a, &b, 1e-12, 1000).unwrap();
        assert!(g.converged);
        assert!(dist(&g.gap, &[0.0, 1.0]) < 1e-12);
    }

    #[test]
    fn gap_vanishes_for_intersecting_pair() {
        let g = compute_gap(&x_axis(), &y_axis(), 1e-12, 1000).unwrap();
        assert!(g.converged);
        assert!(norm(&g.gap) <= 1e-12);
    }

    #[test]
    fn gap_ball_vs_halfspace() {
        // A = unit ball, B = {x1 >= 2}: nearest points (1,0) and (2,0).
        let a = ProjectableSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        let b = ProjectableSet::halfspace(vec![-1.0, 0.0], -2.0).unwrap();
        let g = compute_gap(&a, &b, 1e-12, 100_000).unwrap();
        assert!(g.converged);
        assert!(dist(&g.gap, &[1.0, 0.0]) < 1e-8);
        assert!(g.e_contains(&a, &b, &[1.0, 0.0], 1e-8).unwrap());
        assert!(g.f_contains(&a, &b, &[2.0, 0.0], 1e-8).unwrap());
    }

    #[test]
    fn gap_reruns_agree_from_perturbed_start() {
        let a = ProjectableSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        let b = ProjectableSet::halfspace(vec![-1.0, 0.0], -2.0).unwrap();
        let g1 = compute_gap(&a, &b, 1e-11, 100_000).unwrap();
        // restart the inner iteration from a different set: swap roles,
        // the gap flips sign
        let g2 = compute_gap(&b, &a, 1e-11, 100_000).unwrap();
        let flipped = crate::geometry::scale(&g2.gap, -1.0);
        assert!(dist(&g1.gap, &flipped) <= 1e-9);
    }

    #[test]
    fn fixed_point_classification_for_parallel_lines() {
        let a = x_axis();
        let b = ProjectableSet::hyperplane(vec![0.0, 1.0], 1.0).unwrap();
        // lambda = mu = 1, alpha = 1: Fix T = E + g = B; check x = (0,1).
        let t = GdrOperator::new(a, b, 1.0, 1.0, 1.0).unwrap();
        let rep = fixed_point_check(&t, &[0.0, 1.0], 1e-8).unwrap();
        assert!(rep.is_fixed);
        let cls = rep.classification.unwrap();
        assert!(cls.passed());
        assert!(dist(&cls.gap, &[0.0, 1.0]) < 1e-10);
    }

    #[test]
    fn epi_abs_spurious_fixed_points() {
        // A = epigraph of |.| with apex at the origin, B = x-axis: for
        // lambda = mu = 2 every (0, t), t < 0 is fixed although it is far
        // from A n B = {0}.
        let a = ProjectableSet::epi_abs(0, 1, 2).unwrap();
        let b = x_axis();
        for alpha in [0.25, 0.5, 1.0] {
            let t = GdrOperator::new(a.clone(), b.clone(), 2.0, 2.0, alpha).unwrap();
            let rep = fixed_point_check(&t, &[0.0, -1.0], 1e-12).unwrap();
            assert!(rep.is_fixed, "alpha = {alpha}");
            assert!(rep.residual <= 1e-12);
            assert!(rep.classification.is_none()); // lambda = mu = 2
        }
    }

    #[test]
    fn translation_and_shadow_reduction() {
        // A, B inside L = R^2 x {0}: T(x + u) = T(x) + eta u for u in (L-L)^perp,
        // and d_L(T x) = |eta| d_L(x).
        let a = ProjectableSet::affine(
            AffineSubspace::new(vec![0.0; 3], &[vec![1.0, 0.0, 0.0]]).unwrap(),
        );
        let b = ProjectableSet::affine(
            AffineSubspace::new(vec![0.0; 3], &[vec![1.0, 1.0, 0.0]]).unwrap(),
        );
        let l = AffineSubspace::new(vec![0.0; 3], &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]])
            .unwrap();
        for (lambda, mu, alpha) in [(2.0, 2.0, 0.5), (1.0, 1.0, 1.0), (1.5, 0.7, 0.8)] {
            let t = GdrOperator::new(a.clone(), b.clone(), lambda, mu, alpha).unwrap();
            let x = [0.3, -0.9, 0.0];
            let u = [0.0, 0.0, 2.5];
            let lhs = t.step(&crate::geometry::add(&x, &u)).unwrap();
            let rhs = axpy(&t.step(&x).unwrap(), t.eta(), &u);
            assert!(dist(&lhs, &rhs) <= 1e-9);

            let z = [0.4, 1.1, -0.7];
            let stepped = t.step(&z).unwrap();
            let dl_before = l.distance(&z).unwrap();
            let dl_after = l.distance(&stepped).unwrap();
            assert!((dl_after - t.eta().abs() * dl_before).abs() <= 1e-9);
        }
    }

    #[test]
    fn averaged_operators_are_nonexpansive() {
        let a = ProjectableSet::ball(vec![0.2, 0.0], 1.0).unwrap();
        let b = ProjectableSet::halfspace(vec![0.0, -1.0], 0.1).unwrap();
        for (lambda, mu, alpha) in [(2.0, 2.0, 0.5), (1.0, 1.0, 1.0), (1.5, 0.5, 1.0)] {
            let t = GdrOperator::new(a.clone(), b.clone(), lambda, mu, alpha).unwrap();
            assert!(t.is_averaged());
            for (x, y) in [([1.0, 2.0], [-0.4, 0.3]), ([0.1, -3.0], [2.2, 1.7])] {
                let tx = t.step(&x).unwrap();
                let ty = t.step(&y).unwrap();
                assert!(dist(&tx, &ty) <= dist(&x, &y) + 1e-10);
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(GdrOperator::new(x_axis(), y_axis(), 0.0, 1.0, 0.5).is_err());
        assert!(GdrOperator::new(x_axis(), y_axis(), 1.0, 2.1, 0.5).is_err());
        assert!(GdrOperator::new(x_axis(), y_axis(), 1.0, 1.0, 0.0).is_err());
        // alpha up to and including 1 + beta_hat is accepted (averaged flag off)
        let t = GdrOperator::new(x_axis(), y_axis(), 1.0, 1.0, 1.5).unwrap();
        assert!(!t.is_averaged());
    }
}
