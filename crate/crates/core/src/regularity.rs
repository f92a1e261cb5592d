//! Numerical estimators for set-regularity quantities (CQ numbers, linear
//! regularity moduli, (eps, delta)-regularity) and exact evaluation of the
//! constants entering the linear convergence rate.
//!
//! Estimators are seeded Monte Carlo lower bounds: the library never claims a
//! certified constant, only a sampled bound, and reports the bound direction
//! explicitly. Proximal normals are generated constructively as `x - P_C(x)`,
//! so every catalog set is supported uniformly.

use crate::geometry::{axpy, dist, dot, norm, scale, sub, AffineSubspace};
use crate::operators::GdrOperator;
use crate::sets::ProjectableSet;
use crate::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Which regularity quantity an estimate bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum EstimateKind {
    CqNumber,
    LinRegModulus,
    EpsDeltaRegularity,
}

/// A sampled bound on a regularity quantity.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RegularityEstimate {
    pub kind: EstimateKind,
    pub value: f64,
    /// Ball radius used for sampling.
    pub delta: f64,
    /// Number of random draws that produced usable samples.
    pub samples: usize,
    pub seed: u64,
    /// Sup-type quantities sampled from below.
    pub is_lower_bound: bool,
    /// False when no valid sample was produced (degenerate geometry).
    pub usable: bool,
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform sample in the `dim`-ball of radius `radius` around the origin:
/// normalized Gaussian direction scaled by `radius * U^(1/dim)`.
fn sample_ball(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    if dim == 0 {
        return Vec::new();
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            let u: f64 = rng.gen::<f64>();
            let r = radius * u.powf(1.0 / dim as f64);
            return scale(&v, r / n);
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; one value per call keeps the stream layout simple.
    loop {
        let u1: f64 = rng.gen::<f64>();
        let u2: f64 = rng.gen::<f64>();
        if u1 > f64::MIN_POSITIVE {
            return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
    }
}

/// Uniform sample in `B(center, radius) n L` for an affine subspace `L`
/// containing `center`.
fn sample_ball_in_subspace(
    rng: &mut ChaCha8Rng,
    l: &AffineSubspace,
    center: &[f64],
    radius: f64,
) -> Vec<f64> {
    let coeffs = sample_ball(rng, l.dim(), radius);
    let mut x = center.to_vec();
    for (c, b) in coeffs.iter().zip(l.basis()) {
        x = axpy(&x, *c, b);
    }
    x
}

/// Monte Carlo lower bound on the CQ number `theta_{A,B,L}(w, delta)`:
/// the supremum of `<u, v>` over unit proximal normals `u` of `A` and
/// negated unit proximal normals `v` of `B`, sampled at points of the sets
/// within `B(w, delta)`.
pub fn estimate_cq_number(
    set_a: &ProjectableSet,
    set_b: &ProjectableSet,
    l: &AffineSubspace,
    w: &[f64],
    delta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<RegularityEstimate> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter("estimate_cq_number: delta <= 0".into()));
    }
    crate::check_dim(set_a.dim(), set_b.dim())?;
    crate::check_dim(set_a.dim(), w.len())?;
    crate::check_dim(set_a.dim(), l.dim_ambient())?;
    if !set_a.contains(w, 1e-9)? || !set_b.contains(w, 1e-9)? {
        return Err(Error::InvalidParameter(
            "estimate_cq_number: w must lie in both sets within 1e-9".into(),
        ));
    }
    let mut rng = rng_for(seed);
    let mut normals_a: Vec<Vec<f64>> = Vec::new();
    let mut normals_b: Vec<Vec<f64>> = Vec::new();
    for _ in 0..n_samples {
        let x = sample_ball_in_subspace(&mut rng, l, w, delta);
        let a = set_a.project(&x)?;
        let u = sub(&x, &a);
        let nu = norm(&u);
        if nu > 1e-13 && dist(&a, w) <= delta {
            normals_a.push(scale(&u, 1.0 / nu));
        }
        let y = sample_ball_in_subspace(&mut rng, l, w, delta);
        let b = set_b.project(&y)?;
        let v = sub(&y, &b);
        let nv = norm(&v);
        if nv > 1e-13 && dist(&b, w) <= delta {
            normals_b.push(scale(&v, -1.0 / nv));
        }
    }
    if normals_a.is_empty() || normals_b.is_empty() {
        return Ok(RegularityEstimate {
            kind: EstimateKind::CqNumber,
            value: f64::NEG_INFINITY,
            delta,
            samples: 0,
            seed,
            is_lower_bound: true,
            usable: false,
        });
    }
    let mut value = f64::NEG_INFINITY;
    for u in &normals_a {
        for v in &normals_b {
            let d = dot(u, v);
            if d > value {
                value = d;
            }
        }
    }
    Ok(RegularityEstimate {
        kind: EstimateKind::CqNumber,
        value,
        delta,
        samples: normals_a.len().min(normals_b.len()),
        seed,
        is_lower_bound: true,
        usable: true,
    })
}

/// Monte Carlo lower bound on the linear regularity modulus of `sets` with
/// respect to the analytic `intersection` on `B(center, radius)`:
/// the supremum of `d_C(x) / max_i d_{C_i}(x)` over sampled `x`.
pub fn estimate_linreg_modulus(
    sets: &[ProjectableSet],
    intersection: &ProjectableSet,
    center: &[f64],
    radius: f64,
    n_samples: usize,
    seed: u64,
) -> Result<RegularityEstimate> {
    if sets.is_empty() {
        return Err(Error::EmptyInput("estimate_linreg_modulus sets"));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter("estimate_linreg_modulus: radius <= 0".into()));
    }
    let dim = intersection.dim();
    crate::check_dim(dim, center.len())?;
    for s in sets {
        crate::check_dim(dim, s.dim())?;
    }
    let mut rng = rng_for(seed);
    let mut value = f64::NEG_INFINITY;
    let mut used = 0usize;
    for _ in 0..n_samples {
        let offset = sample_ball(&mut rng, dim, radius);
        let x = crate::geometry::add(center, &offset);
        let mut worst = 0.0f64;
        for s in sets {
            worst = worst.max(s.distance(&x)?);
        }
        if worst < 1e-12 {
            continue; // x effectively feasible; the ratio is undefined
        }
        let ratio = intersection.distance(&x)? / worst;
        if ratio > value {
            value = ratio;
        }
        used += 1;
    }
    if used == 0 {
        return Err(Error::DegenerateSampling(
            "estimate_linreg_modulus: every sample was feasible".into(),
        ));
    }
    Ok(RegularityEstimate {
        kind: EstimateKind::LinRegModulus,
        value,
        delta: radius,
        samples: used,
        seed,
        is_lower_bound: true,
        usable: true,
    })
}

/// Witnessed violation of (eps, delta)-regularity: the base point of the
/// proximal normal, the second member point, and the normal itself.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EpsDeltaWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EpsDeltaReport {
    pub holds_on_samples: bool,
    /// Minimum of `<u, x - y> / (|u| |x - y|)` over sampled combinations.
    pub worst_ratio: f64,
    pub witness: Option<EpsDeltaWitness>,
    pub samples: usize,
    pub seed: u64,
}

/// Samples the (eps, delta)-regularity inequality
/// `<u, x - y> >= -eps |u| |x - y|` for members `x, y` of `C` near `w` and
/// proximal normals `u` at `x`.
pub fn check_eps_delta_regular(
    set: &ProjectableSet,
    w: &[f64],
    eps: f64,
    delta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<EpsDeltaReport> {
    if !(delta > 0.0) || eps < 0.0 {
        return Err(Error::InvalidParameter(
            "check_eps_delta_regular: need delta > 0 and eps >= 0".into(),
        ));
    }
    crate::check_dim(set.dim(), w.len())?;
    if !set.contains(w, 1e-9)? {
        return Err(Error::InvalidParameter(
            "check_eps_delta_regular: w must lie in the set within 1e-9".into(),
        ));
    }
    let dim = set.dim();
    let mut rng = rng_for(seed);
    let mut members: Vec<Vec<f64>> = Vec::new();
    let mut normals: Vec<(Vec<f64>, Vec<f64>)> = Vec::new(); // (base, normal)
    for _ in 0..n_samples {
        let z = crate::geometry::add(w, &sample_ball(&mut rng, dim, delta));
        let p = set.project(&z)?;
        if dist(&p, w) > delta {
            continue;
        }
        let u = sub(&z, &p);
        if norm(&u) > 1e-13 {
            normals.push((p.clone(), u));
        }
        members.push(p);
    }
    if members.len() < 2 {
        return Err(Error::DegenerateSampling(
            "check_eps_delta_regular: not enough member samples".into(),
        ));
    }
    if normals.is_empty() {
        // no proximal normal seen near w (e.g. w interior): vacuously regular
        return Ok(EpsDeltaReport {
            holds_on_samples: true,
            worst_ratio: 1.0,
            witness: None,
            samples: members.len(),
            seed,
        });
    }
    let mut worst = f64::INFINITY;
    let mut witness = None;
    for (x, u) in &normals {
        let nu = norm(u);
        for y in &members {
            let diff = sub(x, y);
            let nd = norm(&diff);
            if nd < 1e-13 {
                continue;
            }
            let ratio = dot(u, &diff) / (nu * nd);
            if ratio < worst {
                worst = ratio;
                if ratio < -eps - 1e-9 {
                    witness = Some(EpsDeltaWitness {
                        x: x.clone(),
                        y: y.clone(),
                        u: u.clone(),
                    });
                }
            }
        }
    }
    if !worst.is_finite() {
        return Err(Error::DegenerateSampling(
            "check_eps_delta_regular: all member pairs coincided".into(),
        ));
    }
    Ok(EpsDeltaReport {
        holds_on_samples: witness.is_none(),
        worst_ratio: worst,
        witness,
        samples: members.len(),
        seed,
    })
}

/// The coercivity building block
/// `xi = 4 mu^2 (1-theta^2) / (|1-mu| + sqrt((1-mu)^2 + 4 mu (1-theta^2)))^2`.
pub fn xi_bound(theta: f64, mu: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!("theta = {theta} outside [0, 1[")));
    }
    if !(mu > 0.0 && mu <= 2.0) {
        return Err(Error::InvalidParameter(format!("mu = {mu} outside ]0, 2]")));
    }
    let one_minus_theta2 = 1.0 - theta * theta;
    let root = ((1.0 - mu) * (1.0 - mu) + 4.0 * mu * one_minus_theta2).sqrt();
    let denom = (1.0 - mu).abs() + root;
    Ok(4.0 * mu * mu * one_minus_theta2 / (denom * denom))
}

/// Per-operator constants feeding the rate formula.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PairConstants {
    /// Fejer inflation factor, 1 for convex data (`eps = 0`).
    pub gamma: f64,
    /// Quasi-coercivity constant against the pair intersection.
    pub nu: f64,
    /// `nu` adjusted for the non-reflective case: `min(nu, alpha (lambda + mu - lambda mu))`.
    pub nu_prime: f64,
    /// Fejer step-penalty constant `(1 - alpha + beta_hat) / alpha`.
    pub beta: f64,
}

/// Evaluates the per-pair constants: the Fejer factor
/// `gamma = 1 - alpha + alpha (1 + lambda e1/(1-e1)) (1 + mu e2/(1-e2))`,
/// the step penalty `beta`, and the coercivity constants `nu, nu'` built
/// from the CQ number `theta` and the regularity modulus `kappa`.
/// `hull_is_ambient` says whether `aff(A u B)` is the whole space, which
/// (like the doubly-reflective case) removes the `nu'` cap.
pub fn pair_constants(
    op: &GdrOperator,
    eps1: f64,
    eps2: f64,
    theta: f64,
    kappa: f64,
    hull_is_ambient: bool,
) -> Result<PairConstants> {
    if !(0.0..=1.0 / 3.0).contains(&eps1) {
        return Err(Error::InvalidParameter(format!("eps1 = {eps1} outside [0, 1/3]")));
    }
    if !(0.0..1.0).contains(&eps2) {
        return Err(Error::InvalidParameter(format!("eps2 = {eps2} outside [0, 1[")));
    }
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!("theta = {theta} outside [0, 1[")));
    }
    if !(kappa > 0.0) {
        return Err(Error::InvalidParameter(format!("kappa = {kappa} must be > 0")));
    }
    let (lambda, mu, alpha) = (op.lambda(), op.mu(), op.alpha());
    let beta_hat = op.beta_hat();
    if alpha >= 1.0 + beta_hat {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} >= 1 + beta_hat = {}: beta would be nonpositive",
            1.0 + beta_hat
        )));
    }
    let gamma = 1.0 - alpha
        + alpha * (1.0 + lambda * eps1 / (1.0 - eps1)) * (1.0 + mu * eps2 / (1.0 - eps2));
    let beta = (1.0 - alpha + beta_hat) / alpha;
    let one_minus_theta2 = 1.0 - theta * theta;
    let root = ((1.0 - mu) * (1.0 - mu) + 4.0 * mu * one_minus_theta2).sqrt();
    let nu = alpha * one_minus_theta2.sqrt() / kappa
        * lambda.min(2.0 * mu / ((1.0 - mu).abs() + root));
    let nu_prime = if (lambda == 2.0 && mu == 2.0) || hull_is_ambient {
        nu
    } else {
        nu.min(alpha * (lambda + mu - lambda * mu))
    };
    Ok(PairConstants {
        gamma,
        nu,
        nu_prime,
        beta,
    })
}

/// Quantities derived from composing the per-operator constants over one cycle.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct RateBound {
    /// `Gamma = sqrt(gamma_1 ... gamma_l)`.
    pub gamma_product_sqrt: f64,
    /// Per-cycle contraction factor `[Gamma^2 - (nu/kappa)^2 (sum 1/beta_j)^-1]_+^(1/2)`.
    pub rho_cycle: f64,
    /// Per-sub-step rate `rho_cycle^(1/l)`.
    pub rho_per_step: f64,
    /// Start-ball shrink factor: `delta_0 = delta * delta0_factor`.
    pub delta0_factor: f64,
    /// `rho_cycle < 1`.
    pub admissible: bool,
}

/// Combines per-operator `(gamma_j, beta_j)` with the cycle-level coercivity
/// `nu` and regularity modulus `kappa` into the contraction factor. A value
/// `rho >= 1` is reported as inadmissible, never clamped.
pub fn predicted_rate(constants: &[(f64, f64)], nu: f64, kappa: f64) -> Result<RateBound> {
    if constants.is_empty() {
        return Err(Error::EmptyInput("predicted_rate constants"));
    }
    for &(gamma, beta) in constants {
        if gamma < 1.0 {
            return Err(Error::InvalidParameter(format!("gamma = {gamma} below 1")));
        }
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta = {beta} must be > 0")));
        }
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidParameter(format!("nu = {nu} outside ]0, 1]")));
    }
    if !(kappa > 0.0) {
        return Err(Error::InvalidParameter(format!("kappa = {kappa} must be > 0")));
    }
    let l = constants.len();
    let gamma_product: f64 = constants.iter().map(|(g, _)| g).product();
    let gamma_product_sqrt = gamma_product.sqrt();
    let inv_beta_sum: f64 = constants.iter().map(|(_, b)| 1.0 / b).sum();
    let bracket = gamma_product - (nu / kappa).powi(2) / inv_beta_sum;
    let rho_cycle = bracket.max(0.0).sqrt();
    let rho_per_step = rho_cycle.powf(1.0 / l as f64);
    let gamma_last = constants[l - 1].0;
    let delta0_factor = gamma_last.sqrt() / (2.0 * gamma_product_sqrt);
    Ok(RateBound {
        gamma_product_sqrt,
        rho_cycle,
        rho_per_step,
        delta0_factor,
        admissible: rho_cycle < 1.0,
    })
}

/// Averagedness data of a gDR operator.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct AveragedConstants {
    pub beta_hat: f64,
    /// `alpha / (1 + beta_hat)`.
    pub averaged_coeff: f64,
}

pub fn averaged_constants(op: &GdrOperator) -> Result<AveragedConstants> {
    let beta_hat = op.beta_hat();
    if op.alpha() >= 1.0 + beta_hat {
        return Err(Error::InvalidParameter(format!(
            "alpha = {} >= 1 + beta_hat = {}: operator is not averaged",
            op.alpha(),
            1.0 + beta_hat
        )));
    }
    Ok(AveragedConstants {
        beta_hat,
        averaged_coeff: op.alpha() / (1.0 + beta_hat),
    })
}

/// Exact linear regularity modulus of two intersecting hyperplanes with unit
/// normals: `sqrt(2 / (1 - |<n_a, n_b>|))`.
pub fn hyperplane_pair_modulus(normal_a: &[f64], normal_b: &[f64]) -> Result<f64> {
    let c = crate::geometry::inner(normal_a, normal_b)?.abs();
    if c >= 1.0 - 1e-14 {
        return Err(Error::InvalidParameter(
            "hyperplane_pair_modulus: normals are parallel".into(),
        ));
    }
    Ok((2.0 / (1.0 - c)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::Halfspace;

    fn full_plane() -> AffineSubspace {
        AffineSubspace::full_space(2)
    }

    #[test]
    fn xi_bound_values() {
        assert!((xi_bound(0.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((xi_bound(0.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(xi_bound(1.0, 1.0).is_err());
        assert!(xi_bound(0.5, 0.0).is_err());
        // xi decreases to 0 as theta -> 1 at fixed mu
        let mut last = f64::INFINITY;
        for k in 0..40 {
            let theta = 1.0 - 2f64.powi(-k); // 0, 1/2, 3/4, ... -> 1
            let xi = xi_bound(theta, 1.3).unwrap();
            assert!(xi <= last + 1e-15);
            last = xi;
        }
        assert!(last < 1e-8);
    }

    #[test]
    fn xi_solves_its_quadratic() {
        // (1-t^2) xi^2 - (1 + m^2 - 2 m t^2) xi + m^2 (1-t^2) = 0
        for i in 0..20 {
            for j in 1..=20 {
                let theta = i as f64 * 0.9 / 19.0;
                let mu = j as f64 * 0.1;
                let xi = xi_bound(theta, mu).unwrap();
                let t2 = theta * theta;
                let resid =
                    (1.0 - t2) * xi * xi - (1.0 + mu * mu - 2.0 * mu * t2) * xi + mu * mu * (1.0 - t2);
                assert!(resid.abs() < 1e-9, "theta={theta} mu={mu}: {resid}");
            }
        }
    }

    fn op(lambda: f64, mu: f64, alpha: f64) -> GdrOperator {
        let a = ProjectableSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        let b = ProjectableSet::hyperplane(vec![1.0, 0.0], 0.0).unwrap();
        GdrOperator::new(a, b, lambda, mu, alpha).unwrap()
    }

    #[test]
    fn pair_constants_classical_dr() {
        let c = pair_constants(&op(2.0, 2.0, 0.5), 0.0, 0.0, 0.0, 1.0, true).unwrap();
        assert!((c.gamma - 1.0).abs() < 1e-15);
        assert!((c.beta - 1.0).abs() < 1e-15);
        assert!((c.nu - 0.5).abs() < 1e-15);
        assert!((c.nu_prime - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pair_constants_alternating_projections() {
        let c = pair_constants(&op(1.0, 1.0, 1.0), 0.0, 0.0, 0.0, 1.0, false).unwrap();
        assert!((c.beta - 0.5).abs() < 1e-15);
        assert!((c.nu - 1.0).abs() < 1e-15);
        assert!((c.nu_prime - 1.0).abs() < 1e-15);
        assert!((c.gamma - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_tends_to_one_as_alpha_vanishes() {
        let c = pair_constants(&op(1.5, 1.5, 1e-9), 0.2, 0.3, 0.1, 1.0, false).unwrap();
        assert!((c.gamma - 1.0).abs() < 1e-8);
    }

    #[test]
    fn pair_constants_rejects_nonaveraged() {
        // alpha >= 1 + beta_hat makes beta nonpositive
        assert!(pair_constants(&op(1.0, 1.0, 1.5), 0.0, 0.0, 0.0, 1.0, false).is_err());
        assert!(pair_constants(&op(2.0, 2.0, 0.5), 0.4, 0.0, 0.0, 1.0, false).is_err());
    }

    #[test]
    fn predicted_rate_examples() {
        let r = predicted_rate(&[(1.0, 1.0)], 1.0, 1.0).unwrap();
        assert_eq!(r.rho_cycle, 0.0);
        assert!(r.admissible);

        let r = predicted_rate(&[(1.0, 1.0), (1.0, 1.0)], 1.0, 1.0).unwrap();
        assert!((r.rho_cycle - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((r.rho_per_step - 0.5f64.sqrt().sqrt()).abs() < 1e-15);

        // bracket above 1: reported, not clamped
        let r = predicted_rate(&[(1.5, 1.0), (1.5, 1.0)], 0.1, 10.0).unwrap();
        assert!(r.rho_cycle > 1.0);
        assert!(!r.admissible);
        assert!((r.rho_cycle - (2.25f64 - 0.0001 * 0.5).sqrt()).abs() < 1e-12);

        // delta0 factor = sqrt(gamma_l) / (2 Gamma)
        let r = predicted_rate(&[(1.0, 1.0), (1.44, 2.0)], 0.5, 2.0).unwrap();
        assert!((r.delta0_factor - 1.2 / (2.0 * 1.2)).abs() < 1e-12);
        assert!((r.gamma_product_sqrt - 1.2).abs() < 1e-12);
    }

    #[test]
    fn averaged_constants_examples() {
        let c = averaged_constants(&op(2.0, 2.0, 0.5)).unwrap();
        assert_eq!(c.beta_hat, 0.0);
        assert_eq!(c.averaged_coeff, 0.5);
        let c = averaged_constants(&op(1.0, 1.0, 1.0)).unwrap();
        assert!((c.beta_hat - 0.5).abs() < 1e-15);
        assert!((c.averaged_coeff - 2.0 / 3.0).abs() < 1e-15);
        // matches xi = 2(lambda + mu - lambda mu)/(4 - lambda mu)
        let xi = 2.0 * (1.0 + 1.0 - 1.0) / (4.0 - 1.0);
        assert!((c.averaged_coeff - xi).abs() < 1e-15);
        let c = averaged_constants(&op(1.3, 0.7, 1e-12)).unwrap();
        assert!(c.averaged_coeff < 1e-11);
        assert!(averaged_constants(&op(2.0, 2.0, 1.0)).is_err());
    }

    #[test]
    fn hyperplane_modulus() {
        let k = hyperplane_pair_modulus(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((k - 2f64.sqrt()).abs() < 1e-15);
        assert!(hyperplane_pair_modulus(&[1.0, 0.0], &[-1.0, 0.0]).is_err());
    }

    #[test]
    fn cq_same_line_tends_to_one() {
        let a = ProjectableSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        let est = estimate_cq_number(&a, &a, &full_plane(), &[0.0, 0.0], 1.0, 500, 7).unwrap();
        assert!(est.usable);
        assert!(est.value > 1.0 - 1e-9, "value {}", est.value);
    }

    #[test]
    fn cq_perpendicular_lines_near_zero() {
        let a = ProjectableSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        let b = ProjectableSet::hyperplane(vec![1.0, 0.0], 0.0).unwrap();
        let est = estimate_cq_number(&a, &b, &full_plane(), &[0.0, 0.0], 1.0, 2000, 11).unwrap();
        assert!(est.value.abs() <= 0.02, "value {}", est.value);
    }

    #[test]
    fn cq_rejects_point_outside_intersection() {
        let a = ProjectableSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        let b = ProjectableSet::hyperplane(vec![1.0, 0.0], 0.0).unwrap();
        assert!(estimate_cq_number(&a, &b, &full_plane(), &[1.0, 1.0], 1.0, 10, 0).is_err());
    }

    #[test]
    fn cq_monotone_in_delta_up_to_noise() {
        // theta(delta') <= theta(delta) for delta' <= delta; sampled
        // estimates may wobble by noise only.
        let a = ProjectableSet::halfspace(vec![1.0, 1.0], 0.0).unwrap();
        let b = ProjectableSet::halfspace(vec![1.0, -1.0], 0.0).unwrap();
        let small =
            estimate_cq_number(&a, &b, &full_plane(), &[0.0, 0.0], 0.25, 10_000, 3).unwrap();
        let large =
            estimate_cq_number(&a, &b, &full_plane(), &[0.0, 0.0], 1.0, 10_000, 3).unwrap();
        assert!(small.value <= large.value + 0.03);
    }

    #[test]
    fn linreg_single_set_is_one() {
        let a = ProjectableSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        let est = estimate_linreg_modulus(
            std::slice::from_ref(&a),
            &a,
            &[0.0, 0.0],
            1.0,
            500,
            5,
        )
        .unwrap();
        assert!((est.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn linreg_two_hyperplanes_matches_formula() {
        // normals at 60 degrees: c = 0.5, exact modulus sqrt(2/(1-c)) = 2
        let c = 0.5f64;
        let n_b = vec![c, (1.0 - c * c).sqrt()];
        let a = ProjectableSet::hyperplane(vec![1.0, 0.0], 0.0).unwrap();
        let b = ProjectableSet::hyperplane(n_b.clone(), 0.0).unwrap();
        let hint = ProjectableSet::finite_points(vec![vec![0.0, 0.0]]).unwrap();
        let est = estimate_linreg_modulus(
            &[a, b],
            &hint,
            &[0.0, 0.0],
            1.0,
            10_000,
            13,
        )
        .unwrap();
        let exact = hyperplane_pair_modulus(&[1.0, 0.0], &n_b).unwrap();
        assert!(est.value <= exact + 1e-9);
        assert!(est.value >= 0.95 * exact, "est {} vs exact {exact}", est.value);
    }

    #[test]
    fn linreg_errors_when_all_samples_feasible() {
        // sets cover the sampling ball: every sample is feasible
        let a = ProjectableSet::halfspace(vec![1.0, 0.0], 10.0).unwrap();
        let hint = a.clone();
        assert!(matches!(
            estimate_linreg_modulus(std::slice::from_ref(&a), &hint, &[0.0, 0.0], 1.0, 50, 1),
            Err(Error::DegenerateSampling(_))
        ));
    }

    #[test]
    fn linreg_lower_bound_grows_with_samples() {
        let eps = 0.1f64;
        let c1 = ProjectableSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        let c2 = ProjectableSet::hyperplane(vec![-eps, 1.0], 0.0).unwrap();
        let hint = ProjectableSet::finite_points(vec![vec![0.0, 0.0]]).unwrap();
        let small = estimate_linreg_modulus(
            &[c1.clone(), c2.clone()],
            &hint,
            &[0.0, 0.0],
            1.0,
            500,
            21,
        )
        .unwrap();
        let large =
            estimate_linreg_modulus(&[c1, c2], &hint, &[0.0, 0.0], 1.0, 5_000, 21).unwrap();
        // fixed seed: the 5000-draw stream extends the 500-draw stream
        assert!(large.value >= small.value - 1e-12);
    }

    #[test]
    fn eps_delta_convex_sets_hold_at_zero() {
        for set in [
            ProjectableSet::halfspace(vec![1.0, 1.0], 0.5).unwrap(),
            ProjectableSet::ball(vec![0.1, 0.0], 1.0).unwrap(),
            ProjectableSet::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap(),
        ] {
            // boundary reference point, so normals actually get sampled
            let w = set.project(&[3.0, 0.2]).unwrap();
            let rep = check_eps_delta_regular(&set, &w, 0.0, 0.8, 800, 17).unwrap();
            assert!(rep.holds_on_samples, "violated for {set:?}: {}", rep.worst_ratio);
            assert!(rep.worst_ratio >= -1e-9);
        }
        // interior reference point: no normals nearby, vacuously regular
        let ball = ProjectableSet::ball(vec![0.0, 0.0], 2.0).unwrap();
        let rep = check_eps_delta_regular(&ball, &[0.0, 0.0], 0.0, 0.5, 200, 17).unwrap();
        assert!(rep.holds_on_samples);
    }

    #[test]
    fn eps_delta_sphere_curvature() {
        // circle of radius 1 about the origin, window of radius 0.4 around
        // (1, 0): chord-normal ratio stays above -0.5
        let sphere = ProjectableSet::sphere(vec![0.0, 0.0], 1.0).unwrap();
        let rep =
            check_eps_delta_regular(&sphere, &[1.0, 0.0], 0.5, 0.4, 2000, 19).unwrap();
        assert!(rep.holds_on_samples, "worst {}", rep.worst_ratio);
    }

    #[test]
    fn eps_delta_two_points_violated() {
        let c = ProjectableSet::finite_points(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let rep = check_eps_delta_regular(&c, &[0.0, 0.0], 0.1, 2.0, 2000, 23).unwrap();
        assert!(!rep.holds_on_samples);
        assert!(rep.worst_ratio < -0.9);
        assert!(rep.witness.is_some());
    }

    #[test]
    fn quadrant_pair_cq_and_modulus() {
        // {R+^2, R-^2}: linearly regular (modulus sqrt(2)) but the CQ number
        // at the origin is 1.
        let quad_pos = ProjectableSet::polyhedron(
            vec![
                Halfspace::new(vec![-1.0, 0.0], 0.0).unwrap(),
                Halfspace::new(vec![0.0, -1.0], 0.0).unwrap(),
            ],
            2,
        )
        .unwrap();
        let quad_neg = ProjectableSet::polyhedron(
            vec![
                Halfspace::new(vec![1.0, 0.0], 0.0).unwrap(),
                Halfspace::new(vec![0.0, 1.0], 0.0).unwrap(),
            ],
            2,
        )
        .unwrap();
        let cq = estimate_cq_number(
            &quad_pos,
            &quad_neg,
            &full_plane(),
            &[0.0, 0.0],
            1.0,
            4000,
            29,
        )
        .unwrap();
        assert!(cq.value >= 0.98, "cq {}", cq.value);
        let hint = ProjectableSet::finite_points(vec![vec![0.0, 0.0]]).unwrap();
        let kappa = estimate_linreg_modulus(
            &[quad_pos, quad_neg],
            &hint,
            &[0.0, 0.0],
            1.0,
            4000,
            31,
        )
        .unwrap();
        assert!(kappa.value <= 2f64.sqrt() + 1e-9);
        assert!(kappa.value >= 1.3, "kappa {}", kappa.value);
    }
}
