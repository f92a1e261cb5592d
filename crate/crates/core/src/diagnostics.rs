//! Trajectory post-processing: empirical rate fitting and audits of the
//! quantitative inequalities that certify convergence behavior.

use crate::geometry::dist;
use crate::sets::ProjectableSet;
use crate::{Error, Result};

/// Distances below this floor are treated as converged-to-zero and excluded
/// from log-linear fits; double-precision plateaus must not pollute slopes.
pub const DISTANCE_FLOOR: f64 = 1e-14;

/// Relative audit tolerance: a slack of `-tol * max(1, scale)` still passes.
pub const AUDIT_TOL: f64 = 1e-9;

/// Everything recorded along one cyclic run, one entry per sub-step.
#[derive(Debug, Clone)]
pub struct TrajectoryReport {
    pub dim: usize,
    /// `iterates[0]` is the start; entry `k >= 1` is the state after sub-step `k`.
    pub iterates: Vec<Vec<f64>>,
    /// Iterate indices at the end of each completed cycle.
    pub cycle_marks: Vec<usize>,
    /// Operator index (into the schedule) that produced iterate `k + 1`.
    pub op_indices: Vec<usize>,
    /// Per-iterate distances to each `C_i`.
    pub set_distances: Vec<Vec<f64>>,
    /// Per-iterate distances to each `Z_j`, when computable.
    pub z_distances: Option<Vec<Vec<f64>>>,
    /// Per-iterate distance to the intersection, when a hint is available.
    pub intersection_distances: Option<Vec<f64>>,
    /// `|x_{k+1} - x_k|`, one per sub-step.
    pub residuals: Vec<f64>,
    /// Shadow sequence `P_{C_1} x_k`, when requested.
    pub shadows: Option<Vec<Vec<f64>>>,
    pub cycles_completed: usize,
    pub stopped_early: bool,
}

impl TrajectoryReport {
    pub fn final_iterate(&self) -> &[f64] {
        self.iterates.last().expect("trajectory never empty")
    }

    pub fn last_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(0.0)
    }

    /// Intersection distances sampled at cycle boundaries (start + each mark).
    pub fn per_cycle_intersection_distances(&self) -> Option<Vec<f64>> {
        let d = self.intersection_distances.as_ref()?;
        let mut out = vec![d[0]];
        out.extend(self.cycle_marks.iter().map(|&k| d[k]));
        Some(out)
    }
}

/// Fitted R-linear rate from a log-distance least-squares slope.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RateFit {
    pub rate: f64,
    pub log_intercept: f64,
    pub r_squared: f64,
    /// Index range (into the original sequence) the fit used.
    pub window: (usize, usize),
    pub per_cycle: bool,
    /// True when every entry sat below [`DISTANCE_FLOOR`] and the rate is
    /// reported as 0 by convention.
    pub floored: bool,
}

/// Least-squares line on `(n, ln d_n)` over the tail window (default last
/// 50% of usable entries); `rate = exp(slope)`.
pub fn fit_linear_rate(d: &[f64], window_fraction: f64, per_cycle: bool) -> Result<RateFit> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::InvalidParameter(
            "window_fraction outside ]0, 1]".into(),
        ));
    }
    let usable: Vec<(usize, f64)> = d
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, v)| *v > DISTANCE_FLOOR)
        .collect();
    if usable.is_empty() {
        return Ok(RateFit {
            rate: 0.0,
            log_intercept: f64::NEG_INFINITY,
            r_squared: 1.0,
            window: (0, 0),
            per_cycle,
            floored: true,
        });
    }
    let take = ((usable.len() as f64 * window_fraction).ceil() as usize).max(5);
    if usable.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "{} usable entries, need at least 5",
            usable.len()
        )));
    }
    let tail = &usable[usable.len().saturating_sub(take)..];
    let xs: Vec<f64> = tail.iter().map(|(i, _)| *i as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = if ss_tot > 1e-30 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else if ss_res <= 1e-20 {
        1.0
    } else {
        0.0
    };
    Ok(RateFit {
        rate: slope.exp(),
        log_intercept: intercept,
        r_squared,
        window: (tail[0].0, tail[tail.len() - 1].0),
        per_cycle,
        floored: false,
    })
}

/// Which inequality an audit checked.
#[derive(Debug, Clone, serde::Serialize)]
pub enum AuditKind {
    /// `|x+ - a|^2 + beta |x - x+|^2 <= gamma |x - a|^2` against anchor `a`.
    QuasiFejer { gamma: f64, beta: f64 },
    /// `|x - x+| >= nu d_C(x)`; reports the sampled `nu_hat`.
    QuasiCoercive,
    /// `d_C(cycle end) <= rho d_C(cycle start)`.
    PerCycleContraction { rho: f64 },
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct InequalityAudit {
    pub kind: AuditKind,
    /// Worst slack normalized by `max(1, scale)`; negative means violated.
    pub worst_slack: f64,
    pub violating_index: Option<usize>,
    pub passed: bool,
    /// Sampled coercivity constant, present for [`AuditKind::QuasiCoercive`].
    pub nu_hat: Option<f64>,
    /// Steps skipped because the target distance sat below the floor.
    pub skipped_steps: usize,
}

/// Audits quasi firm Fejer monotonicity along a trajectory: per step the
/// slack `gamma |x - a|^2 - |x+ - a|^2 - beta |x - x+|^2` must stay above
/// `-AUDIT_TOL * max(1, |x - a|^2)`.
pub fn audit_quasi_fejer(
    traj: &TrajectoryReport,
    anchor: &[f64],
    gamma: f64,
    beta: f64,
) -> Result<InequalityAudit> {
    audit_quasi_fejer_for_op(traj, None, anchor, gamma, beta)
}

/// Same audit restricted to sub-steps produced by one schedule operator
/// (constants differ per operator in heterogeneous schedules).
pub fn audit_quasi_fejer_for_op(
    traj: &TrajectoryReport,
    op_index: Option<usize>,
    anchor: &[f64],
    gamma: f64,
    beta: f64,
) -> Result<InequalityAudit> {
    crate::check_dim(traj.dim, anchor.len())?;
    if !crate::geometry::is_finite(anchor) {
        return Err(Error::InvalidParameter("non-finite anchor".into()));
    }
    let mut worst = f64::INFINITY;
    let mut violating = None;
    for k in 0..traj.iterates.len() - 1 {
        if let Some(j) = op_index {
            if traj.op_indices[k] != j {
                continue;
            }
        }
        let x = &traj.iterates[k];
        let x_next = &traj.iterates[k + 1];
        let a2 = dist(x, anchor).powi(2);
        let b2 = dist(x_next, anchor).powi(2);
        let s2 = dist(x, x_next).powi(2);
        let slack = gamma * a2 - b2 - beta * s2;
        let scaled = slack / a2.max(1.0);
        if scaled < worst {
            worst = scaled;
        }
        if scaled < -AUDIT_TOL && violating.is_none() {
            violating = Some(k);
        }
    }
    if !worst.is_finite() {
        worst = 0.0;
    }
    let passed = worst >= -AUDIT_TOL;
    Ok(InequalityAudit {
        kind: AuditKind::QuasiFejer { gamma, beta },
        worst_slack: worst,
        violating_index: if passed { None } else { violating },
        passed,
        nu_hat: None,
        skipped_steps: 0,
    })
}

/// Audits quasi coercivity: `nu_hat` is the infimum over usable steps of
/// `|x - x+| / d_C(x)`; steps with `d_C(x)` below the floor are skipped.
/// A trajectory pinned at positive distance (zero steps, nonzero distance)
/// reports `nu_hat = 0` and fails.
pub fn audit_quasi_coercive(
    traj: &TrajectoryReport,
    target: &ProjectableSet,
) -> Result<InequalityAudit> {
    crate::check_dim(traj.dim, target.dim())?;
    let mut nu_hat = f64::INFINITY;
    let mut skipped = 0usize;
    let mut worst_index = None;
    for k in 0..traj.iterates.len() - 1 {
        let dc = target.distance(&traj.iterates[k])?;
        if dc < 1e-12 {
            skipped += 1;
            continue;
        }
        let ratio = traj.residuals[k] / dc;
        if ratio < nu_hat {
            nu_hat = ratio;
            worst_index = Some(k);
        }
    }
    if nu_hat.is_infinite() {
        // every step skipped: trivially coercive along this run
        return Ok(InequalityAudit {
            kind: AuditKind::QuasiCoercive,
            worst_slack: 0.0,
            violating_index: None,
            passed: true,
            nu_hat: None,
            skipped_steps: skipped,
        });
    }
    let passed = nu_hat > 0.0;
    Ok(InequalityAudit {
        kind: AuditKind::QuasiCoercive,
        worst_slack: nu_hat,
        violating_index: if passed { None } else { worst_index },
        passed,
        nu_hat: Some(nu_hat),
        skipped_steps: skipped,
    })
}

/// Audits the per-cycle contraction `d_C(end) <= rho d_C(start)` for every
/// completed cycle, with slack relative to `max(1, d_C(start))`.
pub fn audit_per_cycle_contraction(traj: &TrajectoryReport, rho: f64) -> Result<InequalityAudit> {
    let d = traj
        .intersection_distances
        .as_ref()
        .ok_or(Error::InsufficientData(
            "per-cycle contraction audit needs recorded intersection distances".into(),
        ))?;
    if traj.cycle_marks.is_empty() {
        return Err(Error::InsufficientData("no completed cycles".into()));
    }
    let mut worst = f64::INFINITY;
    let mut violating = None;
    let mut start_idx = 0usize;
    for (c, &mark) in traj.cycle_marks.iter().enumerate() {
        let d_start = d[start_idx];
        let d_end = d[mark];
        let slack = rho * d_start - d_end;
        let scaled = slack / d_start.max(1.0);
        if scaled < worst {
            worst = scaled;
        }
        if scaled < -AUDIT_TOL && violating.is_none() {
            violating = Some(c);
        }
        start_idx = mark;
    }
    let passed = worst >= -AUDIT_TOL;
    Ok(InequalityAudit {
        kind: AuditKind::PerCycleContraction { rho },
        worst_slack: worst,
        violating_index: if passed { None } else { violating },
        passed,
        nu_hat: None,
        skipped_steps: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_trajectory(points: Vec<Vec<f64>>, dc: Option<Vec<f64>>) -> TrajectoryReport {
        let residuals = points
            .windows(2)
            .map(|w| dist(&w[0], &w[1]))
            .collect::<Vec<_>>();
        let marks = (1..points.len()).collect::<Vec<_>>(); // one op per cycle
        let set_distances = points.iter().map(|_| vec![]).collect();
        TrajectoryReport {
            dim: points[0].len(),
            cycles_completed: residuals.len(),
            op_indices: vec![0; residuals.len()],
            cycle_marks: marks,
            set_distances,
            z_distances: None,
            intersection_distances: dc,
            residuals,
            shadows: None,
            iterates: points,
            stopped_early: false,
        }
    }

    #[test]
    fn exact_geometric_rate() {
        let d: Vec<f64> = (0..60).map(|n| 0.5f64.powi(n)).collect();
        let fit = fit_linear_rate(&d, 0.5, false).unwrap();
        assert!((fit.rate - 0.5).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_geometric_rate() {
        let d: Vec<f64> = (0..200)
            .map(|n| 3.0 * 0.9f64.powi(n) * (1.0 + 0.01 * if n % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        let fit = fit_linear_rate(&d, 0.5, false).unwrap();
        assert!((fit.rate - 0.9).abs() < 0.005, "rate {}", fit.rate);
    }

    #[test]
    fn constant_sequence_rate_one() {
        let d = vec![1.0; 30];
        let fit = fit_linear_rate(&d, 0.5, false).unwrap();
        assert!((fit.rate - 1.0).abs() < 1e-14);
    }

    #[test]
    fn floored_sequence_reports_zero() {
        let d = vec![1e-16; 30];
        let fit = fit_linear_rate(&d, 0.5, false).unwrap();
        assert_eq!(fit.rate, 0.0);
        assert!(fit.floored);
    }

    #[test]
    fn fit_is_scale_invariant() {
        let d: Vec<f64> = (0..80).map(|n| 0.8f64.powi(n)).collect();
        let scaled: Vec<f64> = d.iter().map(|v| 123.0 * v).collect();
        let f1 = fit_linear_rate(&d, 0.5, false).unwrap();
        let f2 = fit_linear_rate(&scaled, 0.5, false).unwrap();
        assert!((f1.rate - f2.rate).abs() < 1e-13);
        assert!((f2.log_intercept - f1.log_intercept - 123f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn insufficient_data_rejected() {
        assert!(fit_linear_rate(&[1.0, 0.5, 0.25], 0.5, false).is_err());
    }

    #[test]
    fn fejer_audit_passes_for_projector() {
        // Projection onto the x-axis from successive points: gamma=1, beta=1
        // holds because projectors onto convex sets are firmly nonexpansive.
        let c = crate::sets::ProjectableSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        let mut pts = vec![vec![0.7, 1.9]];
        for _ in 0..5 {
            let last = pts.last().unwrap().clone();
            pts.push(c.project(&last).unwrap());
        }
        let traj = toy_trajectory(pts, None);
        let audit = audit_quasi_fejer(&traj, &[3.0, 0.0], 1.0, 1.0).unwrap();
        assert!(audit.passed, "worst slack {}", audit.worst_slack);
    }

    #[test]
    fn fejer_audit_fails_with_inflated_beta() {
        // Classical DR on two lines at 45 degrees; beta = 10 is above the
        // certified constant (1-alpha+beta_hat)/alpha = 1 and must fail.
        let a = crate::sets::ProjectableSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        let b =
            crate::sets::ProjectableSet::hyperplane(vec![-0.5f64.sqrt(), 0.5f64.sqrt()], 0.0)
                .unwrap();
        let t = crate::operators::GdrOperator::new(a, b, 2.0, 2.0, 0.5).unwrap();
        let mut pts = vec![vec![1.0, 0.0]];
        for _ in 0..10 {
            let last = pts.last().unwrap().clone();
            pts.push(t.step(&last).unwrap());
        }
        let traj = toy_trajectory(pts, None);
        let good = audit_quasi_fejer(&traj, &[0.0, 0.0], 1.0, 1.0).unwrap();
        assert!(good.passed);
        let bad = audit_quasi_fejer(&traj, &[0.0, 0.0], 1.0, 10.0).unwrap();
        assert!(!bad.passed);
        assert!(bad.violating_index.is_some());
    }

    #[test]
    fn coercive_audit_reports_zero_on_stalled_run() {
        let pts = vec![vec![0.0, -1.0]; 6];
        let traj = toy_trajectory(pts, None);
        let target = crate::sets::ProjectableSet::finite_points(vec![vec![0.0, 0.0]]).unwrap();
        let audit = audit_quasi_coercive(&traj, &target).unwrap();
        assert!(!audit.passed);
        assert_eq!(audit.nu_hat, Some(0.0));
    }

    #[test]
    fn coercive_audit_trivial_when_converged() {
        let pts = vec![vec![0.0, 0.0]; 4];
        let traj = toy_trajectory(pts, None);
        let target = crate::sets::ProjectableSet::finite_points(vec![vec![0.0, 0.0]]).unwrap();
        let audit = audit_quasi_coercive(&traj, &target).unwrap();
        assert!(audit.passed);
        assert_eq!(audit.skipped_steps, 3);
    }

    #[test]
    fn contraction_audit() {
        let pts: Vec<Vec<f64>> = (0..12).map(|n| vec![0.5f64.powi(n), 0.0]).collect();
        let dc: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        let traj = toy_trajectory(pts, Some(dc));
        assert!(audit_per_cycle_contraction(&traj, 0.5 + 1e-12)
            .unwrap()
            .passed);
        assert!(audit_per_cycle_contraction(&traj, 1.0).unwrap().passed);
        let under = audit_per_cycle_contraction(&traj, 0.25).unwrap();
        assert!(!under.passed);
        assert!(under.violating_index.is_some());
        // missing d_C errors out
        let no_dc = toy_trajectory(vec![vec![1.0, 0.0], vec![0.5, 0.0]], None);
        assert!(audit_per_cycle_contraction(&no_dc, 1.0).is_err());
    }
}
