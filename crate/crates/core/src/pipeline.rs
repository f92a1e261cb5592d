//! Orchestration behind the command-line subcommands: run a schedule with
//! audits, predict a rate, certify prediction against observation, estimate
//! regularity constants, and classify the pair graph. The CLI binary and the
//! C ABI both call into this module, so everything returns data instead of
//! printing.

use crate::catalog::ProblemInstance;
use crate::config::{EstimatorSettings, InstanceSpec, RunConfig};
use crate::diagnostics::{
    audit_per_cycle_contraction, audit_quasi_coercive, audit_quasi_fejer_for_op,
    fit_linear_rate, RateFit, TrajectoryReport,
};
use crate::geometry::dist;
use crate::predict::{predict_instance, PredictSettings, RatePrediction};
use crate::regularity::{check_eps_delta_regular, estimate_cq_number, estimate_linreg_modulus};
use crate::report::{
    CatalogEntry, CertifySection, EstimateSection, GraphSection, GraphWitnessSection, NamedAudit,
    PairEstimates, Report, RunSection, ShadowSection,
};
use crate::{Error, Result};

/// Default tolerance for shadow-consensus and membership checks in reports.
const CONSENSUS_TOL: f64 = 1e-8;

impl From<&EstimatorSettings> for PredictSettings {
    fn from(e: &EstimatorSettings) -> Self {
        PredictSettings {
            eps: e.eps,
            delta: e.delta,
            samples: e.samples,
            seed: e.seed,
        }
    }
}

/// Executes a configured run and assembles the report plus the raw
/// trajectory (the caller decides where the CSV goes).
pub fn run_pipeline(cfg: &RunConfig) -> Result<(Report, TrajectoryReport)> {
    cfg.validate()?;
    let inst = cfg.instance.resolve()?;
    let (traj, section) = execute_run(cfg, &inst, None)?;
    let mut report = Report::new("run");
    report.instance = Some(InstanceSpec::from_instance(&inst));
    report.settings = serde_json::json!({
        "cycles": cfg.cycles,
        "stop_tol": cfg.stop_tol,
        "audits": cfg.audits,
    });
    report.run = Some(section);
    Ok((report, traj))
}

fn execute_run(
    cfg: &RunConfig,
    inst: &ProblemInstance,
    contraction_rho: Option<f64>,
) -> Result<(TrajectoryReport, RunSection)> {
    let schedule = inst.schedule()?;
    let (x0, x0_seed) = cfg.start_point(inst)?;
    let traj = schedule.run(&x0, cfg.cycles, cfg.stop_tol)?;

    let fitted_per_step;
    let fitted_per_cycle;
    match &traj.intersection_distances {
        Some(d) => {
            fitted_per_step = fit_linear_rate(d, 0.5, false).ok();
            fitted_per_cycle = traj
                .per_cycle_intersection_distances()
                .and_then(|dc| fit_linear_rate(&dc, 0.5, true).ok());
        }
        None => {
            // no intersection known: fit the distance to the final iterate
            let last = traj.final_iterate().to_vec();
            let d: Vec<f64> = traj.iterates.iter().map(|x| dist(x, &last)).collect();
            fitted_per_step = fit_linear_rate(&d, 0.5, false).ok();
            fitted_per_cycle = None;
        }
    }

    let mut audits = Vec::new();
    for kind in &cfg.audits {
        match kind.as_str() {
            "fejer" => {
                for (j, op) in schedule.operators().iter().enumerate() {
                    if !op.is_averaged() {
                        continue; // no certified constants above the averaged range
                    }
                    let anchor = match &inst.intersection_hint {
                        Some(hint) => hint.project(traj.final_iterate())?,
                        None => op.shadow(traj.final_iterate())?,
                    };
                    let beta = (1.0 - op.alpha() + op.beta_hat()) / op.alpha();
                    let audit = audit_quasi_fejer_for_op(&traj, Some(j), &anchor, 1.0, beta)?;
                    audits.push(NamedAudit {
                        label: format!("fejer operator {}", j + 1),
                        audit,
                    });
                }
            }
            "coercive" => {
                if let Some(hint) = &inst.intersection_hint {
                    audits.push(NamedAudit {
                        label: "coercive vs intersection".into(),
                        audit: audit_quasi_coercive(&traj, hint)?,
                    });
                }
            }
            "contraction" => {
                if traj.intersection_distances.is_some() && !traj.cycle_marks.is_empty() {
                    let rho = contraction_rho.unwrap_or(1.0);
                    audits.push(NamedAudit {
                        label: format!("per-cycle contraction at rho = {rho}"),
                        audit: audit_per_cycle_contraction(&traj, rho)?,
                    });
                }
            }
            _ => return Err(Error::Config(format!("unknown audit {kind:?}"))),
        }
    }

    let consensus = schedule.shadow_consensus(traj.final_iterate(), CONSENSUS_TOL)?;
    let section = RunSection {
        x0,
        x0_seed,
        cycles_completed: traj.cycles_completed,
        stopped_early: traj.stopped_early,
        final_point: traj.final_iterate().to_vec(),
        final_residual: traj.last_residual(),
        fitted_per_step,
        fitted_per_cycle,
        audits,
        shadow_consensus: Some(ShadowSection {
            projections: consensus.projections,
            all_equal: consensus.all_equal,
            in_intersection: consensus.in_intersection,
        }),
        trajectory_csv: None,
    };
    Ok((traj, section))
}

/// Builds the rate prediction report for an instance.
pub fn predict_pipeline(inst: &ProblemInstance, settings: &PredictSettings) -> Result<Report> {
    let prediction = predict_instance(inst, settings)?;
    let mut report = Report::new("predict");
    report.instance = Some(InstanceSpec::from_instance(inst));
    report.settings = serde_json::to_value(settings)
        .map_err(|e| Error::Config(format!("settings serialization: {e}")))?;
    report.prediction = Some(prediction);
    Ok(report)
}

/// Runs prediction and an empirical trajectory, then compares:
/// `PASS` when the per-cycle contraction holds at the predicted factor and
/// the fitted rate does not exceed the per-step prediction plus the margin;
/// `NOT-APPLICABLE` when the prediction's regularity preconditions fail.
pub fn certify_pipeline(cfg: &RunConfig) -> Result<(Report, TrajectoryReport)> {
    cfg.validate()?;
    let inst = cfg.instance.resolve()?;
    let settings = PredictSettings::from(&cfg.estimator);
    let prediction = predict_instance(&inst, &settings)?;
    let rho_for_audit = if prediction.admissible {
        Some(prediction.rho_cycle)
    } else {
        None
    };
    let (traj, section) = execute_run(cfg, &inst, rho_for_audit)?;

    let fitted_rate = section
        .fitted_per_step
        .as_ref()
        .map(|f| f.rate)
        .unwrap_or(f64::NAN);
    let contraction = section
        .audits
        .iter()
        .find(|a| a.label.starts_with("per-cycle contraction"))
        .map(|a| a.audit.clone());
    let coercivity = section
        .audits
        .iter()
        .find(|a| a.label.starts_with("coercive"))
        .map(|a| a.audit.clone());

    let (verdict, explanation) = if !prediction.admissible {
        let mut why = prediction.notes.join("; ");
        if why.is_empty() {
            why = format!(
                "predicted contraction factor {:.6} is not below 1",
                prediction.rho_cycle
            );
        }
        let stalled = traj
            .intersection_distances
            .as_ref()
            .map(|d| *d.last().unwrap() > CONSENSUS_TOL)
            .unwrap_or(false);
        if stalled {
            if let Some(c) = &coercivity {
                if c.nu_hat == Some(0.0) {
                    why.push_str(
                        "; quasi coercivity fails along the run (zero step at positive distance)",
                    );
                }
            }
        }
        (
            "NOT-APPLICABLE".to_string(),
            format!("prediction preconditions unmet: {why}"),
        )
    } else {
        let contraction_ok = contraction.as_ref().map(|a| a.passed).unwrap_or(false);
        let rate_ok = if fitted_rate.is_nan() {
            false
        } else {
            fitted_rate <= prediction.rho_per_step + cfg.margin
        };
        if contraction_ok && rate_ok {
            ("PASS".to_string(), String::new())
        } else {
            let mut why = Vec::new();
            if !contraction_ok {
                why.push(format!(
                    "per-cycle contraction at rho = {:.6} violated",
                    prediction.rho_cycle
                ));
            }
            if !rate_ok {
                why.push(format!(
                    "fitted rate {fitted_rate:.6} exceeds predicted {:.6} + margin {}",
                    prediction.rho_per_step, cfg.margin
                ));
            }
            ("FAIL".to_string(), why.join("; "))
        }
    };

    let mut report = Report::new("certify");
    report.instance = Some(InstanceSpec::from_instance(&inst));
    report.settings = serde_json::json!({
        "cycles": cfg.cycles,
        "stop_tol": cfg.stop_tol,
        "margin": cfg.margin,
        "estimator": cfg.estimator,
    });
    report.certify = Some(CertifySection {
        predicted_rho_cycle: prediction.rho_cycle,
        predicted_rho_per_step: prediction.rho_per_step,
        margin: cfg.margin,
        fitted_rate,
        contraction,
        coercivity,
        verdict,
        explanation,
    });
    report.prediction = Some(prediction);
    report.run = Some(section);
    Ok((report, traj))
}

/// Samples the regularity estimators on an instance: the whole-system
/// modulus, per-pair CQ numbers and moduli, and per-set (eps, delta) checks.
pub fn estimate_pipeline(inst: &ProblemInstance, settings: &EstimatorSettings) -> Result<Report> {
    let schedule = inst.schedule()?;
    let center = inst.region_center();
    let system_modulus = match &inst.intersection_hint {
        Some(hint) => Some(estimate_linreg_modulus(
            inst.sets.as_slice(),
            hint,
            &center,
            settings.delta,
            settings.samples,
            settings.seed,
        )?),
        None => None,
    };
    let mut pairs = Vec::new();
    for (j, op) in schedule.operators().iter().enumerate() {
        let cq = match &inst.reference_point {
            Some(w) => {
                let mut pts = op.set_a().spanning_points();
                pts.extend(op.set_b().spanning_points());
                let hull = crate::geometry::affine_hull_of_points(&pts)?;
                estimate_cq_number(
                    op.set_a(),
                    op.set_b(),
                    &hull,
                    w,
                    settings.delta,
                    settings.samples,
                    settings.seed.wrapping_add(100 + j as u64),
                )
                .ok()
            }
            None => None,
        };
        let modulus = match (&inst.pair_hints[j], &inst.reference_point) {
            (Some(hint), Some(w)) => estimate_linreg_modulus(
                &[op.set_a().clone(), op.set_b().clone()],
                hint,
                w,
                settings.delta,
                settings.samples,
                settings.seed.wrapping_add(200 + j as u64),
            )
            .ok(),
            _ => None,
        };
        let analytic = inst.analytic.as_ref();
        pairs.push(PairEstimates {
            pair: {
                let (s, t) = schedule.pairs()[j];
                (s + 1, t + 1)
            },
            cq_number: cq,
            modulus,
            analytic_theta: analytic.and_then(|a| a.theta_pairs.get(j).copied().flatten()),
            analytic_kappa: analytic.and_then(|a| a.kappa_pairs.get(j).copied().flatten()),
        });
    }
    let eps_delta_per_set = match &inst.reference_point {
        Some(w) => inst
            .sets
            .iter()
            .map(|c| {
                check_eps_delta_regular(
                    c,
                    w,
                    settings.eps,
                    settings.delta,
                    settings.samples.min(2_000),
                    settings.seed.wrapping_add(300),
                )
                .ok()
            })
            .collect(),
        None => Vec::new(),
    };
    let mut report = Report::new("estimate");
    report.instance = Some(InstanceSpec::from_instance(inst));
    report.settings = serde_json::to_value(settings)
        .map_err(|e| Error::Config(format!("settings serialization: {e}")))?;
    report.estimates = Some(EstimateSection {
        system_modulus,
        pairs,
        eps_delta_per_set,
    });
    Ok(report)
}

/// Classifies the pair graph of an instance.
pub fn graph_pipeline(inst: &ProblemInstance) -> Result<Report> {
    let schedule = inst.schedule()?;
    let connected = schedule.is_connected();
    let witness = schedule.fully_connected_witness()?;
    let mut report = Report::new("graph");
    report.instance = Some(InstanceSpec::from_instance(inst));
    report.settings = serde_json::Value::Null;
    report.graph = Some(GraphSection {
        connected,
        fully_connected: witness.is_some(),
        witness: witness.map(|w| GraphWitnessSection {
            tuple: w.tuple.iter().map(|i| i + 1).collect(),
            r: w.r,
        }),
    });
    Ok(report)
}

/// The built-in catalog as a report.
pub fn catalog_report() -> Report {
    let mut report = Report::new("catalog");
    report.settings = serde_json::Value::Null;
    report.catalog = Some(
        crate::catalog::builtin_names()
            .into_iter()
            .map(|(name, description)| CatalogEntry {
                name: name.to_string(),
                description: description.to_string(),
            })
            .collect(),
    );
    report
}

/// Exposes the rate prediction also as a standalone value (used by `certify`
/// summaries and by the C ABI).
pub fn predict_only(inst: &ProblemInstance, settings: &PredictSettings) -> Result<RatePrediction> {
    predict_instance(inst, settings)
}

/// Convenience accessor for the fitted rate of a run section.
pub fn fitted_rate(fit: &Option<RateFit>) -> f64 {
    fit.as_ref().map(|f| f.rate).unwrap_or(f64::NAN)
}
