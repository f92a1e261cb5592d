//! Report assembly and serialization: the JSON report written by every
//! subcommand and the byte-deterministic trajectory CSV.

use crate::config::{InstanceSpec, SCHEMA_VERSION};
use crate::diagnostics::{InequalityAudit, RateFit, TrajectoryReport};
use crate::predict::RatePrediction;
use crate::regularity::{EpsDeltaReport, RegularityEstimate};
use crate::Result;
use serde::Serialize;
use std::io::Write;

/// Formats one number with 17 significant digits, `.` decimal separator.
/// Shared by the CSV writer so outputs are byte-identical across runs.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the trajectory CSV: header
/// `step,cycle,op,residual,dC,d1..dm,x1..xn`, one row per sub-step plus the
/// start row (step 0, op 0, residual 0). The `dC` column stays empty when no
/// intersection hint was available.
pub fn write_trajectory_csv<W: Write>(traj: &TrajectoryReport, mut out: W) -> std::io::Result<()> {
    let m = traj.set_distances.first().map_or(0, |d| d.len());
    let n = traj.dim;
    let mut header = String::from("step,cycle,op,residual,dC");
    for i in 1..=m {
        header.push_str(&format!(",d{i}"));
    }
    for k in 1..=n {
        header.push_str(&format!(",x{k}"));
    }
    out.write_all(header.as_bytes())?;
    out.write_all(b"\n")?;
    let ops_per_cycle = if traj.cycle_marks.is_empty() {
        traj.op_indices.len().max(1)
    } else {
        traj.cycle_marks[0]
    };
    for (k, x) in traj.iterates.iter().enumerate() {
        let cycle = if k == 0 { 0 } else { (k - 1) / ops_per_cycle + 1 };
        let op = if k == 0 { 0 } else { traj.op_indices[k - 1] + 1 };
        let residual = if k == 0 { 0.0 } else { traj.residuals[k - 1] };
        let mut row = format!("{k},{cycle},{op},{}", fmt_f64(residual));
        match &traj.intersection_distances {
            Some(d) => {
                row.push(',');
                row.push_str(&fmt_f64(d[k]));
            }
            None => row.push(','),
        }
        for d in &traj.set_distances[k] {
            row.push(',');
            row.push_str(&fmt_f64(*d));
        }
        for c in x {
            row.push(',');
            row.push_str(&fmt_f64(*c));
        }
        out.write_all(row.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedAudit {
    /// What the audit was applied to (e.g. `operator 1`).
    pub label: String,
    #[serde(flatten)]
    pub audit: InequalityAudit,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShadowSection {
    pub projections: Vec<Vec<f64>>,
    pub all_equal: bool,
    pub in_intersection: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSection {
    pub x0: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0_seed: Option<u64>,
    pub cycles_completed: usize,
    pub stopped_early: bool,
    pub final_point: Vec<f64>,
    pub final_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_per_step: Option<RateFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_per_cycle: Option<RateFit>,
    pub audits: Vec<NamedAudit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shadow_consensus: Option<ShadowSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory_csv: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifySection {
    pub predicted_rho_cycle: f64,
    pub predicted_rho_per_step: f64,
    pub margin: f64,
    pub fitted_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contraction: Option<InequalityAudit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coercivity: Option<InequalityAudit>,
    /// `PASS`, `FAIL`, or `NOT-APPLICABLE`.
    pub verdict: String,
    pub explanation: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphWitnessSection {
    /// 1-based indices.
    pub tuple: Vec<usize>,
    pub r: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphSection {
    pub connected: bool,
    pub fully_connected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<GraphWitnessSection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairEstimates {
    pub pair: (usize, usize),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cq_number: Option<RegularityEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<RegularityEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_kappa: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system_modulus: Option<RegularityEstimate>,
    pub pairs: Vec<PairEstimates>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub eps_delta_per_set: Vec<Option<EpsDeltaReport>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
}

/// Top-level report written to `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceSpec>,
    pub settings: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction: Option<RatePrediction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certify: Option<CertifySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimates: Option<EstimateSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<Vec<CatalogEntry>>,
}

impl Report {
    pub fn new(kind: &str) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            kind: kind.to_string(),
            instance: None,
            settings: serde_json::Value::Null,
            run: None,
            prediction: None,
            certify: None,
            estimates: None,
            graph: None,
            catalog: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| crate::Error::Config(format!("report serialization failed: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic::PairParams;

    #[test]
    fn csv_is_byte_deterministic() {
        let inst = crate::catalog::builtin("two-lines-45deg").unwrap();
        let schedule = inst.schedule().unwrap();
        let t1 = schedule.run(&[1.0, 0.3], 20, 0.0).unwrap();
        let t2 = schedule.run(&[1.0, 0.3], 20, 0.0).unwrap();
        let mut b1 = Vec::new();
        let mut b2 = Vec::new();
        write_trajectory_csv(&t1, &mut b1).unwrap();
        write_trajectory_csv(&t2, &mut b2).unwrap();
        assert_eq!(b1, b2);
        let text = String::from_utf8(b1).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "step,cycle,op,residual,dC,d1,d2,x1,x2");
        // start row: step 0, cycle 0, op 0, residual 0
        assert!(lines.next().unwrap().starts_with("0,0,0,0.0000000000000000e0,"));
        assert_eq!(text.lines().count(), 22);
    }

    #[test]
    fn csv_empty_dc_column_without_hint() {
        let sets = vec![
            crate::sets::ProjectableSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap(),
            crate::sets::ProjectableSet::hyperplane(vec![0.0, 1.0], 1.0).unwrap(),
        ];
        let schedule = crate::cyclic::CyclicSchedule::new(
            sets,
            vec![(0, 1)],
            vec![PairParams {
                lambda: 1.0,
                mu: 1.0,
                alpha: 1.0,
            }],
        )
        .unwrap();
        let t = schedule.run(&[0.0, 3.0], 3, 0.0).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().nth(1).unwrap();
        // the dC field (5th) is empty
        assert_eq!(row.split(',').nth(4).unwrap(), "");
    }

    #[test]
    fn report_serializes() {
        let mut r = Report::new("graph");
        r.graph = Some(GraphSection {
            connected: true,
            fully_connected: false,
            witness: None,
        });
        let json = r.to_json().unwrap();
        assert!(json.contains("\"schema_version\": 1"));
        assert!(json.contains("\"connected\": true"));
    }

    #[test]
    fn fixed_digit_formatting() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
        assert_eq!(fmt_f64(-1.25e-9), "-1.2500000000000000e-9");
    }
}
