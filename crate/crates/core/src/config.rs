//! JSON schemas for set construction, inline instances, and run
//! configuration. Pair and axis indices are 1-based in the JSON surface
//! (matching the subscripts used throughout the reports) and converted to
//! 0-based internally.

use crate::catalog::{AnalyticInfo, ProblemInstance};
use crate::cyclic::PairParams;
use crate::geometry::AffineSubspace;
use crate::sets::{Halfspace, ProjectableSet};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Schema version stamped into every report.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HalfspaceSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// JSON form of a projectable set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SetSpec {
    Affine {
        anchor: Vec<f64>,
        basis: Vec<Vec<f64>>,
    },
    Hyperplane {
        normal: Vec<f64>,
        offset: f64,
    },
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Sphere {
        center: Vec<f64>,
        radius: f64,
    },
    Points {
        points: Vec<Vec<f64>>,
    },
    Polyhedron {
        halfspaces: Vec<HalfspaceSpec>,
        dim: usize,
    },
    /// Epigraph of |.| in two 1-based coordinate axes.
    EpiAbs {
        s_axis: usize,
        t_axis: usize,
        dim: usize,
    },
}

impl SetSpec {
    pub fn build(&self) -> Result<ProjectableSet> {
        match self {
            SetSpec::Affine { anchor, basis } => Ok(ProjectableSet::affine(AffineSubspace::new(
                anchor.clone(),
                basis,
            )?)),
            SetSpec::Hyperplane { normal, offset } => {
                ProjectableSet::hyperplane(normal.clone(), *offset)
            }
            SetSpec::Halfspace { normal, offset } => {
                ProjectableSet::halfspace(normal.clone(), *offset)
            }
            SetSpec::Box { lower, upper } => ProjectableSet::boxed(lower.clone(), upper.clone()),
            SetSpec::Ball { center, radius } => ProjectableSet::ball(center.clone(), *radius),
            SetSpec::Sphere { center, radius } => ProjectableSet::sphere(center.clone(), *radius),
            SetSpec::Points { points } => ProjectableSet::finite_points(points.clone()),
            SetSpec::Polyhedron { halfspaces, dim } => ProjectableSet::polyhedron(
                halfspaces
                    .iter()
                    .map(|h| Halfspace::new(h.normal.clone(), h.offset))
                    .collect::<Result<Vec<_>>>()?,
                *dim,
            ),
            SetSpec::EpiAbs { s_axis, t_axis, dim } => {
                if *s_axis == 0 || *t_axis == 0 {
                    return Err(Error::Config("epi_abs axes are 1-based".into()));
                }
                ProjectableSet::epi_abs(s_axis - 1, t_axis - 1, *dim)
            }
        }
    }

    pub fn from_set(set: &ProjectableSet) -> Self {
        match set {
            ProjectableSet::Affine(l) => SetSpec::Affine {
                anchor: l.anchor().to_vec(),
                basis: l.basis().to_vec(),
            },
            ProjectableSet::Hyperplane { normal, offset } => SetSpec::Hyperplane {
                normal: normal.clone(),
                offset: *offset,
            },
            ProjectableSet::Halfspace(h) => SetSpec::Halfspace {
                normal: h.normal.clone(),
                offset: h.offset,
            },
            ProjectableSet::Box { lower, upper } => SetSpec::Box {
                lower: lower.clone(),
                upper: upper.clone(),
            },
            ProjectableSet::Ball { center, radius } => SetSpec::Ball {
                center: center.clone(),
                radius: *radius,
            },
            ProjectableSet::Sphere { center, radius } => SetSpec::Sphere {
                center: center.clone(),
                radius: *radius,
            },
            ProjectableSet::FinitePoints { points } => SetSpec::Points {
                points: points.clone(),
            },
            ProjectableSet::Polyhedron { halfspaces, dim } => SetSpec::Polyhedron {
                halfspaces: halfspaces
                    .iter()
                    .map(|h| HalfspaceSpec {
                        normal: h.normal.clone(),
                        offset: h.offset,
                    })
                    .collect(),
                dim: *dim,
            },
            ProjectableSet::EpiAbs { s_axis, t_axis, dim } => SetSpec::EpiAbs {
                s_axis: s_axis + 1,
                t_axis: t_axis + 1,
                dim: *dim,
            },
        }
    }
}

/// Analytic constants attached to an inline instance.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AnalyticSpec {
    #[serde(default)]
    pub theta_pairs: Vec<Option<f64>>,
    #[serde(default)]
    pub kappa_pairs: Vec<Option<f64>>,
    #[serde(default)]
    pub kappa_system: Option<f64>,
    #[serde(default)]
    pub expected_rate: Option<f64>,
    #[serde(default)]
    pub note: String,
}

/// JSON form of a problem instance. `pairs` entries are 1-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub dimension: usize,
    pub sets: Vec<SetSpec>,
    pub pairs: Vec<(usize, usize)>,
    pub params: Vec<PairParams>,
    #[serde(default)]
    pub intersection: Option<SetSpec>,
    #[serde(default)]
    pub pair_intersections: Vec<Option<SetSpec>>,
    #[serde(default)]
    pub reference_point: Option<Vec<f64>>,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub region_radius: Option<f64>,
    #[serde(default)]
    pub analytic: Option<AnalyticSpec>,
}

impl InstanceSpec {
    pub fn build(&self) -> Result<ProblemInstance> {
        let sets = self
            .sets
            .iter()
            .map(|s| s.build())
            .collect::<Result<Vec<_>>>()?;
        let pairs = self
            .pairs
            .iter()
            .map(|&(s, t)| {
                if s == 0 || t == 0 {
                    Err(Error::Config("pair indices are 1-based".into()))
                } else {
                    Ok((s - 1, t - 1))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let pair_hints = if self.pair_intersections.is_empty() {
            vec![None; pairs.len()]
        } else {
            if self.pair_intersections.len() != pairs.len() {
                return Err(Error::Config(
                    "pair_intersections length must match pairs".into(),
                ));
            }
            self.pair_intersections
                .iter()
                .map(|o| o.as_ref().map(|s| s.build()).transpose())
                .collect::<Result<Vec<_>>>()?
        };
        let default_x0 = self.x0.clone().unwrap_or_else(|| vec![1.0; self.dimension]);
        let inst = ProblemInstance {
            name: self.name.clone(),
            description: self.description.clone(),
            dim: self.dimension,
            sets,
            pairs,
            params: self.params.clone(),
            intersection_hint: self.intersection.as_ref().map(|s| s.build()).transpose()?,
            pair_hints,
            reference_point: self.reference_point.clone(),
            default_x0,
            region_radius: self.region_radius.unwrap_or(1.0),
            analytic: self.analytic.as_ref().map(|a| AnalyticInfo {
                theta_pairs: a.theta_pairs.clone(),
                kappa_pairs: a.kappa_pairs.clone(),
                kappa_system: a.kappa_system,
                expected_rate: a.expected_rate,
                note: a.note.clone(),
            }),
        };
        // surface dimension mismatches and invalid schedules now
        inst.schedule()?;
        Ok(inst)
    }

    pub fn from_instance(inst: &ProblemInstance) -> Self {
        InstanceSpec {
            name: inst.name.clone(),
            description: inst.description.clone(),
            dimension: inst.dim,
            sets: inst.sets.iter().map(SetSpec::from_set).collect(),
            pairs: inst.pairs.iter().map(|&(s, t)| (s + 1, t + 1)).collect(),
            params: inst.params.clone(),
            intersection: inst.intersection_hint.as_ref().map(SetSpec::from_set),
            pair_intersections: inst
                .pair_hints
                .iter()
                .map(|o| o.as_ref().map(SetSpec::from_set))
                .collect(),
            reference_point: inst.reference_point.clone(),
            x0: Some(inst.default_x0.clone()),
            region_radius: Some(inst.region_radius),
            analytic: inst.analytic.as_ref().map(|a| AnalyticSpec {
                theta_pairs: a.theta_pairs.clone(),
                kappa_pairs: a.kappa_pairs.clone(),
                kappa_system: a.kappa_system,
                expected_rate: a.expected_rate,
                note: a.note.clone(),
            }),
        }
    }
}

/// Start point selection for a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StartSpec {
    Explicit(Vec<f64>),
    RandomBall {
        center: Vec<f64>,
        radius: f64,
        seed: u64,
    },
}

/// Instance reference: a catalog name or an inline definition.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceRef {
    Name(String),
    Inline(InstanceSpec),
}

impl InstanceRef {
    pub fn resolve(&self) -> Result<ProblemInstance> {
        match self {
            InstanceRef::Name(n) => crate::catalog::builtin(n),
            InstanceRef::Inline(spec) => spec.build(),
        }
    }
}

/// Estimator settings shared by `predict` and `estimate`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EstimatorSettings {
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub eps: f64,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        Self {
            delta: 1.0,
            samples: 10_000,
            seed: 0,
            eps: 0.0,
        }
    }
}

fn default_delta() -> f64 {
    1.0
}

fn default_samples() -> usize {
    10_000
}

fn default_cycles() -> usize {
    500
}

fn default_stop_tol() -> f64 {
    1e-12
}

fn default_margin() -> f64 {
    0.05
}

fn default_audits() -> Vec<String> {
    vec!["fejer".into(), "coercive".into(), "contraction".into()]
}

/// Full run configuration, as accepted via `--config`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub instance: InstanceRef,
    #[serde(default)]
    pub x0: Option<StartSpec>,
    #[serde(default = "default_cycles")]
    pub cycles: usize,
    #[serde(default = "default_stop_tol")]
    pub stop_tol: f64,
    /// Which audits to attach to `run` output: any of "fejer", "coercive",
    /// "contraction".
    #[serde(default = "default_audits")]
    pub audits: Vec<String>,
    #[serde(default)]
    pub estimator: EstimatorSettings,
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub out: Option<String>,
}

impl RunConfig {
    pub fn for_instance(name: &str) -> Self {
        RunConfig {
            instance: InstanceRef::Name(name.to_string()),
            x0: None,
            cycles: default_cycles(),
            stop_tol: default_stop_tol(),
            audits: default_audits(),
            estimator: EstimatorSettings::default(),
            margin: default_margin(),
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cycles == 0 {
            return Err(Error::Config("cycles must be positive".into()));
        }
        if !(self.stop_tol >= 0.0) {
            return Err(Error::Config("stop_tol must be nonnegative".into()));
        }
        if !(self.margin >= 0.0) {
            return Err(Error::Config("margin must be nonnegative".into()));
        }
        if !(self.estimator.delta > 0.0) {
            return Err(Error::Config("estimator delta must be positive".into()));
        }
        if self.estimator.samples == 0 {
            return Err(Error::Config("estimator samples must be positive".into()));
        }
        for a in &self.audits {
            if !matches!(a.as_str(), "fejer" | "coercive" | "contraction") {
                return Err(Error::Config(format!("unknown audit {a:?}")));
            }
        }
        Ok(())
    }

    /// Resolves the start point, drawing from the seeded ball when asked.
    pub fn start_point(&self, inst: &ProblemInstance) -> Result<(Vec<f64>, Option<u64>)> {
        match &self.x0 {
            None => Ok((inst.default_x0.clone(), None)),
            Some(StartSpec::Explicit(x)) => {
                crate::check_dim(inst.dim, x.len())?;
                if !crate::geometry::is_finite(x) {
                    return Err(Error::Config("x0 must be finite".into()));
                }
                Ok((x.clone(), None))
            }
            Some(StartSpec::RandomBall {
                center,
                radius,
                seed,
            }) => {
                crate::check_dim(inst.dim, center.len())?;
                if !(*radius > 0.0) {
                    return Err(Error::Config("x0 ball radius must be positive".into()));
                }
                use rand::Rng;
                use rand_chacha::rand_core::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
                // rejection-free: gaussian direction, radial cdf inverse
                let dir: Vec<f64> = (0..inst.dim)
                    .map(|_| {
                        let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
                        let u2: f64 = rng.gen();
                        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
                    })
                    .collect();
                let n = crate::geometry::norm(&dir).max(1e-12);
                let r = radius * rng.gen::<f64>().powf(1.0 / inst.dim as f64);
                let x = crate::geometry::axpy(center, r / n, &dir);
                Ok((x, Some(*seed)))
            }
        }
    }
}
