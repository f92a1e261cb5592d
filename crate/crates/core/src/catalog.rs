//! Built-in problem instances: the worked examples and counterexample
//! geometries the test and certification pipelines run against.
//!
//! Instances are addressed by name, optionally with colon-separated numeric
//! parameters (`two-lines:30`, `three-lines-epsilon:0.05`,
//! `random-polyhedra:4,3,7`). A few fixed aliases like `two-lines-45deg`
//! are kept for convenience.

use crate::cyclic::{CyclicSchedule, PairParams};
use crate::geometry::AffineSubspace;
use crate::sets::{Halfspace, ProjectableSet};
use crate::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Analytic regularity data attached to an instance, with the formulas the
/// values came from recorded for the report provenance.
#[derive(Debug, Clone, Default)]
pub struct AnalyticInfo {
    /// CQ number per pair, when a closed form exists.
    pub theta_pairs: Vec<Option<f64>>,
    /// Linear regularity modulus per pair.
    pub kappa_pairs: Vec<Option<f64>>,
    /// Modulus for the fixed-point system `{Z_j}`.
    pub kappa_system: Option<f64>,
    /// Known asymptotic per-step rate, for cross-checks.
    pub expected_rate: Option<f64>,
    pub note: String,
}

/// A named feasibility problem: sets, schedule, and optional analytic data.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub name: String,
    pub description: String,
    pub dim: usize,
    pub sets: Vec<ProjectableSet>,
    /// 0-based pair indices.
    pub pairs: Vec<(usize, usize)>,
    pub params: Vec<PairParams>,
    pub intersection_hint: Option<ProjectableSet>,
    pub pair_hints: Vec<Option<ProjectableSet>>,
    /// A point of the intersection, used as sampling center.
    pub reference_point: Option<Vec<f64>>,
    pub default_x0: Vec<f64>,
    /// Sampling region for the estimators.
    pub region_radius: f64,
    pub analytic: Option<AnalyticInfo>,
}

impl ProblemInstance {
    pub fn schedule(&self) -> Result<CyclicSchedule> {
        let mut s = CyclicSchedule::new(self.sets.clone(), self.pairs.clone(), self.params.clone())?;
        if let Some(hint) = &self.intersection_hint {
            s = s.with_intersection_hint(hint.clone())?;
        }
        if !self.pair_hints.is_empty() {
            s = s.with_pair_hints(self.pair_hints.clone())?;
        }
        Ok(s)
    }

    /// Same instance with every operator's parameters replaced.
    pub fn with_params(mut self, p: PairParams) -> Self {
        for q in &mut self.params {
            *q = p;
        }
        self
    }

    /// Sampling center for the estimators: the reference point when known,
    /// otherwise the origin.
    pub fn region_center(&self) -> Vec<f64> {
        self.reference_point
            .clone()
            .unwrap_or_else(|| vec![0.0; self.dim])
    }
}

/// Template names and one-line descriptions for the `catalog` subcommand.
pub fn builtin_names() -> Vec<(&'static str, &'static str)> {
    vec![
        ("two-lines:<deg>", "two lines through the origin at the given angle (default 45)"),
        ("parallel-lines-gap:<d>", "two parallel lines at distance d (default 1); empty intersection"),
        ("perpendicular-hyperplanes:<n>", "two orthogonal hyperplanes in R^n (default 2)"),
        ("three-lines-epsilon:<eps>", "x-axis, a line of slope eps, and the y-axis (default 0.1)"),
        ("three-planes-epsilon:<eps>", "three planes in R^3 whose pairwise moduli stay bounded while the triple's blows up (default 0.1)"),
        ("quadrant-pair", "nonnegative vs nonpositive quadrant in R^2: linearly regular, CQ number 1"),
        ("remark-str-lin", "three halfspaces whose proper subsystems are regular but the triple is not"),
        ("four-set-r3", "four sets in R^3 whose cyclic fixed points have mismatched shadows"),
        ("epi-abs-axis", "epigraph of |.| against the x-axis: spurious DR fixed points below the apex"),
        ("ball-vs-halfspace", "unit ball vs {x1 >= 2}: gap vector (1, 0)"),
        ("random-polyhedra:<m>,<n>,<seed>", "two random polyhedra (m halfspaces each) in R^n sharing the origin"),
    ]
}

/// Looks up a built-in instance by name, parsing optional parameters.
pub fn builtin(spec: &str) -> Result<ProblemInstance> {
    let (name, args) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let parse_f64 = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("bad numeric parameter {s:?} in instance {spec:?}")))
    };
    match name {
        // fixed-angle aliases
        "two-lines-30deg" => two_lines(30.0),
        "two-lines-45deg" => two_lines(45.0),
        "two-lines-60deg" => two_lines(60.0),
        "two-lines-80deg" => two_lines(80.0),
        "two-lines" => two_lines(match args {
            Some(a) => parse_f64(a)?,
            None => 45.0,
        }),
        "parallel-lines-gap" => parallel_lines_gap(match args {
            Some(a) => parse_f64(a)?,
            None => 1.0,
        }),
        "perpendicular-hyperplanes" => {
            let n = match args {
                Some(a) => a
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad dimension in {spec:?}")))?,
                None => 2,
            };
            perpendicular_hyperplanes(n)
        }
        "three-lines-epsilon" => three_lines_epsilon(match args {
            Some(a) => parse_f64(a)?,
            None => 0.1,
        }),
        "three-planes-epsilon" => three_planes_epsilon(match args {
            Some(a) => parse_f64(a)?,
            None => 0.1,
        }),
        "quadrant-pair" => quadrant_pair(),
        "remark-str-lin" => remark_str_lin(),
        "four-set-r3" => four_set_r3(),
        "epi-abs-axis" => epi_abs_axis(),
        "ball-vs-halfspace" => ball_vs_halfspace(),
        "random-polyhedra" => {
            let a = args.unwrap_or("4,3,0");
            let parts: Vec<&str> = a.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Config(format!(
                    "random-polyhedra expects m,n,seed; got {a:?}"
                )));
            }
            let m = parts[0]
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Config("bad m".into()))?;
            let n = parts[1]
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Config("bad n".into()))?;
            let seed = parts[2]
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::Config("bad seed".into()))?;
            random_polyhedra(m, n, seed)
        }
        _ => Err(Error::Config(format!("unknown instance {spec:?}"))),
    }
}

fn dr_params() -> PairParams {
    PairParams {
        lambda: 2.0,
        mu: 2.0,
        alpha: 0.5,
    }
}

fn ap_params() -> PairParams {
    PairParams {
        lambda: 1.0,
        mu: 1.0,
        alpha: 1.0,
    }
}

fn origin_hint(dim: usize) -> ProjectableSet {
    ProjectableSet::finite_points(vec![vec![0.0; dim]]).expect("singleton")
}

fn two_lines(degrees: f64) -> Result<ProblemInstance> {
    if !(degrees > 0.0 && degrees < 90.0 + 1e-9) {
        return Err(Error::Config(format!(
            "two-lines angle {degrees} outside ]0, 90] degrees"
        )));
    }
    let phi = degrees.to_radians();
    let a = ProjectableSet::hyperplane(vec![0.0, 1.0], 0.0)?;
    let b = ProjectableSet::hyperplane(vec![-phi.sin(), phi.cos()], 0.0)?;
    let theta = phi.cos().abs();
    let kappa = (2.0 / (1.0 - theta)).sqrt();
    Ok(ProblemInstance {
        name: format!("two-lines:{degrees}"),
        description: format!("two lines through the origin at {degrees} degrees"),
        dim: 2,
        sets: vec![a, b],
        pairs: vec![(0, 1)],
        params: vec![dr_params()],
        intersection_hint: Some(origin_hint(2)),
        pair_hints: vec![Some(origin_hint(2))],
        reference_point: Some(vec![0.0, 0.0]),
        default_x0: vec![1.0, 0.0],
        region_radius: 1.0,
        analytic: Some(AnalyticInfo {
            theta_pairs: vec![Some(theta)],
            kappa_pairs: vec![Some(kappa)],
            kappa_system: None,
            expected_rate: Some(phi.cos()),
            note: "theta = |cos phi| between the line normals; kappa = sqrt(2/(1-theta)); classical DR contracts at cos phi per step".into(),
        }),
    })
}

fn parallel_lines_gap(d: f64) -> Result<ProblemInstance> {
    if !(d > 0.0) {
        return Err(Error::Config(format!("parallel-lines gap {d} must be > 0")));
    }
    let a = ProjectableSet::hyperplane(vec![0.0, 1.0], 0.0)?;
    let b = ProjectableSet::hyperplane(vec![0.0, 1.0], d)?;
    Ok(ProblemInstance {
        name: format!("parallel-lines-gap:{d}"),
        description: format!("x-axis against its translate by (0, {d}); empty intersection"),
        dim: 2,
        sets: vec![a, b],
        pairs: vec![(0, 1)],
        params: vec![ap_params()],
        intersection_hint: None,
        pair_hints: vec![None],
        reference_point: None,
        default_x0: vec![3.0, 7.0],
        region_radius: 1.0,
        analytic: None,
    })
}

fn perpendicular_hyperplanes(n: usize) -> Result<ProblemInstance> {
    if n < 2 {
        return Err(Error::Config("perpendicular-hyperplanes needs n >= 2".into()));
    }
    let mut na = vec![0.0; n];
    na[0] = 1.0;
    let mut nb = vec![0.0; n];
    nb[1] = 1.0;
    let a = ProjectableSet::hyperplane(na.clone(), 0.0)?;
    let b = ProjectableSet::hyperplane(nb.clone(), 0.0)?;
    let hint = ProjectableSet::affine(AffineSubspace::from_equations(
        &[na, nb],
        &[0.0, 0.0],
        n,
    )?);
    let mut x0 = vec![1.0; n];
    x0[0] = 2.0;
    Ok(ProblemInstance {
        name: format!("perpendicular-hyperplanes:{n}"),
        description: format!("orthogonal hyperplanes x1 = 0 and x2 = 0 in R^{n}"),
        dim: n,
        sets: vec![a, b],
        pairs: vec![(0, 1)],
        params: vec![dr_params()],
        intersection_hint: Some(hint.clone()),
        pair_hints: vec![Some(hint)],
        reference_point: Some(vec![0.0; n]),
        default_x0: x0,
        region_radius: 1.0,
        analytic: Some(AnalyticInfo {
            theta_pairs: vec![Some(0.0)],
            kappa_pairs: vec![Some(2f64.sqrt())],
            kappa_system: None,
            expected_rate: None,
            note: "orthogonal normals: theta = 0, kappa = sqrt(2)".into(),
        }),
    })
}

fn three_lines_epsilon(eps: f64) -> Result<ProblemInstance> {
    if !(eps > 0.0) {
        return Err(Error::Config(format!("three-lines eps {eps} must be > 0")));
    }
    let c1 = ProjectableSet::hyperplane(vec![0.0, 1.0], 0.0)?; // x-axis
    let c2 = ProjectableSet::hyperplane(vec![-eps, 1.0], 0.0)?; // slope-eps line
    let c3 = ProjectableSet::hyperplane(vec![1.0, 0.0], 0.0)?; // y-axis
    let norm2 = (1.0 + eps * eps).sqrt();
    let theta12 = 1.0 / norm2;
    let theta13 = 0.0;
    Ok(ProblemInstance {
        name: format!("three-lines-epsilon:{eps}"),
        description: format!(
            "x-axis, the line of slope {eps}, and the y-axis; the pair (1,2) modulus blows up as eps shrinks"
        ),
        dim: 2,
        sets: vec![c1, c2, c3],
        pairs: vec![(0, 1), (0, 2)],
        params: vec![ap_params(), ap_params()],
        intersection_hint: Some(origin_hint(2)),
        pair_hints: vec![Some(origin_hint(2)), Some(origin_hint(2))],
        reference_point: Some(vec![0.0, 0.0]),
        default_x0: vec![1.0, 1.0],
        region_radius: 1.0,
        analytic: Some(AnalyticInfo {
            theta_pairs: vec![Some(theta12), Some(theta13)],
            kappa_pairs: vec![
                Some((2.0 / (1.0 - theta12)).sqrt()),
                Some((2.0 / (1.0 - theta13)).sqrt()),
            ],
            kappa_system: Some(2f64.sqrt()),
            expected_rate: None,
            note: "pairwise moduli from sqrt(2/(1-|<n_i,n_j>|)); the whole triple is sqrt(2)-linearly regular".into(),
        }),
    })
}

fn three_planes_epsilon(eps: f64) -> Result<ProblemInstance> {
    if !(eps > 0.0) {
        return Err(Error::Config(format!("three-planes eps {eps} must be > 0")));
    }
    let n3_scale = (2.0 + eps * eps).sqrt();
    let c1 = ProjectableSet::hyperplane(vec![0.0, 0.0, 1.0], 0.0)?;
    let c2 = ProjectableSet::hyperplane(vec![1.0, 0.0, 0.0], 0.0)?;
    let c3 = ProjectableSet::hyperplane(
        vec![1.0 / n3_scale, -eps / n3_scale, 1.0 / n3_scale],
        0.0,
    )?;
    let theta12 = 0.0;
    let theta13 = 1.0 / n3_scale;
    let theta23 = 1.0 / n3_scale;
    Ok(ProblemInstance {
        name: format!("three-planes-epsilon:{eps}"),
        description: format!(
            "planes z = 0, x = 0, and the one through (0,0,0), ({eps},1,0), (0,1,{eps}); the triple's modulus blows up as eps shrinks"
        ),
        dim: 3,
        sets: vec![c1, c2, c3],
        pairs: vec![(0, 1), (0, 2), (1, 2)],
        params: vec![ap_params(), ap_params(), ap_params()],
        intersection_hint: Some(origin_hint(3)),
        pair_hints: vec![
            Some(ProjectableSet::affine(AffineSubspace::new(
                vec![0.0; 3],
                &[vec![0.0, 1.0, 0.0]],
            )?)),
            Some(ProjectableSet::affine(AffineSubspace::new(
                vec![0.0; 3],
                &[vec![eps, 1.0, 0.0]],
            )?)),
            Some(ProjectableSet::affine(AffineSubspace::new(
                vec![0.0; 3],
                &[vec![0.0, 1.0, eps]],
            )?)),
        ],
        reference_point: Some(vec![0.0; 3]),
        default_x0: vec![1.0, 1.0, 1.0],
        region_radius: 1.0,
        analytic: Some(AnalyticInfo {
            theta_pairs: vec![Some(theta12), Some(theta13), Some(theta23)],
            kappa_pairs: vec![
                Some((2.0 / (1.0 - theta12)).sqrt()),
                Some((2.0 / (1.0 - theta13)).sqrt()),
                Some((2.0 / (1.0 - theta23)).sqrt()),
            ],
            kappa_system: None,
            expected_rate: None,
            note: "pairwise moduli from sqrt(2/(1-|<n_i,n_j>|)) with <n_1,n_3> = 1/sqrt(2+eps^2)".into(),
        }),
    })
}

fn quadrant_pair() -> Result<ProblemInstance> {
    let quad_pos = ProjectableSet::polyhedron(
        vec![
            Halfspace::new(vec![-1.0, 0.0], 0.0)?,
            Halfspace::new(vec![0.0, -1.0], 0.0)?,
        ],
        2,
    )?;
    let quad_neg = ProjectableSet::polyhedron(
        vec![
            Halfspace::new(vec![1.0, 0.0], 0.0)?,
            Halfspace::new(vec![0.0, 1.0], 0.0)?,
        ],
        2,
    )?;
    Ok(ProblemInstance {
        name: "quadrant-pair".into(),
        description:
            "nonnegative vs nonpositive quadrant: linearly regular at the origin, CQ number 1"
                .into(),
        dim: 2,
        sets: vec![quad_pos, quad_neg],
        pairs: vec![(0, 1)],
        params: vec![dr_params()],
        intersection_hint: Some(origin_hint(2)),
        pair_hints: vec![Some(origin_hint(2))],
        reference_point: Some(vec![0.0, 0.0]),
        default_x0: vec![1.0, -1.0],
        region_radius: 1.0,
        analytic: Some(AnalyticInfo {
            theta_pairs: vec![None],
            kappa_pairs: vec![Some(2f64.sqrt())],
            kappa_system: None,
            expected_rate: None,
            note: "intersection is the origin; d_C^2 = d_A^2 + d_B^2 gives modulus sqrt(2)".into(),
        }),
    })
}

fn remark_str_lin() -> Result<ProblemInstance> {
    let s = 0.5f64.sqrt();
    let c1 = ProjectableSet::halfspace(vec![s, s], 0.0)?; // x + y <= 0
    let c2 = ProjectableSet::halfspace(vec![s, -s], 0.0)?; // x - y <= 0
    let c3 = ProjectableSet::halfspace(vec![-1.0, 0.0], 0.0)?; // x >= 0
    Ok(ProblemInstance {
        name: "remark-str-lin".into(),
        description:
            "halfspaces x+y<=0, x-y<=0, x>=0: every proper subsystem is regular at the origin, the triple is not"
                .into(),
        dim: 2,
        sets: vec![c1, c2, c3],
        pairs: vec![(0, 1), (0, 2)],
        params: vec![ap_params(), ap_params()],
        intersection_hint: Some(origin_hint(2)),
        pair_hints: vec![
            Some(ProjectableSet::polyhedron(
                vec![
                    Halfspace::new(vec![s, s], 0.0)?,
                    Halfspace::new(vec![s, -s], 0.0)?,
                ],
                2,
            )?),
            Some(ProjectableSet::polyhedron(
                vec![
                    Halfspace::new(vec![s, s], 0.0)?,
                    Halfspace::new(vec![-1.0, 0.0], 0.0)?,
                ],
                2,
            )?),
        ],
        reference_point: Some(vec![0.0, 0.0]),
        default_x0: vec![0.5, 2.0],
        region_radius: 1.0,
        analytic: None,
    })
}

fn four_set_r3() -> Result<ProblemInstance> {
    // C1 = R+ x R x {0}, C2 = R x R+ x {0}, C3 = {(a, b, b)}, C4 = R+ x R^2
    let c1 = ProjectableSet::polyhedron(
        vec![
            Halfspace::new(vec![-1.0, 0.0, 0.0], 0.0)?,
            Halfspace::new(vec![0.0, 0.0, 1.0], 0.0)?,
            Halfspace::new(vec![0.0, 0.0, -1.0], 0.0)?,
        ],
        3,
    )?;
    let c2 = ProjectableSet::polyhedron(
        vec![
            Halfspace::new(vec![0.0, -1.0, 0.0], 0.0)?,
            Halfspace::new(vec![0.0, 0.0, 1.0], 0.0)?,
            Halfspace::new(vec![0.0, 0.0, -1.0], 0.0)?,
        ],
        3,
    )?;
    let c3 = ProjectableSet::affine(AffineSubspace::new(
        vec![0.0; 3],
        &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0]],
    )?);
    let c4 = ProjectableSet::halfspace(vec![-1.0, 0.0, 0.0], 0.0)?;
    // Z1 = (C1 n C2) + (L1 - L1)^perp = R+^2 x R
    let z1 = ProjectableSet::polyhedron(
        vec![
            Halfspace::new(vec![-1.0, 0.0, 0.0], 0.0)?,
            Halfspace::new(vec![0.0, -1.0, 0.0], 0.0)?,
        ],
        3,
    )?;
    // Z2 = C3 n C4 = {(a, b, b): a >= 0}
    let z2 = ProjectableSet::polyhedron(
        vec![
            Halfspace::new(vec![0.0, 1.0, -1.0], 0.0)?,
            Halfspace::new(vec![0.0, -1.0, 1.0], 0.0)?,
            Halfspace::new(vec![-1.0, 0.0, 0.0], 0.0)?,
        ],
        3,
    )?;
    // C = R+ x {0} x {0}
    let intersection = ProjectableSet::polyhedron(
        vec![
            Halfspace::new(vec![-1.0, 0.0, 0.0], 0.0)?,
            Halfspace::new(vec![0.0, 1.0, 0.0], 0.0)?,
            Halfspace::new(vec![0.0, -1.0, 0.0], 0.0)?,
            Halfspace::new(vec![0.0, 0.0, 1.0], 0.0)?,
            Halfspace::new(vec![0.0, 0.0, -1.0], 0.0)?,
        ],
        3,
    )?;
    Ok(ProblemInstance {
        name: "four-set-r3".into(),
        description:
            "two quadrant slabs reflected as a pair plus a diagonal plane against a halfspace; fixed-point shadows disagree"
                .into(),
        dim: 3,
        sets: vec![c1, c2, c3, c4],
        pairs: vec![(0, 1), (2, 3)],
        params: vec![dr_params(), ap_params()],
        intersection_hint: Some(intersection),
        pair_hints: vec![Some(z1), Some(z2)],
        reference_point: Some(vec![0.0, 0.0, 0.0]),
        default_x0: vec![1.0, 1.0, 1.0],
        region_radius: 1.0,
        analytic: None,
    })
}

fn epi_abs_axis() -> Result<ProblemInstance> {
    let a = ProjectableSet::epi_abs(0, 1, 2)?;
    let b = ProjectableSet::hyperplane(vec![0.0, 1.0], 0.0)?;
    Ok(ProblemInstance {
        name: "epi-abs-axis".into(),
        description:
            "epigraph of |.| against the x-axis: with both relaxations at 2, points below the apex are spurious fixed points"
                .into(),
        dim: 2,
        sets: vec![a, b],
        pairs: vec![(0, 1)],
        params: vec![dr_params()],
        intersection_hint: Some(origin_hint(2)),
        pair_hints: vec![Some(origin_hint(2))],
        reference_point: Some(vec![0.0, 0.0]),
        default_x0: vec![0.0, -1.0],
        region_radius: 1.0,
        analytic: None,
    })
}

fn ball_vs_halfspace() -> Result<ProblemInstance> {
    let a = ProjectableSet::ball(vec![0.0, 0.0], 1.0)?;
    let b = ProjectableSet::halfspace(vec![-1.0, 0.0], -2.0)?; // x1 >= 2
    Ok(ProblemInstance {
        name: "ball-vs-halfspace".into(),
        description: "unit ball against {x1 >= 2}: disjoint, gap vector (1, 0)".into(),
        dim: 2,
        sets: vec![a, b],
        pairs: vec![(0, 1)],
        params: vec![ap_params()],
        intersection_hint: None,
        pair_hints: vec![None],
        reference_point: None,
        default_x0: vec![3.0, 7.0],
        region_radius: 1.0,
        analytic: None,
    })
}

fn random_polyhedra(m: usize, n: usize, seed: u64) -> Result<ProblemInstance> {
    if m == 0 || m > 10 {
        return Err(Error::Config(format!(
            "random-polyhedra m = {m} outside 1..=10 (the union hint needs 2m <= 20 faces)"
        )));
    }
    if n == 0 {
        return Err(Error::Config("random-polyhedra needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gen_halfspaces = |rng: &mut ChaCha8Rng, count: usize| -> Result<Vec<Halfspace>> {
        (0..count)
            .map(|_| {
                let normal: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
                let offset = 0.05 + 0.95 * rng.gen::<f64>(); // origin stays interior
                Halfspace::new(normal, offset)
            })
            .collect()
    };
    let ha = gen_halfspaces(&mut rng, m)?;
    let hb = gen_halfspaces(&mut rng, m)?;
    let mut union = ha.clone();
    union.extend(hb.iter().cloned());
    let a = ProjectableSet::polyhedron(ha, n)?;
    let b = ProjectableSet::polyhedron(hb, n)?;
    let hint = ProjectableSet::polyhedron(union, n)?;
    let x0: Vec<f64> = (0..n).map(|_| 5.0 * (rng.gen::<f64>() * 2.0 - 1.0)).collect();
    Ok(ProblemInstance {
        name: format!("random-polyhedra:{m},{n},{seed}"),
        description: format!(
            "two random polyhedra with {m} halfspaces each in R^{n}; the origin is interior to both"
        ),
        dim: n,
        sets: vec![a, b],
        pairs: vec![(0, 1)],
        params: vec![dr_params()],
        intersection_hint: Some(hint.clone()),
        pair_hints: vec![Some(hint)],
        reference_point: Some(vec![0.0; n]),
        default_x0: x0,
        region_radius: 1.0,
        analytic: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dist;

    #[test]
    fn every_builtin_constructs_and_validates() {
        for (template, _) in builtin_names() {
            let name = template
                .replace("<m>,<n>,<seed>", "4,3,7")
                .replace("<deg>", "45")
                .replace("<eps>", "0.1")
                .replace("<d>", "1")
                .replace("<n>", "3");
            let inst = builtin(&name).unwrap_or_else(|e| panic!("{name}: {e}"));
            let schedule = inst.schedule().unwrap();
            assert_eq!(schedule.dim(), inst.dim);
            assert_eq!(inst.pair_hints.len(), inst.pairs.len());
            // reference point really lies in every set
            if let Some(w) = &inst.reference_point {
                for c in &inst.sets {
                    assert!(c.contains(w, 1e-9).unwrap(), "{name}: w outside {c:?}");
                }
            }
            // intersection hint members lie in every set
            if let Some(hint) = &inst.intersection_hint {
                let probe = hint.project(&inst.default_x0).unwrap();
                for c in &inst.sets {
                    assert!(
                        c.contains(&probe, 1e-8).unwrap(),
                        "{name}: hint point escapes {c:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn aliases_match_parameterized_names() {
        let a = builtin("two-lines-45deg").unwrap();
        let b = builtin("two-lines:45").unwrap();
        assert_eq!(a.sets, b.sets);
    }

    #[test]
    fn unknown_name_is_config_error() {
        assert!(matches!(builtin("no-such-thing"), Err(Error::Config(_))));
        assert!(matches!(builtin("two-lines:oops"), Err(Error::Config(_))));
    }

    #[test]
    fn four_set_reference_shadows() {
        let inst = builtin("four-set-r3").unwrap();
        let s = inst.schedule().unwrap();
        let sc = s.shadow_consensus(&[1.0, 1.0, 1.0], 1e-9).unwrap();
        assert!(!sc.all_equal);
        assert!(dist(&sc.projections[0], &[1.0, 1.0, 0.0]) < 1e-12);
        assert!(dist(&sc.projections[3], &[1.0, 1.0, 1.0]) < 1e-12);
    }

    #[test]
    fn random_polyhedra_deterministic_per_seed() {
        let a = builtin("random-polyhedra:4,3,9").unwrap();
        let b = builtin("random-polyhedra:4,3,9").unwrap();
        assert_eq!(a.sets, b.sets);
        assert_eq!(a.default_x0, b.default_x0);
        let c = builtin("random-polyhedra:4,3,10").unwrap();
        assert_ne!(a.sets, c.sets);
    }
}
