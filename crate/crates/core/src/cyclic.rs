//! The cyclic gDR algorithm over an indexed set family `{C_i}`, including
//! the pair-graph structure and its connectedness conditions.
//!
//! Conventions: a schedule has `m` sets indexed `1..=m` (stored 0-based) and
//! `l` operators `T_j` over pairs `(s_j, t_j)`. One cycle applies
//! `T_1, ..., T_l`; the cycle length is the number of operators.

use crate::diagnostics::TrajectoryReport;
use crate::geometry::{self, dist, is_finite, AffineSubspace};
use crate::operators::GdrOperator;
use crate::sets::ProjectableSet;
use crate::{check_dim, Error, Result};

/// Brute-force bound for the fully-connected search.
pub const MAX_FULLY_CONNECTED_SETS: usize = 8;

/// Relaxation parameters of one schedule operator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PairParams {
    pub lambda: f64,
    pub mu: f64,
    pub alpha: f64,
}

/// An ordered list of gDR operators over an indexed family `{C_i}`.
#[derive(Debug, Clone)]
pub struct CyclicSchedule {
    sets: Vec<ProjectableSet>,
    pairs: Vec<(usize, usize)>, // 0-based
    params: Vec<PairParams>,
    operators: Vec<GdrOperator>,
    intersection_hint: Option<ProjectableSet>,
    pair_hints: Vec<Option<ProjectableSet>>,
}

impl CyclicSchedule {
    /// Builds a schedule. `pairs` are 0-based indices into `sets`; every set
    /// index must be covered by some pair and `s_j != t_j`.
    pub fn new(
        sets: Vec<ProjectableSet>,
        pairs: Vec<(usize, usize)>,
        params: Vec<PairParams>,
    ) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::EmptyInput("schedule sets"));
        }
        if pairs.is_empty() {
            return Err(Error::EmptyInput("schedule pairs"));
        }
        if pairs.len() != params.len() {
            return Err(Error::Config("pairs/params length mismatch".into()));
        }
        let dim = sets[0].dim();
        for s in &sets {
            check_dim(dim, s.dim())?;
        }
        let m = sets.len();
        let mut covered = vec![false; m];
        for &(s, t) in &pairs {
            if s >= m || t >= m {
                return Err(Error::Config(format!("pair index ({s}, {t}) out of range")));
            }
            if s == t {
                return Err(Error::Config("pair with s_j == t_j".into()));
            }
            covered[s] = true;
            covered[t] = true;
        }
        if covered.iter().any(|c| !c) {
            return Err(Error::Config(
                "coverage violated: every set index must appear in some pair".into(),
            ));
        }
        let operators = pairs
            .iter()
            .zip(&params)
            .map(|(&(s, t), p)| {
                GdrOperator::new(sets[s].clone(), sets[t].clone(), p.lambda, p.mu, p.alpha)
            })
            .collect::<Result<Vec<_>>>()?;
        let pair_hints = vec![None; pairs.len()];
        Ok(Self {
            sets,
            pairs,
            params,
            operators,
            intersection_hint: None,
            pair_hints,
        })
    }

    /// Attaches an analytic description of the intersection `C = n C_i`.
    pub fn with_intersection_hint(mut self, hint: ProjectableSet) -> Result<Self> {
        check_dim(self.dim(), hint.dim())?;
        self.intersection_hint = Some(hint);
        Ok(self)
    }

    /// Attaches analytic descriptions of the pair intersections
    /// `C_{s_j} n C_{t_j}` used by Z-set diagnostics.
    pub fn with_pair_hints(mut self, hints: Vec<Option<ProjectableSet>>) -> Result<Self> {
        if hints.len() != self.pairs.len() {
            return Err(Error::Config("pair hint count mismatch".into()));
        }
        for h in hints.iter().flatten() {
            check_dim(self.dim(), h.dim())?;
        }
        self.pair_hints = hints;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.sets[0].dim()
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[ProjectableSet] {
        &self.sets
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn params(&self) -> &[PairParams] {
        &self.params
    }

    pub fn operators(&self) -> &[GdrOperator] {
        &self.operators
    }

    pub fn intersection_hint(&self) -> Option<&ProjectableSet> {
        self.intersection_hint.as_ref()
    }

    pub fn pair_hints(&self) -> &[Option<ProjectableSet>] {
        &self.pair_hints
    }

    /// Undirected connectivity of the pair graph on the set indices.
    pub fn is_connected(&self) -> bool {
        is_connected_graph(self.sets.len(), &self.pairs)
    }

    /// Searches for a directed cycle-plus-star cover of the index set; see
    /// [`fully_connected_witness_graph`].
    pub fn fully_connected_witness(&self) -> Result<Option<FullyConnectedWitness>> {
        fully_connected_witness_graph(self.sets.len(), &self.pairs)
    }

    pub fn is_fully_connected(&self) -> Result<bool> {
        Ok(self.fully_connected_witness()?.is_some())
    }

    /// The fixed-point supersets `Z_j`: the pair intersection, enlarged by
    /// the hull complement `(L_j - L_j)^perp` when `lambda_j = mu_j = 2`.
    pub fn z_sets(&self) -> Result<Vec<ZSet>> {
        self.pairs
            .iter()
            .zip(&self.params)
            .enumerate()
            .map(|(j, (&(s, t), p))| {
                let reflective = p.lambda == 2.0 && p.mu == 2.0;
                let hull = if reflective {
                    let mut pts = self.sets[s].spanning_points();
                    pts.extend(self.sets[t].spanning_points());
                    Some(geometry::affine_hull_of_points(&pts)?)
                } else {
                    None
                };
                Ok(ZSet {
                    pair_index: j,
                    set_s: self.sets[s].clone(),
                    set_t: self.sets[t].clone(),
                    hull,
                    pair_hint: self.pair_hints[j].clone(),
                })
            })
            .collect()
    }

    /// Projects `x` onto every `C_i` and reports whether the projections
    /// agree and land in the intersection.
    pub fn shadow_consensus(&self, x: &[f64], tol: f64) -> Result<ShadowConsensus> {
        check_dim(self.dim(), x.len())?;
        let projections = self
            .sets
            .iter()
            .map(|c| c.project(x))
            .collect::<Result<Vec<_>>>()?;
        let first = &projections[0];
        let all_equal = projections.iter().all(|p| dist(p, first) <= tol);
        let in_intersection = if all_equal {
            let mut inside = true;
            for c in &self.sets {
                if !c.contains(first, tol)? {
                    inside = false;
                    break;
                }
            }
            inside
        } else {
            false
        };
        Ok(ShadowConsensus {
            projections,
            all_equal,
            in_intersection,
        })
    }

    /// Runs the cyclic algorithm `x_{n+1} = T_{n+1} x_n` (operators repeating
    /// with period `l`), recording every sub-step. Stops early when a whole
    /// cycle moves less than `stop_tol`. Aborts with
    /// [`Error::NonFiniteIterate`] if an iterate leaves the finite range.
    pub fn run(&self, x0: &[f64], n_cycles: usize, stop_tol: f64) -> Result<TrajectoryReport> {
        check_dim(self.dim(), x0.len())?;
        if !is_finite(x0) {
            return Err(Error::InvalidParameter("non-finite start".into()));
        }
        let z_sets = if self.pair_hints.iter().all(|h| h.is_some()) {
            Some(self.z_sets()?)
        } else {
            None
        };
        let mut iterates = vec![x0.to_vec()];
        let mut residuals = Vec::new();
        let mut op_indices = Vec::new();
        let mut cycle_marks = Vec::new();
        let mut set_distances = vec![self.distances_to_sets(x0)?];
        let mut z_distances = match &z_sets {
            Some(zs) => Some(vec![self.distances_to_z(zs, x0)?]),
            None => None,
        };
        let mut intersection_distances = match &self.intersection_hint {
            Some(hint) => Some(vec![hint.distance(x0)?]),
            None => None,
        };
        let mut shadows = vec![self.sets[0].project(x0)?];

        let mut x = x0.to_vec();
        let mut cycles_completed = 0;
        let mut stopped_early = false;
        'outer: for _ in 0..n_cycles {
            let cycle_start = x.clone();
            for (j, op) in self.operators.iter().enumerate() {
                let next = op.step(&x)?;
                if !is_finite(&next) {
                    return Err(Error::NonFiniteIterate {
                        step: iterates.len(),
                    });
                }
                residuals.push(dist(&x, &next));
                op_indices.push(j);
                set_distances.push(self.distances_to_sets(&next)?);
                if let (Some(zd), Some(zs)) = (&mut z_distances, &z_sets) {
                    zd.push(self.distances_to_z(zs, &next)?);
                }
                if let (Some(id), Some(hint)) =
                    (&mut intersection_distances, &self.intersection_hint)
                {
                    id.push(hint.distance(&next)?);
                }
                shadows.push(self.sets[0].project(&next)?);
                iterates.push(next.clone());
                x = next;
            }
            cycle_marks.push(iterates.len() - 1);
            cycles_completed += 1;
            if dist(&cycle_start, &x) < stop_tol {
                stopped_early = true;
                break 'outer;
            }
        }
        Ok(TrajectoryReport {
            dim: self.dim(),
            iterates,
            cycle_marks,
            op_indices,
            set_distances,
            z_distances,
            intersection_distances,
            residuals,
            shadows: Some(shadows),
            cycles_completed,
            stopped_early,
        })
    }

    fn distances_to_sets(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.sets.iter().map(|c| c.distance(x)).collect()
    }

    fn distances_to_z(&self, z_sets: &[ZSet], x: &[f64]) -> Result<Vec<f64>> {
        z_sets.iter().map(|z| z.distance(x)).collect()
    }
}

/// Undirected connectivity of the graph on `0..m` with edges `{s, t}`.
pub fn is_connected_graph(m: usize, edges: &[(usize, usize)]) -> bool {
    if m == 0 {
        return false;
    }
    let mut adj = vec![Vec::new(); m];
    for &(s, t) in edges {
        adj[s].push(t);
        adj[t].push(s);
    }
    let mut seen = vec![false; m];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Witness for the fully-connected condition: indices `i_1..i_q` covering
/// every vertex, where the first `r` entries form a directed cycle
/// `(i_1,i_2), ..., (i_r,i_1)` and the rest are star edges `(i_1, i_k)`.
/// Degenerate conventions: `r = 1` is a pure star (no cycle edge required),
/// `r = q` a pure cycle (no star edges).
#[derive(Debug, Clone, serde::Serialize)]
pub struct FullyConnectedWitness {
    /// Indices `i_1..i_q` (0-based), covering every vertex.
    pub tuple: Vec<usize>,
    /// The first `r` entries form the directed cycle; the rest are star targets.
    pub r: usize,
}

impl FullyConnectedWitness {
    /// Checks a witness against a directed edge list.
    pub fn verify(&self, m: usize, edges: &[(usize, usize)]) -> bool {
        let q = self.tuple.len();
        let r = self.r;
        if r < 1 || r > q || self.tuple.iter().any(|&i| i >= m) {
            return false;
        }
        let mut covered = vec![false; m];
        for &i in &self.tuple {
            covered[i] = true;
        }
        if covered.iter().any(|&c| !c) {
            return false;
        }
        let edge_set: std::collections::HashSet<(usize, usize)> = edges.iter().copied().collect();
        if r > 1 {
            for k in 0..r {
                let e = (self.tuple[k], self.tuple[(k + 1) % r]);
                if e.0 == e.1 || !edge_set.contains(&e) {
                    return false;
                }
            }
        }
        for &to in &self.tuple[r..] {
            if to == self.tuple[0] || !edge_set.contains(&(self.tuple[0], to)) {
                return false;
            }
        }
        // r = q = 1 would demand a self-loop; only valid when it covers a
        // single-vertex graph, which pair schedules cannot produce
        r > 1 || q > 1 || m == 1
    }
}

/// Searches for a fully-connected witness in the directed graph on `0..m`.
///
/// A witness exists for anchor `v` exactly when every other vertex is either
/// a direct successor of `v` (star edge) or lies on some directed closed walk
/// through `v`. The search enumerates anchors, collects the closed-walk
/// coverage (the vertices `u` with `v -> ... -> u -> ... -> v`), and stitches
/// an explicit cycle tuple from breadth-first paths. Limited to
/// `m <=` [`MAX_FULLY_CONNECTED_SETS`].
pub fn fully_connected_witness_graph(
    m: usize,
    edges: &[(usize, usize)],
) -> Result<Option<FullyConnectedWitness>> {
    if m > MAX_FULLY_CONNECTED_SETS {
        return Err(Error::UnsupportedSize(format!(
            "fully-connected search supports at most {MAX_FULLY_CONNECTED_SETS} sets, got {m}"
        )));
    }
    if m == 0 {
        return Ok(None);
    }
    let mut adj = vec![Vec::new(); m];
    let mut radj = vec![Vec::new(); m];
    for &(s, t) in edges {
        if s != t {
            adj[s].push(t);
            radj[t].push(s);
        }
    }
    for v in 0..m {
        let fwd = bfs_reach(v, &adj);
        let bwd = bfs_reach(v, &radj);
        let star: Vec<bool> = {
            let mut s = vec![false; m];
            for &t in &adj[v] {
                s[t] = true;
            }
            s
        };
        // vertices that must ride the cycle: not the anchor, not star-reachable
        let need_cycle: Vec<usize> = (0..m)
            .filter(|&u| u != v && !star[u])
            .collect();
        if need_cycle.iter().any(|&u| !(fwd[u] && bwd[u])) {
            continue;
        }
        let witness = if need_cycle.is_empty() {
            let mut tuple = vec![v];
            tuple.extend((0..m).filter(|&u| u != v));
            FullyConnectedWitness { tuple, r: 1 }
        } else {
            // closed walk v -> u1 -> u2 -> ... -> v through every needed vertex
            let mut walk = vec![v];
            let mut cur = v;
            for &u in &need_cycle {
                let path = bfs_path(cur, u, &adj).expect("reachability checked");
                walk.extend_from_slice(&path[1..]);
                cur = u;
            }
            let back = bfs_path(cur, v, &adj).expect("reachability checked");
            walk.extend_from_slice(&back[1..]);
            walk.pop(); // drop the final return to v; the (i_r, i_1) edge is implicit
            let r = walk.len();
            let mut covered = vec![false; m];
            for &u in &walk {
                covered[u] = true;
            }
            let mut tuple = walk;
            tuple.extend((0..m).filter(|&u| !covered[u]));
            FullyConnectedWitness { tuple, r }
        };
        debug_assert!(witness.verify(m, edges));
        return Ok(Some(witness));
    }
    Ok(None)
}

fn bfs_reach(start: usize, adj: &[Vec<usize>]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen // start itself marked only if it sits on a cycle
}

fn bfs_path(from: usize, to: usize, adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; adj.len()];
    let mut queue = std::collections::VecDeque::from([from]);
    let mut found = false;
    'search: while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if parent[w] == usize::MAX && w != from {
                parent[w] = v;
                if w == to {
                    found = true;
                    break 'search;
                }
                queue.push_back(w);
            }
        }
    }
    // a path from a vertex to itself must use at least one edge
    if to == from {
        for &w in &adj[from] {
            if w == from {
                return Some(vec![from, from]);
            }
        }
    }
    if !found {
        return None;
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

/// Fixed-point superset attached to pair `j`:
/// `Z_j = (C_s n C_t) + (L_j - L_j)^perp` when both relaxations reflect,
/// plain pair intersection otherwise.
#[derive(Debug, Clone)]
pub struct ZSet {
    pub pair_index: usize,
    set_s: ProjectableSet,
    set_t: ProjectableSet,
    /// `L_j = aff(C_s u C_t)`, built only in the reflective case.
    pub hull: Option<AffineSubspace>,
    pair_hint: Option<ProjectableSet>,
}

impl ZSet {
    /// Distance to `Z_j`. With the complement part the identity
    /// `d_Z(x) = d_{C_s n C_t}(P_L x)` applies; the pair-intersection
    /// distance comes from the analytic hint when present, otherwise from an
    /// inner alternating-projection solve (an upper bound, exact enough for
    /// membership-level tests on convex pairs).
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        let y = match &self.hull {
            Some(l) => l.project(x)?,
            None => x.to_vec(),
        };
        match &self.pair_hint {
            Some(hint) => hint.distance(&y),
            None => self.pair_distance_by_alternating(&y),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        Ok(self.distance(x)? <= tol)
    }

    fn pair_distance_by_alternating(&self, y: &[f64]) -> Result<f64> {
        let mut a = self.set_s.project(y)?;
        for _ in 0..10_000 {
            let b = self.set_t.project(&a)?;
            let next = self.set_s.project(&b)?;
            let step = dist(&a, &next);
            a = next;
            if step < 1e-10 {
                break;
            }
        }
        Ok(dist(y, &a))
    }
}

/// Result of projecting one point onto every set of a schedule.
#[derive(Debug, Clone)]
pub struct ShadowConsensus {
    pub projections: Vec<Vec<f64>>,
    pub all_equal: bool,
    pub in_intersection: bool,
}
