//! Projection-first search: a breadth-first exploration of a percolation
//! cluster that hands each new vertex a private subface, so the search never
//! re-enters explored territory and face dimensions shrink with depth rather
//! than with cluster size.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::face::{project, FaceGraph};
use crate::oracle::{check_probability, EdgeOracle};
use crate::perm::{EdgeId, Permutation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PfsMode {
    Plain,
    TwoPhase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfsConfig {
    pub mode: PfsMode,
    pub p: f64,
    /// Round budget; `None` runs until the frontier dies or `r` is reached.
    pub max_rounds: Option<usize>,
    /// Truncation level of the second phase; derived from `β` when absent.
    pub k: Option<usize>,
    /// Untruncated rounds before truncation starts; `max(1, round(ln ln m))` when absent.
    pub tau1: Option<usize>,
    /// Stop once at least this many vertices are explored.
    pub r: Option<u64>,
    /// Assert the structural facts after every round.
    pub check_invariants: bool,
}

impl PfsConfig {
    pub fn plain(p: f64) -> Self {
        PfsConfig {
            mode: PfsMode::Plain,
            p,
            max_rounds: None,
            k: None,
            tau1: None,
            r: None,
            check_invariants: cfg!(debug_assertions),
        }
    }

    pub fn two_phase(p: f64) -> Self {
        PfsConfig { mode: PfsMode::TwoPhase, ..PfsConfig::plain(p) }
    }

    pub fn rounds(mut self, tau: usize) -> Self {
        self.max_rounds = Some(tau);
        self
    }

    pub fn target(mut self, r: u64) -> Self {
        self.r = Some(r);
        self
    }

    pub fn truncation(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn phase_one(mut self, tau1: usize) -> Self {
        self.tau1 = Some(tau1);
        self
    }

    pub fn checked(mut self, on: bool) -> Self {
        self.check_invariants = on;
        self
    }

    fn validate(&self) -> Result<()> {
        check_probability(self.p)?;
        if self.max_rounds == Some(0) {
            return Err(Error::InvalidParameter("max_rounds must be at least 1".into()));
        }
        if self.k == Some(0) {
            return Err(Error::InvalidParameter("truncation K must be at least 1".into()));
        }
        if self.r == Some(0) {
            return Err(Error::InvalidParameter("r must be at least 1".into()));
        }
        Ok(())
    }

    /// Truncation level for a host of dimension `m`.
    pub fn resolved_k(&self, m: usize) -> Result<usize> {
        match self.k {
            Some(k) => Ok(k),
            None => truncation_level(m, self.p),
        }
    }

    pub fn resolved_tau1(&self, m: usize) -> usize {
        self.tau1.unwrap_or_else(|| default_tau1(m))
    }
}

/// `K = ceil(max{2e·m·p, log₂ β⁻²})` with `β = m·p − 1`; requires `β > 0`.
pub fn truncation_level(m: usize, p: f64) -> Result<usize> {
    let mp = m as f64 * p;
    let beta = mp - 1.0;
    if beta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "K needs a supercritical density (m·p = {mp} must exceed 1); pass K explicitly"
        )));
    }
    let k = (2.0 * std::f64::consts::E * mp).max((beta * beta).recip().log2()).ceil();
    Ok((k as usize).max(1))
}

/// `max(1, round(ln ln m))`.
pub fn default_tau1(m: usize) -> usize {
    let ll = (m as f64).ln().ln();
    if ll.is_finite() {
        (ll.round() as usize).max(1)
    } else {
        1
    }
}

/// Per-vertex record of an explored vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Explored {
    /// Round in which the vertex joined the frontier (the root joins in round 1).
    pub round: usize,
    /// `(parent, generator)` of the tree edge; `None` for the root.
    pub parent: Option<(Permutation, usize)>,
    /// Total dimension spent along the tree path to this vertex.
    pub weight: usize,
    pub depth: usize,
    /// Dimension of the face assigned to this vertex when it entered the frontier.
    pub face_dim: usize,
}

/// One vertex's exposure step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expansion {
    pub round: usize,
    pub face_dim: usize,
    pub children: usize,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundSummary {
    pub round: usize,
    pub explored: usize,
    pub frontier: usize,
    pub max_weight: usize,
    pub min_face_dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfsSummary {
    pub rounds: usize,
    pub explored_per_round: Vec<usize>,
    pub frontier_sizes: Vec<usize>,
    pub max_weight: usize,
    pub min_face_dim_per_round: Vec<Option<usize>>,
    pub queries: usize,
    pub reached_target: bool,
}

/// State of a projection-first search run.
#[derive(Debug, Clone)]
pub struct PfsState {
    pub host: FaceGraph,
    pub root: Permutation,
    /// Completed rounds.
    pub round: usize,
    pub explored: HashMap<Permutation, Explored>,
    /// Current frontier with the face assigned to each vertex.
    pub frontier: Vec<(Permutation, FaceGraph)>,
    /// Tree edges `(child, parent, generator)`, in discovery order.
    pub tree: Vec<(Permutation, Permutation, usize)>,
    pub history: Vec<RoundSummary>,
    pub expansions: Vec<Expansion>,
    queried: HashSet<EdgeId>,
    repeat_queries: u64,
}

impl PfsState {
    fn new(host: &FaceGraph, v: &Permutation) -> Result<Self> {
        if !host.contains(v)? {
            return Err(Error::NotInFace(v.to_string()));
        }
        let mut explored = HashMap::new();
        explored.insert(
            v.clone(),
            Explored { round: 1, parent: None, weight: 0, depth: 0, face_dim: host.dimension() },
        );
        let mut state = PfsState {
            host: host.clone(),
            root: v.clone(),
            round: 0,
            explored,
            frontier: vec![(v.clone(), host.clone())],
            tree: Vec::new(),
            history: Vec::new(),
            expansions: Vec::new(),
            queried: HashSet::new(),
            repeat_queries: 0,
        };
        state.record();
        Ok(state)
    }

    pub fn explored_count(&self) -> usize {
        self.explored.len()
    }

    pub fn contains(&self, x: &Permutation) -> bool {
        self.explored.contains_key(x)
    }

    pub fn queries(&self) -> usize {
        self.queried.len()
    }

    pub fn repeat_queries(&self) -> u64 {
        self.repeat_queries
    }

    pub fn queried_edges(&self) -> &HashSet<EdgeId> {
        &self.queried
    }

    pub fn max_weight(&self) -> usize {
        self.explored.values().map(|e| e.weight).max().unwrap_or(0)
    }

    pub fn summary(&self, r: Option<u64>) -> PfsSummary {
        PfsSummary {
            rounds: self.round,
            explored_per_round: self.history.iter().map(|h| h.explored).collect(),
            frontier_sizes: self.history.iter().map(|h| h.frontier).collect(),
            max_weight: self.max_weight(),
            min_face_dim_per_round: self.history.iter().map(|h| h.min_face_dim).collect(),
            queries: self.queries(),
            reached_target: r.is_some_and(|r| self.explored.len() as u64 >= r),
        }
    }

    fn record(&mut self) {
        let max_weight = self.frontier.iter().map(|(x, _)| self.explored[x].weight).max().unwrap_or(0);
        self.history.push(RoundSummary {
            round: self.round + 1,
            explored: self.explored.len(),
            frontier: self.frontier.len(),
            max_weight,
            min_face_dim: self.frontier.iter().map(|(_, h)| h.dimension()).min(),
        });
    }

    fn query(&mut self, oracle: &EdgeOracle, e: EdgeId, p: f64) -> bool {
        if !self.queried.insert(e) {
            self.repeat_queries += 1;
        }
        oracle.edge_open(e, p)
    }

    /// Exposes one round. `cap` truncates each vertex at that many children.
    fn step(&mut self, oracle: &EdgeOracle, p: f64, cap: Option<usize>) -> Result<()> {
        let frontier = std::mem::take(&mut self.frontier);
        let round = self.round + 1;
        let mut next = Vec::new();
        for (x, face) in frontier {
            let mut found: Vec<(usize, Permutation)> = Vec::new();
            let mut truncated = false;
            for g in face.admissible_generators() {
                if cap.is_some_and(|k| found.len() >= k) {
                    truncated = true;
                    break;
                }
                let e = x.edge_id(g)?;
                if self.query(oracle, e, p) {
                    found.push((g, x.apply_generator(g)?));
                }
            }
            self.expansions.push(Expansion { round, face_dim: face.dimension(), children: found.len(), truncated });
            if found.is_empty() {
                continue;
            }
            let mut group = Vec::with_capacity(found.len() + 1);
            group.push(x.clone());
            group.extend(found.iter().map(|(_, y)| y.clone()));
            let faces = project(&face, &group)?;
            let parent = &self.explored[&x];
            let (weight, depth) = (parent.weight + found.len(), parent.depth + 1);
            for ((g, y), h) in found.into_iter().zip(faces.into_iter().skip(1)) {
                if self.explored.contains_key(&y) {
                    return Err(Error::InvalidParameter(format!("vertex {y} explored twice")));
                }
                self.explored.insert(
                    y.clone(),
                    Explored {
                        round: round + 1,
                        parent: Some((x.clone(), g)),
                        weight,
                        depth,
                        face_dim: h.dimension(),
                    },
                );
                self.tree.push((y.clone(), x.clone(), g));
                next.push((y, h));
            }
        }
        self.frontier = next;
        self.round = round;
        self.record();
        Ok(())
    }

    /// Checks facts (a), (b) and (d), face disjointness, `H(x) ∩ W = {x}`,
    /// and that no edge was queried twice. Returns a description of the
    /// first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let m = self.host.dimension();
        // (a) tree on W
        if self.tree.len() + 1 != self.explored.len() {
            return Err(format!("tree has {} edges on {} vertices", self.tree.len(), self.explored.len()));
        }
        for (child, parent, g) in &self.tree {
            let (c, p) = match (self.explored.get(child), self.explored.get(parent)) {
                (Some(c), Some(p)) => (c, p),
                _ => return Err(format!("tree edge {child}-{parent} leaves W")),
            };
            if c.round != p.round + 1 || c.parent.as_ref() != Some(&(parent.clone(), *g)) {
                return Err(format!("tree edge {child}-{parent} inconsistent with rounds"));
            }
            if parent.apply_generator_unchecked(*g) != *child {
                return Err(format!("tree edge {child}-{parent} is not a host edge"));
            }
        }
        // (b) W is the disjoint union of the frontiers A(1..=t+1)
        let mut per_round = vec![0usize; self.round + 2];
        for e in self.explored.values() {
            if e.round == 0 || e.round > self.round + 1 {
                return Err(format!("vertex recorded in round {}", e.round));
            }
            per_round[e.round] += 1;
        }
        for h in &self.history {
            if per_round[h.round] != h.frontier {
                return Err(format!("round {} frontier size {} but {} vertices", h.round, h.frontier, per_round[h.round]));
            }
        }
        // (d) and the face conditions on the live frontier
        for (i, (x, h)) in self.frontier.iter().enumerate() {
            let rec = &self.explored[x];
            if h.dimension() + rec.weight < m {
                return Err(format!("dim H({x}) = {} < m - w = {}", h.dimension(), m - rec.weight));
            }
            if !h.contains_unchecked(x) {
                return Err(format!("{x} not in its face"));
            }
            for w in self.explored.keys() {
                if w != x && h.contains_unchecked(w) {
                    return Err(format!("H({x}) meets explored vertex {w}"));
                }
            }
            for (y, g) in &self.frontier[i + 1..] {
                if h.intersects(g) {
                    return Err(format!("faces of {x} and {y} intersect"));
                }
            }
        }
        if self.repeat_queries > 0 {
            return Err(format!("{} repeated edge queries", self.repeat_queries));
        }
        Ok(())
    }

    fn assert_invariants(&self) -> Result<()> {
        self.check_invariants().map_err(|msg| Error::InvalidParameter(format!("invariant violated: {msg}")))
    }
}

fn run(host: &FaceGraph, v: &Permutation, oracle: &EdgeOracle, cfg: &PfsConfig) -> Result<PfsState> {
    cfg.validate()?;
    if oracle.n != host.n() {
        return Err(Error::SizeMismatch { expected: host.n(), found: oracle.n });
    }
    let m = host.dimension();
    let (k, tau1) = match cfg.mode {
        PfsMode::Plain => (None, usize::MAX),
        PfsMode::TwoPhase => (Some(cfg.resolved_k(m)?), cfg.resolved_tau1(m)),
    };
    let mut state = PfsState::new(host, v)?;
    let done = |s: &PfsState| {
        s.frontier.is_empty()
            || cfg.max_rounds.is_some_and(|t| s.round >= t)
            || cfg.r.is_some_and(|r| s.explored.len() as u64 >= r)
    };
    while !done(&state) {
        let cap = if state.round < tau1 { None } else { k };
        state.step(oracle, cfg.p, cap)?;
        if cfg.check_invariants {
            state.assert_invariants()?;
        }
    }
    Ok(state)
}

/// Runs plain projection-first search from `v` inside `host`.
pub fn pfs_explore(host: &FaceGraph, v: &Permutation, oracle: &EdgeOracle, cfg: &PfsConfig) -> Result<PfsState> {
    if cfg.mode != PfsMode::Plain {
        return Err(Error::InvalidParameter("pfs_explore needs plain mode".into()));
    }
    run(host, v, oracle, cfg)
}

/// Runs the two-phase variant: `τ1` untruncated rounds, then rounds where
/// each vertex stops after `K` discovered neighbours.
pub fn pfs_prime_explore(
    host: &FaceGraph,
    v: &Permutation,
    oracle: &EdgeOracle,
    cfg: &PfsConfig,
) -> Result<PfsState> {
    if cfg.mode != PfsMode::TwoPhase {
        return Err(Error::InvalidParameter("pfs_prime_explore needs two_phase mode".into()));
    }
    run(host, v, oracle, cfg)
}

/// Whether plain PFS from `v` discovers at least `r` vertices. A `true`
/// answer certifies that the cluster of `v` has at least `r` vertices.
pub fn cluster_reaches(host: &FaceGraph, v: &Permutation, oracle: &EdgeOracle, p: f64, r: u64) -> Result<bool> {
    let cfg = PfsConfig::plain(p).target(r).checked(false);
    Ok(pfs_explore(host, v, oracle, &cfg)?.explored_count() as u64 >= r)
}
