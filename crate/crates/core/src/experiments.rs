//! Reproducible experiment drivers: phase-transition sweeps, connectivity
//! sweeps, hitting-time statistics, and property checks reused by the CLI's
//! `verify` command and the acceptance suite.

use std::collections::{BTreeMap, HashSet, VecDeque};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branching::{solve_gamma, Estimate};
use crate::error::{Error, Result};
use crate::face::{project, FaceChain, FaceGraph};
use crate::format::sig9;
use crate::oracle::{split_seed, EdgeOracle};
use crate::percolation::{
    for_each_edge, hitting_times_with, label_components, EnumerationLimit, HittingTimes, PercolationConfig,
};
use crate::perm::{factorial, vertex_count, EdgeId, Permutation, VertexRank};
use crate::pfs::{pfs_explore, PfsConfig};

/// Mean and standard error of a sample.
pub fn mean_stderr(xs: &[f64]) -> Estimate {
    let sum: f64 = xs.iter().sum();
    let sum_sq: f64 = xs.iter().map(|x| x * x).sum();
    Estimate::from_samples(sum, sum_sq, xs.len() as u64)
}

/// `n log n` with the natural logarithm.
pub fn n_log_n(n: usize) -> f64 {
    n as f64 * (n as f64).ln()
}

/// Expected number of isolated vertices, `(n+1)!(1 − p)^n`.
pub fn lambda(n: usize, p: f64) -> f64 {
    factorial(n + 1) as f64 * (1.0 - p).powi(n as i32)
}

/// The `p` with `(n+1)!(1 − p)^n = λ`.
pub fn p_from_lambda(n: usize, lam: f64) -> Result<f64> {
    let total = factorial(n + 1) as f64;
    if !(0.0..=total).contains(&lam) {
        return Err(Error::InfeasibleLambda { lambda: lam, n });
    }
    Ok(1.0 - (lam / total).powf(1.0 / n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// Grid values are `c`, with `p = c/n`.
    C,
    /// Grid values are `p`.
    P,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n: usize,
    pub kind: GridKind,
    pub grid: Vec<f64>,
    pub trials: u64,
    pub base_seed: u64,
    pub r: Option<u64>,
}

impl SweepSpec {
    pub fn over_c(n: usize, grid: Vec<f64>, trials: u64, base_seed: u64) -> Self {
        SweepSpec { n, kind: GridKind::C, grid, trials, base_seed, r: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::InvalidParameter("grid must be nonempty".into()));
        }
        if self.grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter("grid must be sorted ascending".into()));
        }
        Ok(())
    }

    /// `(c, p)` for a grid value.
    pub fn point(&self, x: f64) -> (f64, f64) {
        match self.kind {
            GridKind::C => (x, x / self.n as f64),
            GridKind::P => (x * self.n as f64, x),
        }
    }
}

/// One grid point of a sweep, averaged over trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub c: f64,
    pub p: f64,
    pub giant_fraction: f64,
    pub giant_fraction_stderr: f64,
    pub gamma_c: f64,
    pub largest: f64,
    pub second_largest: f64,
    pub second_largest_stderr: f64,
    pub second_over_nlogn: f64,
    pub isolated: f64,
    pub isolated_stderr: f64,
    pub connectivity_rate: f64,
    pub connectivity_stderr: f64,
    pub lambda: f64,
    pub tree_components_geq_n: f64,
    pub count_geq_r: f64,
    pub trials: u64,
}

pub const SWEEP_CSV_HEADER: &str = "n,c,p,giant_fraction,giant_fraction_stderr,gamma_c,largest,second_largest,\
second_largest_stderr,second_over_nlogn,isolated,isolated_stderr,connectivity_rate,connectivity_stderr,lambda,\
tree_components_geq_n,count_geq_r,trials";

impl SweepRow {
    pub fn csv_row(&self) -> String {
        let f = [
            self.c,
            self.p,
            self.giant_fraction,
            self.giant_fraction_stderr,
            self.gamma_c,
            self.largest,
            self.second_largest,
            self.second_largest_stderr,
            self.second_over_nlogn,
            self.isolated,
            self.isolated_stderr,
            self.connectivity_rate,
            self.connectivity_stderr,
            self.lambda,
            self.tree_components_geq_n,
            self.count_geq_r,
        ];
        let body: Vec<String> = f.iter().map(|&x| sig9(x)).collect();
        format!("{},{},{}", self.n, body.join(","), self.trials)
    }
}

/// Per-trial measurements of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub seed: u64,
    pub giant_fraction: f64,
    pub largest: u64,
    pub second_largest: u64,
    pub isolated: u64,
    pub connected: bool,
    pub tree_components_geq_n: u64,
    pub count_geq_r: u64,
}

pub fn trial(cfg: &PercolationConfig, limit: &EnumerationLimit) -> Result<TrialStats> {
    let labels = label_components(cfg, limit)?;
    let report = labels.report(cfg.threshold());
    let oracle = cfg.oracle();
    let trees = labels.tree_components(cfg.n as u64, |e| oracle.edge_open(e, cfg.p));
    Ok(TrialStats {
        seed: cfg.seed,
        giant_fraction: report.giant_fraction,
        largest: report.largest,
        second_largest: report.second_largest,
        isolated: report.isolated_count,
        connected: report.connected,
        tree_components_geq_n: trees,
        count_geq_r: report.count_in_components_geq_r,
    })
}

/// Runs trials with seeds `base_seed + i` in parallel, in seed order.
pub fn run_trials(n: usize, p: f64, r: Option<u64>, trials: u64, base_seed: u64, limit: &EnumerationLimit) -> Result<Vec<TrialStats>> {
    limit.check(n)?;
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut cfg = PercolationConfig::new(n, p, base_seed.wrapping_add(i));
            cfg.r = r;
            trial(&cfg, limit)
        })
        .collect()
}

pub fn sweep(spec: &SweepSpec, limit: &EnumerationLimit) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    spec.grid
        .iter()
        .map(|&x| {
            let (c, p) = spec.point(x);
            let stats = run_trials(spec.n, p, spec.r, spec.trials, spec.base_seed, limit)?;
            let col = |f: &dyn Fn(&TrialStats) -> f64| mean_stderr(&stats.iter().map(f).collect::<Vec<_>>());
            let giant = col(&|t| t.giant_fraction);
            let second = col(&|t| t.second_largest as f64);
            let isolated = col(&|t| t.isolated as f64);
            let connected = col(&|t| if t.connected { 1.0 } else { 0.0 });
            Ok(SweepRow {
                n: spec.n,
                c,
                p,
                giant_fraction: giant.estimate,
                giant_fraction_stderr: giant.stderr,
                gamma_c: if c > 0.0 { solve_gamma(c)? } else { 0.0 },
                largest: col(&|t| t.largest as f64).estimate,
                second_largest: second.estimate,
                second_largest_stderr: second.stderr,
                second_over_nlogn: second.estimate / n_log_n(spec.n),
                isolated: isolated.estimate,
                isolated_stderr: isolated.stderr,
                connectivity_rate: connected.estimate,
                connectivity_stderr: connected.stderr,
                lambda: lambda(spec.n, p),
                tree_components_geq_n: col(&|t| t.tree_components_geq_n as f64).estimate,
                count_geq_r: col(&|t| t.count_geq_r as f64).estimate,
                trials: spec.trials,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivitySpec {
    pub n: usize,
    pub lambdas: Vec<f64>,
    pub trials: u64,
    pub base_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityRow {
    pub n: usize,
    pub lambda: f64,
    pub p: f64,
    pub connectivity_rate: f64,
    pub connectivity_stderr: f64,
    pub limit_rate: f64,
    pub isolated: f64,
    pub isolated_stderr: f64,
    pub trials: u64,
}

pub const CONNECTIVITY_CSV_HEADER: &str =
    "n,lambda,p,connectivity_rate,connectivity_stderr,limit_rate,isolated,isolated_stderr,trials";

impl ConnectivityRow {
    pub fn csv_row(&self) -> String {
        let f = [
            self.lambda,
            self.p,
            self.connectivity_rate,
            self.connectivity_stderr,
            self.limit_rate,
            self.isolated,
            self.isolated_stderr,
        ];
        let body: Vec<String> = f.iter().map(|&x| sig9(x)).collect();
        format!("{},{},{}", self.n, body.join(","), self.trials)
    }
}

pub fn connectivity(spec: &ConnectivitySpec, limit: &EnumerationLimit) -> Result<Vec<ConnectivityRow>> {
    if spec.trials == 0 || spec.lambdas.is_empty() {
        return Err(Error::InvalidParameter("need at least one lambda and one trial".into()));
    }
    spec.lambdas
        .iter()
        .map(|&lam| {
            let p = p_from_lambda(spec.n, lam)?;
            let stats = run_trials(spec.n, p, None, spec.trials, spec.base_seed, limit)?;
            let conn = mean_stderr(&stats.iter().map(|t| if t.connected { 1.0 } else { 0.0 }).collect::<Vec<_>>());
            let iso = mean_stderr(&stats.iter().map(|t| t.isolated as f64).collect::<Vec<_>>());
            Ok(ConnectivityRow {
                n: spec.n,
                lambda: lam,
                p,
                connectivity_rate: conn.estimate,
                connectivity_stderr: conn.stderr,
                limit_rate: (-lam).exp(),
                isolated: iso.estimate,
                isolated_stderr: iso.stderr,
                trials: spec.trials,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingSummary {
    pub n: usize,
    pub trials: u64,
    pub agreement: f64,
    /// `t_connect − t_min_deg_1` → number of seeds.
    pub gaps: BTreeMap<u64, u64>,
    pub runs: Vec<HittingTimes>,
}

pub const HITTING_CSV_HEADER: &str = "n,seed,t_min_deg_1,t_connect,agree,gap";

impl HittingSummary {
    pub fn csv_rows(&self, base_seed: u64) -> Vec<String> {
        self.runs
            .iter()
            .enumerate()
            .map(|(i, h)| {
                format!(
                    "{},{},{},{},{},{}",
                    self.n,
                    base_seed.wrapping_add(i as u64),
                    h.t_min_deg_1,
                    h.t_connect,
                    h.agree,
                    h.t_connect - h.t_min_deg_1
                )
            })
            .collect()
    }
}

pub fn hitting_stats(n: usize, trials: u64, base_seed: u64, limit: &EnumerationLimit) -> Result<HittingSummary> {
    limit.check(n)?;
    let runs: Vec<HittingTimes> = (0..trials)
        .into_par_iter()
        .map(|i| hitting_times_with(n, base_seed.wrapping_add(i), limit))
        .collect::<Result<_>>()?;
    let mut gaps = BTreeMap::new();
    for h in &runs {
        *gaps.entry(h.t_connect - h.t_min_deg_1).or_insert(0) += 1;
    }
    let agreement = runs.iter().filter(|h| h.agree).count() as f64 / trials.max(1) as f64;
    Ok(HittingSummary { n, trials, agreement, gaps, runs })
}

/// Compares graph distance under `neighbors` with inversion-set Hamming
/// distance for every pair of vertices of `Perm(n)`. Returns the first
/// disagreeing pair.
pub fn isometry_check(
    n: usize,
    neighbors: impl Fn(&Permutation) -> Vec<Permutation> + Sync,
) -> std::result::Result<u64, String> {
    let all: Vec<Permutation> = Permutation::all(n).map_err(|e| e.to_string())?.collect();
    let sets: Vec<_> = all.iter().map(|x| x.inversion_set()).collect();
    let adj: Vec<Vec<usize>> = all.iter().map(|x| neighbors(x).iter().map(|y| y.rank().0 as usize).collect()).collect();
    let checked: Vec<std::result::Result<u64, String>> = (0..all.len())
        .into_par_iter()
        .map(|s| {
            let mut dist = vec![usize::MAX; all.len()];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            for t in 0..all.len() {
                let h = sets[s].hamming(&sets[t]);
                if dist[t] != h {
                    return Err(format!("{} to {}: graph distance {} but Hamming {h}", all[s], all[t], dist[t] as i64));
                }
            }
            Ok(all.len() as u64)
        })
        .collect();
    checked.into_iter().sum()
}

/// Adjacent-position swaps: the deliberately wrong generator action.
pub fn position_swap_neighbors(x: &Permutation) -> Vec<Permutation> {
    (0..x.n())
        .map(|j| {
            let mut w = x.word().to_vec();
            w.swap(j, j + 1);
            Permutation::new(w).expect("swap keeps a bijection")
        })
        .collect()
}

/// A uniformly random face of `Perm(n)`: a random ordered partition of positions.
pub fn random_face<R: Rng>(n: usize, rng: &mut R) -> Result<FaceChain> {
    let mut positions: Vec<u8> = (1..=n as u8 + 1).collect();
    for i in (1..positions.len()).rev() {
        positions.swap(i, rng.random_range(0..=i));
    }
    let mut blocks = vec![vec![positions[0]]];
    for &p in &positions[1..] {
        if rng.random_bool(0.35) {
            blocks.push(vec![p]);
        } else {
            blocks.last_mut().expect("nonempty").push(p);
        }
    }
    FaceChain::new(blocks)
}

/// A uniformly random member of a face.
pub fn random_member<R: Rng>(face: &FaceChain, rng: &mut R) -> Permutation {
    let mut word = vec![0u8; face.n() + 1];
    for (j, block) in face.blocks().iter().enumerate() {
        let (lo, hi) = face.value_range(j);
        let mut vals: Vec<u8> = (lo as u8..=hi as u8).collect();
        for i in (1..vals.len()).rev() {
            vals.swap(i, rng.random_range(0..=i));
        }
        for (&pos, &v) in block.iter().zip(&vals) {
            word[pos as usize - 1] = v;
        }
    }
    Permutation::new(word).expect("block fill is a bijection")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionCheck {
    pub trials: u64,
    pub violations: u64,
    /// Returned faces whose dimension beat the guaranteed bound.
    pub above_bound: u64,
    pub faces: u64,
}

/// Random projection instances in random host faces. With `exhaustive`,
/// disjointness is checked on explicit member sets; otherwise with the
/// face intersection test.
pub fn projection_check(n: usize, trials: u64, max_x: usize, seed: u64, exhaustive: bool) -> Result<ProjectionCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ProjectionCheck { trials, violations: 0, above_bound: 0, faces: 0 };
    for t in 0..trials {
        let host = if t % 4 == 0 { FaceChain::full(n)? } else { random_face(n, &mut rng)? };
        let size = rng.random_range(1..=max_x).min(host.member_count().min(64) as usize);
        let mut xs: Vec<Permutation> = Vec::new();
        while xs.len() < size {
            let x = random_member(&host, &mut rng);
            if !xs.contains(&x) {
                xs.push(x);
            }
        }
        let host = FaceGraph::from(host);
        let faces = project(&host, &xs)?;
        let bound = host.dimension() as i64 - (xs.len() as i64 - 1);
        let mut bad = false;
        for (x, f) in xs.iter().zip(&faces) {
            out.faces += 1;
            bad |= !f.contains_unchecked(x) || (f.dimension() as i64) < bound;
            if f.dimension() as i64 > bound {
                out.above_bound += 1;
            }
            bad |= f.blocks().iter().any(|b| !host.blocks().iter().any(|h| b.iter().all(|p| h.contains(p))));
        }
        if exhaustive {
            let mut seen = HashSet::new();
            for f in &faces {
                for m in f.members() {
                    bad |= !seen.insert(m.rank().0) || !host.contains_unchecked(&m);
                }
            }
        } else {
            for i in 0..faces.len() {
                for j in i + 1..faces.len() {
                    bad |= faces[i].intersects(&faces[j]);
                }
            }
        }
        out.violations += bad as u64;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PfsSoundness {
    pub runs: u64,
    pub outside_component: u64,
    pub repeated_queries: u64,
    pub invalid_queries: u64,
    pub invariant_failures: u64,
    pub explored_total: u64,
}

impl PfsSoundness {
    pub fn clean(&self) -> bool {
        self.outside_component == 0 && self.repeated_queries == 0 && self.invalid_queries == 0 && self.invariant_failures == 0
    }
}

/// Runs PFS from a random vertex for each seed with per-round invariant
/// checks, and compares the explored set with the exact component.
pub fn pfs_soundness(n: usize, seeds: u64, base_seed: u64) -> Result<PfsSoundness> {
    let host = FaceGraph::full(n)?;
    let limit = EnumerationLimit::default();
    let ps = [0.2, 0.35, 0.5, 0.7, 0.9];
    let runs: Vec<PfsSoundness> = (0..seeds)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let p = ps[i as usize % ps.len()] * 2.0 / n as f64;
            let p = p.min(1.0);
            let cfg = PercolationConfig::new(n, p, seed);
            let labels = label_components(&cfg, &limit)?;
            let v = Permutation::unrank(n, VertexRank(split_seed(seed, 1) % vertex_count(n)))?;
            let mut out = PfsSoundness { runs: 1, outside_component: 0, repeated_queries: 0, invalid_queries: 0, invariant_failures: 0, explored_total: 0 };
            let state = match pfs_explore(&host, &v, &cfg.oracle(), &PfsConfig::plain(p).checked(true)) {
                Ok(s) => s,
                Err(Error::InvalidParameter(_)) => {
                    out.invariant_failures = 1;
                    return Ok(out);
                }
                Err(e) => return Err(e),
            };
            let root = labels.component_of(v.rank().0);
            out.outside_component = state.explored.keys().filter(|x| labels.component_of(x.rank().0) != root).count() as u64;
            out.repeated_queries = state.repeat_queries();
            out.invalid_queries = state.queried_edges().iter().filter(|&&e| !valid_edge(n, e)).count() as u64;
            out.explored_total = state.explored_count() as u64;
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(runs.into_iter().fold(
        PfsSoundness { runs: 0, outside_component: 0, repeated_queries: 0, invalid_queries: 0, invariant_failures: 0, explored_total: 0 },
        |a, b| PfsSoundness {
            runs: a.runs + b.runs,
            outside_component: a.outside_component + b.outside_component,
            repeated_queries: a.repeated_queries + b.repeated_queries,
            invalid_queries: a.invalid_queries + b.invalid_queries,
            invariant_failures: a.invariant_failures + b.invariant_failures,
            explored_total: a.explored_total + b.explored_total,
        },
    ))
}

/// Whether `e` is the canonical id of an edge of `Perm(n)`.
pub fn valid_edge(n: usize, e: EdgeId) -> bool {
    let (low, i) = e.decode(n);
    match Permutation::unrank(n, low) {
        Ok(x) => x.edge_id(i).map(|id| id == e).unwrap_or(false),
        Err(_) => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityCheck {
    pub seeds: u64,
    pub edge_violations: u64,
    pub largest_violations: u64,
}

/// For each seed, checks that open edge sets and the largest component are
/// nondecreasing along the sorted `grid` of densities.
pub fn coupling_monotonicity(n: usize, grid: &[f64], seeds: u64, base_seed: u64) -> Result<MonotonicityCheck> {
    let limit = EnumerationLimit::default();
    limit.check(n)?;
    let per_seed: Vec<(u64, u64)> = (0..seeds)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let oracle = EdgeOracle::new(seed, n);
            let mut edge_bad = 0u64;
            for_each_edge(n, |_, _, e| {
                let open: Vec<bool> = grid.iter().map(|&p| oracle.edge_open(e, p)).collect();
                if open.windows(2).any(|w| w[0] && !w[1]) {
                    edge_bad += 1;
                }
            });
            let largest: Vec<u64> = grid
                .iter()
                .map(|&p| label_components(&PercolationConfig::new(n, p, seed), &limit).map(|l| l.report(1).largest))
                .collect::<Result<_>>()?;
            let largest_bad = largest.windows(2).filter(|w| w[0] > w[1]).count() as u64;
            Ok((edge_bad, largest_bad))
        })
        .collect::<Result<_>>()?;
    Ok(MonotonicityCheck {
        seeds,
        edge_violations: per_seed.iter().map(|x| x.0).sum(),
        largest_violations: per_seed.iter().map(|x| x.1).sum(),
    })
}

/// Distinct random vertices of `Perm(n)`.
pub fn random_vertices<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<Permutation> {
    let count = vertex_count(n) as usize;
    sample(rng, count, k.min(count))
        .into_iter()
        .map(|r| Permutation::unrank(n, VertexRank(r as u64)).expect("rank in range"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_roundtrip() {
        for n in 2..=8 {
            for lam in [0.0, 0.5, 1.0, 3.0] {
                let p = p_from_lambda(n, lam).unwrap();
                assert!((lambda(n, p) - lam).abs() < 1e-9);
            }
            assert_eq!(p_from_lambda(n, 0.0).unwrap(), 1.0);
            assert!(p_from_lambda(n, -1.0).is_err());
            assert!(p_from_lambda(n, 1e12).is_err());
        }
    }

    #[test]
    fn sweep_rows_are_reproducible() {
        let spec = SweepSpec::over_c(4, vec![0.5, 2.0], 8, 3);
        let a = sweep(&spec, &EnumerationLimit::default()).unwrap();
        let b = sweep(&spec, &EnumerationLimit::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert!(a.iter().all(|r| (0.0..=1.0).contains(&r.giant_fraction) && r.lambda >= 0.0));
        assert!(a[1].giant_fraction >= a[0].giant_fraction);
        assert_eq!(a[0].csv_row().split(',').count(), SWEEP_CSV_HEADER.split(',').count());
    }

    #[test]
    fn sweep_validation() {
        let lim = EnumerationLimit::default();
        assert!(sweep(&SweepSpec::over_c(4, vec![], 2, 0), &lim).is_err());
        assert!(sweep(&SweepSpec::over_c(4, vec![2.0, 1.0], 2, 0), &lim).is_err());
        assert!(sweep(&SweepSpec::over_c(4, vec![1.0], 0, 0), &lim).is_err());
    }

    #[test]
    fn full_density_connects() {
        let rows = connectivity(
            &ConnectivitySpec { n: 4, lambdas: vec![0.0], trials: 5, base_seed: 0 },
            &EnumerationLimit::default(),
        )
        .unwrap();
        assert_eq!(rows[0].connectivity_rate, 1.0);
        assert_eq!(rows[0].isolated, 0.0);
    }

    #[test]
    fn hitting_summary_consistency() {
        let s = hitting_stats(4, 30, 0, &EnumerationLimit::default()).unwrap();
        assert_eq!(s.runs.len(), 30);
        assert_eq!(s.gaps.values().sum::<u64>(), 30);
        assert_eq!(s.agreement, s.gaps.get(&0).copied().unwrap_or(0) as f64 / 30.0);
        assert_eq!(s.csv_rows(0).len(), 30);
    }

    #[test]
    fn isometry_and_mutation() {
        for n in 1..=4 {
            let ok = isometry_check(n, |x| x.neighbors().into_iter().map(|(_, y)| y).collect());
            assert!(ok.is_ok());
        }
        assert!(isometry_check(3, position_swap_neighbors).is_err());
    }

    #[test]
    fn random_members_belong() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let f = random_face(6, &mut rng).unwrap();
            let x = random_member(&f, &mut rng);
            assert!(f.contains(&x).unwrap());
        }
    }

    #[test]
    fn projection_checks_clean() {
        for n in 1..=4 {
            assert_eq!(projection_check(n, 200, 5, n as u64, true).unwrap().violations, 0);
        }
        assert_eq!(projection_check(8, 300, 5, 8, false).unwrap().violations, 0);
    }

    #[test]
    fn pfs_soundness_small() {
        let s = pfs_soundness(3, 100, 0).unwrap();
        assert!(s.clean(), "{s:?}");
        assert_eq!(s.runs, 100);
    }

    #[test]
    fn edge_validity() {
        let x = Permutation::new(vec![2, 1, 3]).unwrap();
        assert!(valid_edge(2, x.edge_id(1).unwrap()));
        assert!(!valid_edge(2, EdgeId(1_000)));
        // at [1,2,3] the edge for value 1 is canonical; at [2,1,3] it is not
        let id = Permutation::identity(2).unwrap().edge_id(1).unwrap();
        assert_eq!(id, x.edge_id(1).unwrap());
        assert!(!valid_edge(2, EdgeId(x.rank().0 * 2)));
    }

    #[test]
    fn monotone_coupling_small() {
        let grid: Vec<f64> = (1..=10).map(|i| i as f64 * 0.1).collect();
        let m = coupling_monotonicity(4, &grid, 20, 0).unwrap();
        assert_eq!((m.edge_violations, m.largest_violations), (0, 0));
    }
}
