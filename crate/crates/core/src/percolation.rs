//! Exact component structure of `Perm(n)_p` by streaming every edge through
//! union-find, plus the two-round exposure and hitting-time experiments.

use serde::{Deserialize, Serialize};

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::oracle::{check_probability, EdgeOracle};
use crate::perm::{check_dimension, edge_count, factorial, next_lex, vertex_count, EdgeId};

/// Default largest `n` for full enumeration.
pub const DEFAULT_MAX_N: usize = 9;
/// Largest `n` accepted even with an override (12! ranks still fit in `u32`).
pub const HARD_MAX_N: usize = 11;
/// Environment variable overriding [`DEFAULT_MAX_N`].
pub const MAX_N_ENV: &str = "PERMUPERC_MAX_N";

/// Bytes of union-find state needed to enumerate `Perm(n)`.
pub fn memory_estimate(n: usize) -> u64 {
    8 * vertex_count(n)
}

/// Cap on the dimension accepted by full enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationLimit {
    pub max_n: usize,
}

impl Default for EnumerationLimit {
    fn default() -> Self {
        EnumerationLimit { max_n: DEFAULT_MAX_N }
    }
}

impl EnumerationLimit {
    pub fn new(max_n: usize) -> Result<Self> {
        if max_n > HARD_MAX_N {
            return Err(Error::InvalidParameter(format!(
                "enumeration cap {max_n} exceeds the hard limit {HARD_MAX_N}"
            )));
        }
        Ok(EnumerationLimit { max_n })
    }

    /// Reads [`MAX_N_ENV`], falling back to the default cap.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_N_ENV) {
            Ok(s) => {
                let max_n = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("{MAX_N_ENV}={s:?} is not an integer")))?;
                EnumerationLimit::new(max_n)
            }
            Err(_) => Ok(EnumerationLimit::default()),
        }
    }

    /// Returns the memory estimate for `n`, or an error if `n` is over the cap.
    pub fn check(&self, n: usize) -> Result<u64> {
        check_dimension(n)?;
        let bytes = memory_estimate(n.min(HARD_MAX_N + 1));
        if n > self.max_n {
            return Err(Error::EnumerationTooLarge { n, cap: self.max_n, hard_cap: HARD_MAX_N, bytes });
        }
        Ok(bytes)
    }
}

/// Parameters of one percolation sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationConfig {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    /// Large-cluster threshold; defaults to `n²`.
    pub r: Option<u64>,
}

impl PercolationConfig {
    pub fn new(n: usize, p: f64, seed: u64) -> Self {
        PercolationConfig { n, p, seed, r: None }
    }

    /// `p = c / n`.
    pub fn from_c(n: usize, c: f64, seed: u64) -> Self {
        PercolationConfig::new(n, c / n as f64, seed)
    }

    pub fn with_r(mut self, r: u64) -> Self {
        self.r = Some(r);
        self
    }

    pub fn threshold(&self) -> u64 {
        self.r.unwrap_or((self.n * self.n) as u64)
    }

    pub fn oracle(&self) -> EdgeOracle {
        EdgeOracle::new(self.seed, self.n)
    }

    pub fn validate(&self) -> Result<()> {
        check_dimension(self.n)?;
        check_probability(self.p)?;
        if self.r == Some(0) {
            return Err(Error::InvalidParameter("r must be at least 1".into()));
        }
        Ok(())
    }
}

/// Summary of the component structure of one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub component_sizes: Vec<u64>,
    pub num_components: u64,
    pub isolated_count: u64,
    pub largest: u64,
    pub second_largest: u64,
    pub giant_fraction: f64,
    pub connected: bool,
    pub count_in_components_geq_r: u64,
}

/// Calls `f(low_rank, high_rank, edge)` for every edge of `Perm(n)` exactly
/// once, in increasing order of the smaller endpoint.
///
/// Words are walked in lexicographic order, so the rank is a counter; an
/// edge is canonical at `π` when value `i` precedes `i + 1`, and then the
/// other endpoint's rank is `rank + (n - a)!` for `a` the position of `i`.
pub fn for_each_edge(n: usize, mut f: impl FnMut(u32, u32, EdgeId)) {
    let len = n + 1;
    let mut word: Vec<u8> = (1..=len as u8).collect();
    let mut pos = vec![0usize; len + 1];
    let mut rank = 0u64;
    loop {
        for (j, &v) in word.iter().enumerate() {
            pos[v as usize] = j;
        }
        for i in 1..=n {
            let a = pos[i];
            if a < pos[i + 1] {
                let other = rank + factorial(n - a);
                f(rank as u32, other as u32, EdgeId(rank * n as u64 + (i as u64 - 1)));
            }
        }
        if !next_lex(&mut word) {
            break;
        }
        rank += 1;
    }
}

/// Component labelling of one sample.
#[derive(Debug, Clone)]
pub struct ClusterLabels {
    pub n: usize,
    root: Vec<u32>,
    size_by_root: Vec<u32>,
    components: u64,
}

impl ClusterLabels {
    pub fn vertex_count(&self) -> usize {
        self.root.len()
    }

    /// Representative of the component containing vertex `rank`.
    pub fn component_of(&self, rank: u64) -> u32 {
        self.root[rank as usize]
    }

    pub fn component_size(&self, rank: u64) -> u64 {
        self.size_by_root[self.root[rank as usize] as usize] as u64
    }

    pub fn num_components(&self) -> u64 {
        self.components
    }

    /// Component sizes, descending.
    pub fn sizes_desc(&self) -> Vec<u64> {
        let mut sizes: Vec<u64> = self
            .root
            .iter()
            .enumerate()
            .filter(|&(x, &r)| x as u32 == r)
            .map(|(_, &r)| self.size_by_root[r as usize] as u64)
            .collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    pub fn report(&self, r: u64) -> ComponentReport {
        let sizes = self.sizes_desc();
        let total = self.vertex_count() as u64;
        let largest = sizes.first().copied().unwrap_or(0);
        ComponentReport {
            num_components: sizes.len() as u64,
            isolated_count: sizes.iter().rev().take_while(|&&s| s == 1).count() as u64,
            largest,
            second_largest: sizes.get(1).copied().unwrap_or(0),
            giant_fraction: largest as f64 / total as f64,
            connected: sizes.len() == 1,
            count_in_components_geq_r: sizes.iter().filter(|&&s| s >= r).sum(),
            component_sizes: sizes,
        }
    }

    /// Number of components with `lo <= size <= hi`.
    pub fn census(&self, lo: u64, hi: u64) -> u64 {
        self.sizes_desc().into_iter().filter(|s| (lo..=hi).contains(s)).count() as u64
    }

    /// Fraction of vertices within host distance two of a vertex lying in a
    /// component of size at least `r`.
    pub fn distance2_coverage(&self, r: u64) -> f64 {
        let n = self.n;
        let mut marked: Vec<bool> = (0..self.vertex_count() as u64).map(|x| self.component_size(x) >= r).collect();
        for _ in 0..2 {
            let mut next = marked.clone();
            for_each_edge(n, |a, b, _| {
                if marked[a as usize] {
                    next[b as usize] = true;
                }
                if marked[b as usize] {
                    next[a as usize] = true;
                }
            });
            marked = next;
        }
        marked.iter().filter(|&&m| m).count() as f64 / self.vertex_count() as f64
    }

    /// Number of components of size at least `min_size` that are trees,
    /// given the open-edge predicate that produced this labelling.
    pub fn tree_components(&self, min_size: u64, open: impl Fn(EdgeId) -> bool) -> u64 {
        let mut edges = vec![0u32; self.vertex_count()];
        for_each_edge(self.n, |a, _, e| {
            if open(e) {
                edges[self.root[a as usize] as usize] += 1;
            }
        });
        self.root
            .iter()
            .enumerate()
            .filter(|&(x, &r)| x as u32 == r)
            .filter(|&(_, &r)| {
                let size = self.size_by_root[r as usize] as u64;
                size >= min_size && edges[r as usize] as u64 == size - 1
            })
            .count() as u64
    }
}

/// Labels the components of `Perm(n)` restricted to edges where `open` holds.
pub fn label_with(n: usize, limit: &EnumerationLimit, open: impl Fn(EdgeId) -> bool) -> Result<ClusterLabels> {
    limit.check(n)?;
    let mut dsu = DisjointSets::new(vertex_count(n) as usize);
    for_each_edge(n, |a, b, e| {
        if open(e) {
            dsu.union(a, b);
        }
    });
    let components = dsu.sets() as u64;
    let (root, size_by_root) = dsu.into_labels();
    Ok(ClusterLabels { n, root, size_by_root, components })
}

/// Component labelling of `Perm(n)_p` under the configured oracle.
pub fn label_components(cfg: &PercolationConfig, limit: &EnumerationLimit) -> Result<ClusterLabels> {
    cfg.validate()?;
    let oracle = cfg.oracle();
    label_with(cfg.n, limit, |e| oracle.edge_open(e, cfg.p))
}

/// Full component report with the default enumeration cap.
pub fn enumerate_components(cfg: &PercolationConfig) -> Result<ComponentReport> {
    enumerate_components_with(cfg, &EnumerationLimit::default())
}

pub fn enumerate_components_with(cfg: &PercolationConfig, limit: &EnumerationLimit) -> Result<ComponentReport> {
    Ok(label_components(cfg, limit)?.report(cfg.threshold()))
}

/// `p` of the union `G_{p1} ∪ G_{p2}`: `1 - (1 - p1)(1 - p2)`.
pub fn combined_probability(p1: f64, p2: f64) -> f64 {
    1.0 - (1.0 - p1) * (1.0 - p2)
}

/// Sprinkling density `p2` with `(1 - p1)(1 - p2) = 1 - p`.
pub fn sprinkle_probability(p: f64, p1: f64) -> Result<f64> {
    check_probability(p)?;
    check_probability(p1)?;
    if p1 > p {
        return Err(Error::InvalidParameter(format!("first-round density {p1} exceeds target {p}")));
    }
    if p1 == 1.0 {
        return Ok(0.0);
    }
    Ok((1.0 - (1.0 - p) / (1.0 - p1)).clamp(0.0, 1.0))
}

/// Two-round exposure: `G1` keeps edges with `u < p1`, `G2` those with
/// `u < p` where `1 - p = (1 - p1)(1 - p2)`, so `G1 ⊆ G2` and `G2 ~ G_p`.
pub fn two_round_exposure(n: usize, p1: f64, p2: f64, seed: u64) -> Result<(ComponentReport, ComponentReport)> {
    check_probability(p1)?;
    check_probability(p2)?;
    let p = combined_probability(p1, p2);
    let first = enumerate_components(&PercolationConfig::new(n, p1, seed))?;
    let second = enumerate_components(&PercolationConfig::new(n, p, seed))?;
    Ok((first, second))
}

/// Stopping times of the random edge process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HittingTimes {
    /// Number of inserted edges when the last isolated vertex disappears.
    pub t_min_deg_1: u64,
    /// Number of inserted edges when the graph becomes connected.
    pub t_connect: u64,
    pub agree: bool,
}

/// Inserts all edges in increasing order of `(u_e, EdgeId)` and records the
/// two hitting times.
pub fn hitting_times(n: usize, seed: u64) -> Result<HittingTimes> {
    hitting_times_with(n, seed, &EnumerationLimit::default())
}

pub fn hitting_times_with(n: usize, seed: u64, limit: &EnumerationLimit) -> Result<HittingTimes> {
    limit.check(n)?;
    let oracle = EdgeOracle::new(seed, n);
    let mut edges: Vec<(f64, EdgeId, u32, u32)> = Vec::with_capacity(edge_count(n) as usize);
    for_each_edge(n, |a, b, e| edges.push((oracle.edge_uniform(e), e, a, b)));
    edges.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let count = vertex_count(n) as usize;
    let mut degree = vec![0u8; count];
    let mut isolated = count;
    let mut dsu = DisjointSets::new(count);
    let mut t_min = None;
    for (t, &(_, _, a, b)) in edges.iter().enumerate() {
        for x in [a, b] {
            if degree[x as usize] == 0 {
                isolated -= 1;
            }
            degree[x as usize] += 1;
        }
        dsu.union(a, b);
        if t_min.is_none() && isolated == 0 {
            t_min = Some(t as u64 + 1);
        }
        if dsu.sets() == 1 {
            let t_connect = t as u64 + 1;
            let t_min_deg_1 = t_min.expect("connected graph has no isolated vertex");
            return Ok(HittingTimes { t_min_deg_1, t_connect, agree: t_min_deg_1 == t_connect });
        }
    }
    unreachable!("Perm(n) is connected");
}

/// Fraction of vertices within distance two of `V_{>=r}`.
pub fn distance2_coverage(cfg: &PercolationConfig, r: u64) -> Result<f64> {
    Ok(label_components(cfg, &EnumerationLimit::default())?.distance2_coverage(r))
}

/// Number of components with `lo <= size <= hi`.
pub fn medium_component_census(cfg: &PercolationConfig, lo: u64, hi: u64) -> Result<u64> {
    Ok(label_components(cfg, &EnumerationLimit::default())?.census(lo, hi))
}

/// One CSV row `n,p,seed,largest,second_largest,num_components,isolated,connected,giant_fraction`.
pub fn report_csv_row(cfg: &PercolationConfig, report: &ComponentReport) -> String {
    use crate::format::sig9;
    format!(
        "{},{},{},{},{},{},{},{},{}",
        cfg.n,
        sig9(cfg.p),
        cfg.seed,
        report.largest,
        report.second_largest,
        report.num_components,
        report.isolated_count,
        report.connected,
        sig9(report.giant_fraction)
    )
}

pub const REPORT_CSV_HEADER: &str = "n,p,seed,largest,second_largest,num_components,isolated,connected,giant_fraction";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;
    use std::collections::{HashSet, VecDeque};

    #[test]
    fn streamed_edges_match_definition() {
        for n in 1..=5 {
            let mut seen = HashSet::new();
            for_each_edge(n, |a, b, e| {
                assert!(a < b);
                let x = Permutation::unrank(n, crate::perm::VertexRank(a as u64)).unwrap();
                let (low, g) = e.decode(n);
                assert_eq!(low.0, a as u64);
                let y = x.apply_generator(g).unwrap();
                assert_eq!(y.rank().0, b as u64);
                assert_eq!(x.edge_id(g).unwrap(), e);
                assert!(seen.insert(e));
            });
            assert_eq!(seen.len() as u64, edge_count(n));
        }
    }

    #[test]
    fn extremes() {
        for n in 1..=5 {
            let empty = enumerate_components(&PercolationConfig::new(n, 0.0, 1)).unwrap();
            assert_eq!(empty.num_components, vertex_count(n));
            assert_eq!(empty.isolated_count, vertex_count(n));
            assert!(!empty.connected);
            let full = enumerate_components(&PercolationConfig::new(n, 1.0, 1)).unwrap();
            assert!(full.connected);
            assert_eq!(full.largest, vertex_count(n));
            assert_eq!(full.giant_fraction, 1.0);
            assert_eq!(full.second_largest, 0);
        }
    }

    fn bfs_sizes(n: usize, cfg: &PercolationConfig) -> Vec<u64> {
        let oracle = cfg.oracle();
        let all: Vec<Permutation> = Permutation::all(n).unwrap().collect();
        let mut seen = vec![false; all.len()];
        let mut sizes = Vec::new();
        for start in &all {
            if seen[start.rank().0 as usize] {
                continue;
            }
            let mut size = 0;
            let mut queue = VecDeque::from([start.clone()]);
            seen[start.rank().0 as usize] = true;
            while let Some(x) = queue.pop_front() {
                size += 1;
                for (i, y) in x.neighbors() {
                    if oracle.edge_open(x.edge_id(i).unwrap(), cfg.p) && !seen[y.rank().0 as usize] {
                        seen[y.rank().0 as usize] = true;
                        queue.push_back(y);
                    }
                }
            }
            sizes.push(size);
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    #[test]
    fn union_find_matches_bfs() {
        for n in 1..=4 {
            for seed in 0..30 {
                for &p in &[0.1, 0.3, 0.5, 0.8] {
                    let cfg = PercolationConfig::new(n, p, seed);
                    let report = enumerate_components(&cfg).unwrap();
                    assert_eq!(report.component_sizes, bfs_sizes(n, &cfg));
                    assert_eq!(report.component_sizes.iter().sum::<u64>(), vertex_count(n));
                    assert_eq!(report.connected, report.num_components == 1);
                }
            }
        }
    }

    #[test]
    fn hexagon_connectivity_rate() {
        // 6-cycle connected iff at most one edge missing: p^6 + 6 p^5 (1-p) = 7/64 at p = 1/2
        let mut exhaustive = 0u32;
        for mask in 0u32..64 {
            if mask.count_ones() >= 5 {
                exhaustive += 1;
            }
        }
        assert_eq!(exhaustive, 7);
        let trials = 100_000u64;
        let connected = (0..trials)
            .filter(|&s| enumerate_components(&PercolationConfig::new(2, 0.5, s)).unwrap().connected)
            .count();
        let rate = connected as f64 / trials as f64;
        assert!((rate - 7.0 / 64.0).abs() < 0.005, "{rate}");
    }

    #[test]
    fn enumeration_cap() {
        let cfg = PercolationConfig::new(10, 0.5, 0);
        assert!(matches!(enumerate_components(&cfg), Err(Error::EnumerationTooLarge { n: 10, .. })));
        assert!(EnumerationLimit::new(12).is_err());
        assert_eq!(EnumerationLimit::new(10).unwrap().check(10).unwrap(), 8 * 39_916_800);
        assert!(enumerate_components(&PercolationConfig::new(3, 1.5, 0)).is_err());
    }

    #[test]
    fn two_round_structure() {
        let (g1, g2) = two_round_exposure(5, 0.2, 0.0, 9).unwrap();
        assert_eq!(g1, g2);
        let (_, g2) = two_round_exposure(5, 0.0, 0.3, 9).unwrap();
        assert_eq!(g2, enumerate_components(&PercolationConfig::new(5, 0.3, 9)).unwrap());
        for seed in 0..20 {
            let (g1, g2) = two_round_exposure(5, 0.2, 0.15, seed).unwrap();
            assert!(g2.largest >= g1.largest);
            assert!(g2.num_components <= g1.num_components);
        }
        // c = 2 from p1 = 1.5/n and the matching sprinkle
        let n = 7.0;
        let (p, p1) = (2.0 / n, 1.5 / n);
        let p2 = sprinkle_probability(p, p1).unwrap();
        assert!(p2 >= p - p1);
        assert!((n * combined_probability(p1, p2) - 2.0).abs() < 1e-12);
        assert!(sprinkle_probability(0.1, 0.2).is_err());
    }

    #[test]
    fn g1_edges_subset_of_g2() {
        let (p1, p2) = (0.2, 0.25);
        let p = combined_probability(p1, p2);
        for seed in 0..10 {
            let oracle = EdgeOracle::new(seed, 5);
            for_each_edge(5, |_, _, e| assert!(!oracle.edge_open(e, p1) || oracle.edge_open(e, p)));
        }
    }

    #[test]
    fn hitting_time_order() {
        for n in 2..=5 {
            for seed in 0..50 {
                let h = hitting_times(n, seed).unwrap();
                assert!(h.t_connect >= h.t_min_deg_1);
                assert!(h.t_connect >= vertex_count(n) - 1);
            }
        }
    }

    #[test]
    fn hexagon_hitting_agreement() {
        // Exhaustive over all 720 insertion orders of the 6-cycle's edges:
        // connectivity needs 5 edges; agreement iff the last two edges share
        // a vertex.
        fn permutations(items: Vec<usize>) -> Vec<Vec<usize>> {
            if items.len() <= 1 {
                return vec![items];
            }
            let mut out = Vec::new();
            for i in 0..items.len() {
                let mut rest = items.clone();
                let head = rest.remove(i);
                for mut tail in permutations(rest) {
                    tail.insert(0, head);
                    out.push(tail);
                }
            }
            out
        }
        let cycle: Vec<(usize, usize)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        let mut agree = 0;
        let orders = permutations((0..6).collect());
        for order in &orders {
            let mut deg = [0; 6];
            let mut dsu = DisjointSets::new(6);
            let (mut t_min, mut t_conn) = (0, 0);
            for (t, &e) in order.iter().enumerate() {
                let (a, b) = cycle[e];
                deg[a] += 1;
                deg[b] += 1;
                dsu.union(a as u32, b as u32);
                if t_min == 0 && deg.iter().all(|&d| d > 0) {
                    t_min = t + 1;
                }
                if t_conn == 0 && dsu.sets() == 1 {
                    t_conn = t + 1;
                }
            }
            if t_min == t_conn {
                agree += 1;
            }
        }
        let exact = agree as f64 / orders.len() as f64;
        assert!((exact - 0.4).abs() < 1e-12);

        let seeds = 20_000u64;
        let hits = (0..seeds).filter(|&s| hitting_times(2, s).unwrap().agree).count();
        let rate = hits as f64 / seeds as f64;
        assert!((rate - exact).abs() < 0.02, "{rate}");
        assert!(rate < 0.9);
    }

    #[test]
    fn coverage_and_census_extremes() {
        let full = PercolationConfig::new(4, 1.0, 3);
        assert_eq!(distance2_coverage(&full, 120).unwrap(), 1.0);
        let sparse = PercolationConfig::new(4, 0.05, 3);
        assert_eq!(distance2_coverage(&sparse, 1).unwrap(), 1.0);
        assert_eq!(medium_component_census(&full, 2, 100).unwrap(), 0);
        assert_eq!(medium_component_census(&PercolationConfig::new(4, 0.0, 3), 2, 100).unwrap(), 0);
        assert_eq!(medium_component_census(&full, 120, 120).unwrap(), 1);
    }

    #[test]
    fn coverage_matches_brute_force() {
        let cfg = PercolationConfig::new(4, 0.3, 5);
        let labels = label_components(&cfg, &EnumerationLimit::default()).unwrap();
        let all: Vec<Permutation> = Permutation::all(4).unwrap().collect();
        for r in [1, 2, 3, 5, 10] {
            let big: Vec<&Permutation> =
                all.iter().filter(|x| labels.component_size(x.rank().0) >= r).collect();
            let covered = all
                .iter()
                .filter(|x| big.iter().any(|y| x.kendall_distance(y).unwrap() <= 2))
                .count();
            assert_eq!(labels.distance2_coverage(r), covered as f64 / all.len() as f64);
        }
    }

    #[test]
    fn tree_components_by_edge_count() {
        let cfg = PercolationConfig::new(3, 1.0, 0);
        let labels = label_components(&cfg, &EnumerationLimit::default()).unwrap();
        assert_eq!(labels.tree_components(1, |_| true), 0);
        let empty = label_components(&PercolationConfig::new(3, 0.0, 0), &EnumerationLimit::default()).unwrap();
        assert_eq!(empty.tree_components(1, |_| false), 24);
    }

    #[test]
    fn csv_row_format() {
        let cfg = PercolationConfig::new(2, 1.0, 4);
        let report = enumerate_components(&cfg).unwrap();
        assert_eq!(report_csv_row(&cfg, &report), "2,1,4,6,0,1,0,true,1");
        let json = serde_json::to_value(&report).unwrap();
        for key in [
            "component_sizes",
            "num_components",
            "isolated_count",
            "largest",
            "second_largest",
            "giant_fraction",
            "connected",
            "count_in_components_geq_r",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}
