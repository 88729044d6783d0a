//! Oracle suites grouped by module, run by the CLI's `verify` command.

use std::collections::VecDeque;
use std::time::Instant;

use serde::Serialize;

use crate::branching::{solve_gamma, survival_probability_mc, truncated_binomial_mean, truncation_parameters};
use crate::error::{Error, Result};
use crate::experiments::{
    coupling_monotonicity, isometry_check, lambda, mean_stderr, p_from_lambda, pfs_soundness, projection_check,
    run_trials,
};
use crate::face::FaceGraph;
use crate::iso::{
    edge_boundary, face_vertex_set, halfspace_witness, hypercube_face, i_k_all, lambda1_closed_form, laplacian_lambda1,
};
use crate::oracle::EdgeOracle;
use crate::percolation::{label_with, EnumerationLimit};
use crate::perm::{edge_count, factorial, vertex_count, Permutation};
use crate::pfs::{pfs_explore, PfsConfig};
use crate::trees::{count_rooted_trees, tree_count_bounds};

pub const MODULES: [&str; 6] = ["perm-core", "face-graph", "perc-engine", "pfs-explorer", "probab-oracles", "iso-spectral"];

/// Neighbour function of `Perm(n)` used by the graph-structure checks.
pub type Neighbors = fn(&Permutation) -> Vec<Permutation>;

pub fn value_swap_neighbors(x: &Permutation) -> Vec<Permutation> {
    x.neighbors().into_iter().map(|(_, y)| y).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub module: &'static str,
    pub check: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

pub const CHECK_CSV_HEADER: &str = "module,check,status,seconds,detail";

impl CheckResult {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},\"{}\"",
            self.module,
            self.check,
            if self.passed { "pass" } else { "fail" },
            crate::format::sig9(self.seconds),
            self.detail.replace('"', "'")
        )
    }
}

type Check = (&'static str, Box<dyn Fn() -> Result<(bool, String)>>);

fn bfs_eccentricity(n: usize, neighbors: Neighbors) -> Result<usize> {
    let count = vertex_count(n) as usize;
    let mut dist = vec![usize::MAX; count];
    let start = Permutation::identity(n)?;
    dist[0] = 0;
    let mut queue = VecDeque::from([start]);
    let mut far = 0;
    while let Some(x) = queue.pop_front() {
        let d = dist[x.rank().0 as usize];
        far = far.max(d);
        for y in neighbors(&x) {
            let r = y.rank().0 as usize;
            if dist[r] == usize::MAX {
                dist[r] = d + 1;
                queue.push_back(y);
            }
        }
    }
    Ok(far)
}

fn perm_core(neighbors: Neighbors) -> Vec<Check> {
    vec![
        (
            "isometry",
            Box::new(move || {
                for n in 1..=4 {
                    if let Err(e) = isometry_check(n, neighbors) {
                        return Ok((false, format!("n={n}: {e}")));
                    }
                }
                Ok((true, "inversion Hamming = BFS distance for all pairs, n <= 4".into()))
            }),
        ),
        (
            "regularity",
            Box::new(move || {
                for n in 1..=6 {
                    let mut degrees = 0u64;
                    for x in Permutation::all(n)? {
                        let ys = neighbors(&x);
                        if ys.len() != n || Permutation::unrank(n, x.rank())? != x {
                            return Ok((false, format!("n={n}: vertex {x}")));
                        }
                        degrees += ys.len() as u64;
                    }
                    if degrees != 2 * edge_count(n) {
                        return Ok((false, format!("n={n}: degree sum {degrees}")));
                    }
                }
                Ok((true, "n-regular with n(n+1)!/2 edges and rank roundtrip, n <= 6".into()))
            }),
        ),
        (
            "diameter",
            Box::new(move || {
                for n in 1..=5 {
                    let d = bfs_eccentricity(n, neighbors)?;
                    if d != n * (n + 1) / 2 {
                        return Ok((false, format!("n={n}: eccentricity {d}")));
                    }
                }
                Ok((true, "eccentricity of the identity is C(n+1,2), n <= 5".into()))
            }),
        ),
    ]
}

fn face_graph() -> Vec<Check> {
    vec![
        (
            "projection-exhaustive",
            Box::new(|| {
                let mut bad = 0;
                for n in 1..=4 {
                    bad += projection_check(n, 1000, 5, n as u64, true)?.violations;
                }
                Ok((bad == 0, format!("{bad} violations over 4000 instances, n <= 4")))
            }),
        ),
        (
            "projection-random",
            Box::new(|| {
                let c = projection_check(8, 1000, 5, 8, false)?;
                Ok((c.violations == 0, format!("{} violations over {} faces, n = 8", c.violations, c.faces)))
            }),
        ),
    ]
}

fn perc_engine() -> Vec<Check> {
    vec![
        (
            "isolated-mean",
            Box::new(|| {
                let lim = EnumerationLimit::default();
                let mut parts = Vec::new();
                let mut ok = true;
                for n in [5, 6, 7] {
                    let p = p_from_lambda(n, 2.0)?;
                    let runs = run_trials(n, p, None, 200, 0, &lim)?;
                    let est = mean_stderr(&runs.iter().map(|t| t.isolated as f64).collect::<Vec<_>>());
                    ok &= (est.estimate - lambda(n, p)).abs() <= 3.0 * est.stderr;
                    parts.push(format!("n={n}: {:.3} ± {:.3}", est.estimate, est.stderr));
                }
                Ok((ok, format!("{} vs λ = 2", parts.join("; "))))
            }),
        ),
        (
            "hexagon",
            Box::new(|| {
                // the 6-cycle at p = 1/2 is connected with probability 7/64
                let trials = 40_000u64;
                let lim = EnumerationLimit::default();
                let mut hits = 0u64;
                for s in 0..trials {
                    let o = EdgeOracle::new(s, 2);
                    hits += (label_with(2, &lim, |e| o.edge_open(e, 0.5))?.num_components() == 1) as u64;
                }
                let rate = hits as f64 / trials as f64;
                let se = (7.0 / 64.0 * 57.0 / 64.0 / trials as f64).sqrt();
                Ok(((rate - 7.0 / 64.0).abs() <= 4.0 * se, format!("rate {rate:.5} vs 7/64")))
            }),
        ),
        (
            "coupling",
            Box::new(|| {
                let grid: Vec<f64> = (1..=30).map(|i| i as f64 * 0.1 / 6.0).collect();
                let m = coupling_monotonicity(6, &grid, 100, 0)?;
                Ok((
                    m.edge_violations + m.largest_violations == 0,
                    format!("{} edge and {} largest violations", m.edge_violations, m.largest_violations),
                ))
            }),
        ),
    ]
}

fn pfs_explorer() -> Vec<Check> {
    vec![
        (
            "soundness",
            Box::new(|| {
                for n in 1..=4 {
                    let s = pfs_soundness(n, 1000, 0)?;
                    if !s.clean() {
                        return Ok((false, format!("n={n}: {s:?}")));
                    }
                }
                Ok((true, "1000 seeds per n <= 4: inside true component, no repeated queries".into()))
            }),
        ),
        (
            "full-density-tree",
            Box::new(|| {
                for n in 1..=7 {
                    let st = pfs_explore(&FaceGraph::full(n)?, &Permutation::identity(n)?, &EdgeOracle::new(0, n), &PfsConfig::plain(1.0))?;
                    if st.explored_count() != 1 << n {
                        return Ok((false, format!("n={n}: {} explored", st.explored_count())));
                    }
                }
                Ok((true, "p = 1 explores exactly 2^n vertices, n <= 7".into()))
            }),
        ),
    ]
}

fn probab_oracles() -> Vec<Check> {
    vec![
        (
            "gamma",
            Box::new(|| {
                let g = solve_gamma(2.0)?;
                let small = [1.05, 1.1, 1.2, 1.25].iter().all(|&c| solve_gamma(c).is_ok_and(|g| g > c - 1.0));
                Ok(((g - 0.79681213002002).abs() < 1e-12 && small && solve_gamma(1.0)? == 0.0, format!("γ(2) = {g:.12}")))
            }),
        ),
        (
            "gw-survival",
            Box::new(|| {
                let est = survival_probability_mc(1000, 2.0, 60, 20_000, 0)?;
                let g = solve_gamma(2.0)?;
                Ok(((est.estimate - g).abs() <= 0.02, format!("{:.4} ± {:.4} vs γ(2) = {g:.4}", est.estimate, est.stderr)))
            }),
        ),
        (
            "truncated-means",
            Box::new(|| {
                let mut worst = f64::INFINITY;
                for beta in [0.1, 0.5, 1.0, 2.0] {
                    for m in [50, 100, 500] {
                        let (mp, p, k) = truncation_parameters(beta, m)?;
                        let est = truncated_binomial_mean(mp, p, k, 100_000, m ^ beta.to_bits())?;
                        worst = worst.min(est.estimate - (1.0 + beta / 4.0 - 3.0 * est.stderr));
                    }
                }
                Ok((worst >= 0.0, format!("smallest margin {worst:.4}")))
            }),
        ),
        (
            "tree-counts",
            Box::new(|| {
                let mut ok = count_rooted_trees(2, 2)? == 12 && count_rooted_trees(2, 6)? == 36;
                for n in 1..=3 {
                    for m in 1..=6 {
                        let t = count_rooted_trees(n, m)? as f64;
                        let (lo, hi) = tree_count_bounds(vertex_count(n) as f64, n, n, m);
                        ok &= lo.is_none_or(|lo| lo <= t && t <= hi);
                    }
                }
                Ok((ok, "hexagon values and bounds for n <= 3, m <= 6".into()))
            }),
        ),
    ]
}

fn iso_spectral() -> Vec<Check> {
    vec![
        (
            "harper",
            Box::new(|| {
                let rows = i_k_all(3, 12)?;
                let ok = rows.iter().all(|r| {
                    let b = 3.0 - (r.k as f64).log2();
                    r.i_k >= b - 1e-12 && (![1, 2, 4].contains(&r.k) || (r.i_k - b).abs() < 1e-12)
                });
                Ok((ok, "i_k >= 3 - log2 k for k <= 12, tight at 1, 2, 4".into()))
            }),
        ),
        (
            "lambda1",
            Box::new(|| {
                let err = (1..=4)
                    .map(|n| Ok((laplacian_lambda1(n)? - lambda1_closed_form(n)).abs()))
                    .collect::<Result<Vec<f64>>>()?
                    .into_iter()
                    .fold(0.0, f64::max);
                Ok((err <= 1e-9, format!("max error {err:.2e}")))
            }),
        ),
        (
            "witnesses",
            Box::new(|| {
                let mut ok = [3, 5].iter().all(|&n| halfspace_witness(n).is_ok_and(|s| edge_boundary(&s) == factorial(n)));
                for n in 1..=5usize {
                    for r in 1..=n.div_ceil(2) {
                        let s = face_vertex_set(&hypercube_face(n, r)?)?;
                        ok &= edge_boundary(&s) == (1u64 << r) * (n - r) as u64;
                    }
                }
                Ok((ok, "halfspace n! and hypercube 2^r(n-r) boundaries".into()))
            }),
        ),
    ]
}

/// Runs the checks of one module, or of all modules when `module` is `None`.
pub fn run_checks(module: Option<&str>, neighbors: Neighbors) -> Result<Vec<CheckResult>> {
    if let Some(m) = module {
        if !MODULES.contains(&m) {
            return Err(Error::InvalidParameter(format!("unknown module {m}; expected one of {}", MODULES.join(", "))));
        }
    }
    let mut out = Vec::new();
    for name in MODULES {
        if module.is_some_and(|m| m != name) {
            continue;
        }
        let checks = match name {
            "perm-core" => perm_core(neighbors),
            "face-graph" => face_graph(),
            "perc-engine" => perc_engine(),
            "pfs-explorer" => pfs_explorer(),
            "probab-oracles" => probab_oracles(),
            _ => iso_spectral(),
        };
        for (check, run) in checks {
            let start = Instant::now();
            let (passed, detail) = run()?;
            out.push(CheckResult { module: name, check, passed, detail, seconds: start.elapsed().as_secs_f64() });
        }
    }
    Ok(out)
}
