use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use permuperc::branching::{solve_gamma, survival_probability_mc, truncated_binomial_mean, truncation_parameters, Estimate};
use permuperc::experiments::{
    connectivity, hitting_stats, isometry_check, position_swap_neighbors, sweep, ConnectivitySpec, GridKind, SweepSpec,
    CONNECTIVITY_CSV_HEADER, HITTING_CSV_HEADER, SWEEP_CSV_HEADER,
};
use permuperc::format::{csv_with_config, sig9};
use permuperc::iso::{
    edge_boundary, face_vertex_set, halfspace_witness, hypercube_face, i_k_all, lambda1_closed_form, laplacian_lambda1,
    IK_CSV_HEADER,
};
use permuperc::oracle::split_seed;
use permuperc::percolation::{label_components, memory_estimate, MAX_N_ENV};
use permuperc::perm::vertex_count;
use permuperc::pfs::{cluster_reaches, pfs_explore, pfs_prime_explore, PfsConfig, PfsMode};
use permuperc::trees::{count_rooted_trees, degree_scale, sample_uniform_tree, tree_count_bounds};
use permuperc::verify::{run_checks, value_swap_neighbors, CHECK_CSV_HEADER};
use permuperc::{EdgeOracle, EnumerationLimit, Error, FaceGraph, PercolationConfig, Permutation, VertexRank};
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "permuperc", version, about = "Bond percolation experiments on the permutahedron")]
struct Cli {
    /// Base seed; trial i uses seed + i.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output format. Defaults to json for `percolate`, csv otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone, Copy)]
#[group(required = true, multiple = false)]
struct Density {
    /// Edge probability.
    #[arg(long)]
    p: Option<f64>,
    /// Scaled density, p = c/n.
    #[arg(long)]
    c: Option<f64>,
}

impl Density {
    fn resolve(self, n: usize) -> (f64, f64) {
        match (self.p, self.c) {
            (Some(p), _) => (p * n as f64, p),
            (_, Some(c)) => (c, c / n as f64),
            _ => unreachable!("clap requires one of --p/--c"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// One percolation sample and its component report.
    Percolate {
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[command(flatten)]
        density: Density,
        /// Giant-component threshold (default n²).
        #[arg(long)]
        r: Option<u64>,
        /// Also count components with size in [LO, HI].
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        census: Option<Vec<u64>>,
        /// Also report the fraction of vertices within distance 2 of a component of size >= r.
        #[arg(long)]
        coverage: bool,
    },
    /// Phase-transition sweep over a grid of c (or p) values.
    Sweep {
        #[arg(long, default_value_t = 7)]
        n: usize,
        /// Comma-separated c values.
        #[arg(long, value_delimiter = ',', conflicts_with = "p")]
        c: Option<Vec<f64>>,
        /// Comma-separated p values.
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long)]
        r: Option<u64>,
    },
    /// Connectivity rate at target expected isolated counts λ.
    Connectivity {
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        lambda: Vec<f64>,
        #[arg(long, default_value_t = 400)]
        trials: u64,
    },
    /// Hitting times of minimum degree 1 and connectivity.
    Hitting {
        #[arg(long, value_delimiter = ',', default_value = "6")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Print the agreement fraction and gap distribution instead of per-seed rows.
        #[arg(long)]
        summary: bool,
    },
    /// Projection-first search from one vertex, or its success rate over many.
    Pfs {
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[command(flatten)]
        density: Density,
        #[arg(long, value_enum, default_value_t = Mode::Plain)]
        mode: Mode,
        #[arg(long)]
        rounds: Option<usize>,
        /// Truncation level of the second phase.
        #[arg(long)]
        k: Option<usize>,
        /// Untruncated rounds before truncation.
        #[arg(long)]
        tau1: Option<usize>,
        /// Stop once this many vertices are explored.
        #[arg(long)]
        r: Option<u64>,
        /// Start vertex rank (default: random from the seed).
        #[arg(long)]
        start: Option<u64>,
        /// Estimate the probability of reaching r over this many (vertex, seed) pairs.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Exhaustive edge isoperimetry and witness sets.
    Iso {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 12)]
        kmax: usize,
        /// Report a witness set instead of i_k.
        #[arg(long, value_enum)]
        witness: Option<Witness>,
        /// Cube dimension for the hypercube witness.
        #[arg(long, default_value_t = 1)]
        r: usize,
    },
    /// Laplacian spectral gap against its closed form.
    Spectral {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        n: Vec<usize>,
    },
    /// Tree and branching-process oracles.
    Trees {
        #[command(subcommand)]
        command: TreesCommand,
    },
    /// Checks the inversion-set embedding against graph distance.
    EmbedCheck {
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Print the inversion set of this permutation (one-line, comma-separated).
        #[arg(long, value_delimiter = ',')]
        perm: Option<Vec<u8>>,
        /// Use position swaps instead of value swaps, which must fail.
        #[arg(long)]
        mutate: bool,
    },
    /// Runs the oracle suites of one module or all of them.
    Verify {
        #[arg(default_value = "all")]
        module: String,
    },
}

#[derive(Subcommand)]
enum TreesCommand {
    /// Degree and diameter statistics of uniform labelled trees.
    Prufer {
        #[arg(long, default_value_t = 10_000)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        samples: u64,
    },
    /// Exact rooted tree counts with their bounds.
    Count {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
        m: Vec<usize>,
    },
    /// Galton-Watson survival with Bin(n, c/n) offspring.
    Gw {
        #[arg(long, default_value_t = 7)]
        n: u64,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        c: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        generations: usize,
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
    },
    /// Truncated binomial means against 1 + β/4.
    Truncated {
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1,2")]
        beta: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "50,100,500")]
        m: Vec<u64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Survival probability of a Poisson(c) branching process.
    Gamma {
        #[arg(long, value_delimiter = ',', default_value = "1.5,2,3")]
        c: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Plain,
    TwoPhase,
}

#[derive(Clone, Copy, ValueEnum)]
enum Witness {
    Halfspace,
    Hypercube,
}

/// Output of a subcommand: CSV rows plus a JSON payload.
struct Output {
    config: Value,
    header: String,
    rows: Vec<String>,
    json: Value,
}

fn estimate_row(operation: &str, params: &[String], est: &Estimate) -> String {
    format!("{operation},{},{},{},{}", params.join(","), sig9(est.estimate), sig9(est.stderr), est.trials)
}

fn enumeration_limit(n: usize) -> Result<EnumerationLimit, Error> {
    let limit = EnumerationLimit::from_env()?;
    let bytes = limit.check(n)?;
    if std::env::var_os(MAX_N_ENV).is_some() {
        eprintln!("{MAX_N_ENV}: enumeration cap n <= {}", limit.max_n);
    }
    eprintln!(
        "memory estimate for n = {n}: {} vertices, {:.1} MiB of labels",
        vertex_count(n),
        bytes.max(memory_estimate(n)) as f64 / (1 << 20) as f64
    );
    Ok(limit)
}

fn percolate(n: usize, density: Density, r: Option<u64>, census: Option<Vec<u64>>, coverage: bool, seed: u64) -> Result<Output, Error> {
    let (c, p) = density.resolve(n);
    let mut cfg = PercolationConfig::new(n, p, seed);
    cfg.r = r;
    cfg.validate()?;
    let limit = enumeration_limit(n)?;
    let labels = label_components(&cfg, &limit)?;
    let report = labels.report(cfg.threshold());
    let mut header = String::from("n,c,p,seed,largest,second_largest,num_components,isolated,connected,giant_fraction,count_geq_r");
    let mut row = format!(
        "{n},{},{},{seed},{},{},{},{},{},{},{}",
        sig9(c),
        sig9(p),
        report.largest,
        report.second_largest,
        report.num_components,
        report.isolated_count,
        report.connected,
        sig9(report.giant_fraction),
        report.count_in_components_geq_r
    );
    let mut json = serde_json::to_value(&report).expect("report serializes");
    if let Some(bounds) = &census {
        let count = labels.census(bounds[0], bounds[1]);
        header.push_str(",census");
        row.push_str(&format!(",{count}"));
        json["census"] = json!({"lo": bounds[0], "hi": bounds[1], "count": count});
    }
    if coverage {
        let f = labels.distance2_coverage(cfg.threshold());
        header.push_str(",distance2_coverage");
        row.push_str(&format!(",{}", sig9(f)));
        json["distance2_coverage"] = json!(f);
    }
    Ok(Output {
        config: json!({"command": "percolate", "n": n, "c": c, "p": p, "seed": seed, "r": cfg.threshold(), "census": census, "coverage": coverage}),
        header,
        rows: vec![row],
        json,
    })
}

fn run_sweep(n: usize, c: Option<Vec<f64>>, p: Option<Vec<f64>>, trials: u64, r: Option<u64>, seed: u64) -> Result<Output, Error> {
    let (kind, grid) = match (c, p) {
        (_, Some(p)) => (GridKind::P, p),
        (Some(c), None) => (GridKind::C, c),
        (None, None) => (GridKind::C, vec![0.5, 0.75, 1.0, 1.5, 2.0, 3.0]),
    };
    let spec = SweepSpec { n, kind, grid, trials, base_seed: seed, r };
    let limit = enumeration_limit(n)?;
    let rows = sweep(&spec, &limit)?;
    Ok(Output {
        config: json!({"command": "sweep", "spec": spec}),
        header: SWEEP_CSV_HEADER.into(),
        rows: rows.iter().map(|r| r.csv_row()).collect(),
        json: serde_json::to_value(&rows).expect("rows serialize"),
    })
}

fn run_connectivity(n: usize, lambdas: Vec<f64>, trials: u64, seed: u64) -> Result<Output, Error> {
    let spec = ConnectivitySpec { n, lambdas, trials, base_seed: seed };
    let limit = enumeration_limit(n)?;
    let rows = connectivity(&spec, &limit)?;
    Ok(Output {
        config: json!({"command": "connectivity", "spec": spec}),
        header: CONNECTIVITY_CSV_HEADER.into(),
        rows: rows.iter().map(|r| r.csv_row()).collect(),
        json: serde_json::to_value(&rows).expect("rows serialize"),
    })
}

fn run_hitting(ns: Vec<usize>, trials: u64, summary: bool, seed: u64) -> Result<Output, Error> {
    let mut rows = Vec::new();
    let mut json = Vec::new();
    for &n in &ns {
        let limit = enumeration_limit(n)?;
        let s = hitting_stats(n, trials, seed, &limit)?;
        if summary {
            rows.extend(s.gaps.iter().map(|(gap, count)| format!("{n},{},{gap},{count}", sig9(s.agreement))));
        } else {
            rows.extend(s.csv_rows(seed));
        }
        json.push(json!({"n": n, "trials": trials, "agreement": s.agreement, "gaps": s.gaps, "runs": s.runs}));
    }
    Ok(Output {
        config: json!({"command": "hitting", "n": ns, "trials": trials, "seed": seed, "summary": summary}),
        header: if summary { "n,agreement,gap,count".into() } else { HITTING_CSV_HEADER.into() },
        rows,
        json: Value::Array(json),
    })
}

struct PfsArgs {
    n: usize,
    density: Density,
    mode: Mode,
    rounds: Option<usize>,
    k: Option<usize>,
    tau1: Option<usize>,
    r: Option<u64>,
    start: Option<u64>,
    trials: Option<u64>,
}

fn run_pfs(a: PfsArgs, seed: u64) -> Result<Output, Error> {
    let n = a.n;
    let (c, p) = a.density.resolve(n);
    let host = FaceGraph::full(n)?;
    let mut cfg = match a.mode {
        Mode::Plain => PfsConfig::plain(p),
        Mode::TwoPhase => PfsConfig::two_phase(p),
    };
    cfg.max_rounds = a.rounds;
    cfg.k = a.k;
    cfg.tau1 = a.tau1;
    cfg.r = a.r;
    cfg.check_invariants = false;
    let start = |s: u64| -> Result<Permutation, Error> {
        let rank = a.start.unwrap_or_else(|| split_seed(s, 7) % vertex_count(n));
        Permutation::unrank(n, VertexRank(rank))
    };
    let mut config = json!({"command": "pfs", "n": n, "c": c, "p": p, "seed": seed, "config": cfg, "start": a.start});
    if cfg.mode == PfsMode::TwoPhase {
        config["resolved_k"] = json!(cfg.resolved_k(n)?);
        config["resolved_tau1"] = json!(cfg.resolved_tau1(n));
    }
    if let Some(trials) = a.trials {
        let r = a.r.unwrap_or((n * n) as u64);
        config["r"] = json!(r);
        config["trials"] = json!(trials);
        let hits: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|i| {
                let s = seed.wrapping_add(i);
                Ok(if cluster_reaches(&host, &start(s)?, &EdgeOracle::new(s, n), p, r)? { 1.0 } else { 0.0 })
            })
            .collect::<Result<_, Error>>()?;
        let sum: f64 = hits.iter().sum();
        let est = Estimate::from_samples(sum, sum, trials);
        let row = estimate_row("cluster_reaches", &[n.to_string(), sig9(p), r.to_string()], &est);
        return Ok(Output {
            config,
            header: "operation,n,p,r,estimate,stderr,trials".into(),
            rows: vec![row],
            json: serde_json::to_value(est).expect("estimate serializes"),
        });
    }
    let v = start(seed)?;
    let oracle = EdgeOracle::new(seed, n);
    let state = match a.mode {
        Mode::Plain => pfs_explore(&host, &v, &oracle, &cfg)?,
        Mode::TwoPhase => pfs_prime_explore(&host, &v, &oracle, &cfg)?,
    };
    config["start_vertex"] = json!(v.to_string());
    let rows = state
        .history
        .iter()
        .map(|h| {
            let dim = h.min_face_dim.map(|d| d.to_string()).unwrap_or_default();
            format!("{},{},{},{},{dim}", h.round, h.explored, h.frontier, h.max_weight)
        })
        .collect();
    Ok(Output {
        config,
        header: "round,explored,frontier,max_weight,min_face_dim".into(),
        rows,
        json: serde_json::to_value(state.summary(a.r)).expect("summary serializes"),
    })
}

fn run_iso(n: usize, kmax: usize, witness: Option<Witness>, r: usize) -> Result<Output, Error> {
    let config = json!({"command": "iso", "n": n, "kmax": kmax, "witness": witness.map(|w| match w {
        Witness::Halfspace => "halfspace",
        Witness::Hypercube => "hypercube",
    }), "r": r});
    if let Some(w) = witness {
        let set = match w {
            Witness::Halfspace => halfspace_witness(n)?,
            Witness::Hypercube => face_vertex_set(&hypercube_face(n, r)?)?,
        };
        let boundary = edge_boundary(&set);
        let row = format!("{n},{},{boundary},{},{}", set.len(), sig9(boundary as f64 / set.len() as f64), set.to_hex_list());
        return Ok(Output {
            config,
            header: "n,size,boundary,ratio,witness_set".into(),
            rows: vec![row],
            json: json!({"n": n, "size": set.len(), "boundary": boundary, "witness": set.ranks()}),
        });
    }
    let rows = i_k_all(n, kmax)?;
    Ok(Output {
        config,
        header: IK_CSV_HEADER.into(),
        rows: rows.iter().map(|r| r.csv_row()).collect(),
        json: serde_json::to_value(&rows).expect("rows serialize"),
    })
}

fn run_spectral(ns: Vec<usize>) -> Result<Output, Error> {
    let mut rows = Vec::new();
    let mut json = Vec::new();
    for &n in &ns {
        let numeric = laplacian_lambda1(n)?;
        let closed = lambda1_closed_form(n);
        rows.push(format!("{n},{},{},{}", sig9(numeric), sig9(closed), sig9((numeric - closed).abs())));
        json.push(json!({"n": n, "lambda1": numeric, "closed_form": closed}));
    }
    Ok(Output {
        config: json!({"command": "spectral", "n": ns}),
        header: "n,lambda1,closed_form,abs_error".into(),
        rows,
        json: Value::Array(json),
    })
}

fn run_trees(cmd: TreesCommand, seed: u64) -> Result<Output, Error> {
    match cmd {
        TreesCommand::Prufer { m, samples } => {
            let stats = (0..samples)
                .into_par_iter()
                .map(|i| sample_uniform_tree(m, seed.wrapping_add(i)).map(|t| t.stats()))
                .collect::<Result<Vec<_>, Error>>()?;
            let rows = stats
                .iter()
                .enumerate()
                .map(|(i, s)| format!("{m},{},{},{},{}", seed.wrapping_add(i as u64), s.max_degree, s.diameter, sig9(degree_scale(m))))
                .collect();
            Ok(Output {
                config: json!({"command": "trees prufer", "m": m, "samples": samples, "seed": seed}),
                header: "m,seed,max_degree,diameter,log_m_over_loglog_m".into(),
                rows,
                json: serde_json::to_value(&stats).expect("stats serialize"),
            })
        }
        TreesCommand::Count { n, m } => {
            let mut rows = Vec::new();
            let mut json = Vec::new();
            for &k in &m {
                let t = count_rooted_trees(n, k)?;
                let (lo, hi) = tree_count_bounds(vertex_count(n) as f64, n, n, k);
                rows.push(format!("{n},{k},{t},{},{}", lo.map(sig9).unwrap_or_default(), sig9(hi)));
                json.push(json!({"n": n, "m": k, "count": t, "lower": lo, "upper": hi}));
            }
            Ok(Output {
                config: json!({"command": "trees count", "n": n, "m": m}),
                header: "n,m,count,lower,upper".into(),
                rows,
                json: Value::Array(json),
            })
        }
        TreesCommand::Gw { n, c, generations, trials } => {
            let mut rows = Vec::new();
            let mut json = Vec::new();
            for &ci in &c {
                let est = survival_probability_mc(n, ci, generations, trials, seed)?;
                rows.push(estimate_row("gw_survival", &[n.to_string(), sig9(ci), generations.to_string()], &est));
                json.push(json!({"n": n, "c": ci, "estimate": est}));
            }
            Ok(Output {
                config: json!({"command": "trees gw", "n": n, "c": c, "generations": generations, "trials": trials, "seed": seed}),
                header: "operation,n,c,generations,estimate,stderr,trials".into(),
                rows,
                json: Value::Array(json),
            })
        }
        TreesCommand::Truncated { beta, m, trials } => {
            let mut rows = Vec::new();
            let mut json = Vec::new();
            for &b in &beta {
                for &mi in &m {
                    let (mp, p, k) = truncation_parameters(b, mi)?;
                    let est = truncated_binomial_mean(mp, p, k, trials, split_seed(seed, mi ^ b.to_bits()))?;
                    let bound = 1.0 + b / 4.0;
                    let params = [sig9(b), mi.to_string(), mp.to_string(), sig9(p), k.to_string(), sig9(bound)];
                    rows.push(estimate_row("truncated_mean", &params, &est));
                    json.push(json!({"beta": b, "m": mi, "m_prime": mp, "p": p, "k": k, "bound": bound, "estimate": est}));
                }
            }
            Ok(Output {
                config: json!({"command": "trees truncated", "beta": beta, "m": m, "trials": trials, "seed": seed}),
                header: "operation,beta,m,m_prime,p,k,bound,estimate,stderr,trials".into(),
                rows,
                json: Value::Array(json),
            })
        }
        TreesCommand::Gamma { c } => {
            let gammas = c.iter().map(|&ci| solve_gamma(ci)).collect::<Result<Vec<_>, Error>>()?;
            Ok(Output {
                config: json!({"command": "trees gamma", "c": c}),
                header: "c,gamma".into(),
                rows: c.iter().zip(&gammas).map(|(ci, g)| format!("{},{}", sig9(*ci), sig9(*g))).collect(),
                json: json!(c.iter().zip(&gammas).map(|(ci, g)| json!({"c": ci, "gamma": g})).collect::<Vec<_>>()),
            })
        }
    }
}

fn run_embed_check(n: usize, perm: Option<Vec<u8>>, mutate: bool) -> Result<(Output, bool), Error> {
    let n = perm.as_ref().map_or(n, |w| w.len().saturating_sub(1));
    let config = json!({"command": "embed-check", "n": n, "perm": perm, "mutate": mutate});
    if let Some(word) = perm {
        let x = Permutation::new(word)?;
        let set = x.inversion_set();
        let row = format!("{},{},{}", x, set.count(), set.to_hex());
        return Ok((
            Output {
                config,
                header: "permutation,inversions,inversion_hex".into(),
                rows: vec![row],
                json: json!({"permutation": x.word(), "inversions": set.count(), "pairs": set.pairs(), "hex": set.to_hex()}),
            },
            true,
        ));
    }
    if n > 5 {
        return Err(Error::InvalidParameter("embed-check compares all pairs; use n <= 5".into()));
    }
    let result = if mutate { isometry_check(n, position_swap_neighbors) } else { isometry_check(n, value_swap_neighbors) };
    let (ok, detail) = match &result {
        Ok(pairs) => (true, format!("{pairs} pairs agree")),
        Err(e) => (false, e.clone()),
    };
    Ok((
        Output {
            config,
            header: "n,isometric,detail".into(),
            rows: vec![format!("{n},{ok},\"{detail}\"")],
            json: json!({"n": n, "isometric": ok, "detail": detail}),
        },
        ok,
    ))
}

fn run_verify(module: &str) -> Result<(Output, bool), Error> {
    let selected = (module != "all").then_some(module);
    let rows = run_checks(selected, value_swap_neighbors)?;
    let ok = rows.iter().all(|r| r.passed);
    for r in &rows {
        eprintln!("{:<15} {:<22} {} {}", r.module, r.check, if r.passed { "PASS" } else { "FAIL" }, r.detail);
    }
    Ok((
        Output {
            config: json!({"command": "verify", "module": module}),
            header: CHECK_CSV_HEADER.into(),
            rows: rows.iter().map(|r| r.csv_row()).collect(),
            json: serde_json::to_value(&rows).expect("rows serialize"),
        },
        ok,
    ))
}

fn render(out: &Output, format: Format, globals: &Value) -> String {
    let mut config = out.config.clone();
    config["globals"] = globals.clone();
    match format {
        Format::Csv => csv_with_config(&config, &out.header, &out.rows),
        Format::Json => {
            let doc = json!({"config": config, "result": out.json});
            serde_json::to_string_pretty(&doc).expect("json renders") + "\n"
        }
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let seed = cli.seed;
    let default_format = if matches!(cli.command, Command::Percolate { .. }) { Format::Json } else { Format::Csv };
    let format = cli.format.unwrap_or(default_format);
    let (output, ok) = match cli.command {
        Command::Percolate { n, density, r, census, coverage } => (percolate(n, density, r, census, coverage, seed)?, true),
        Command::Sweep { n, c, p, trials, r } => (run_sweep(n, c, p, trials, r, seed)?, true),
        Command::Connectivity { n, lambda, trials } => (run_connectivity(n, lambda, trials, seed)?, true),
        Command::Hitting { n, trials, summary } => (run_hitting(n, trials, summary, seed)?, true),
        Command::Pfs { n, density, mode, rounds, k, tau1, r, start, trials } => {
            (run_pfs(PfsArgs { n, density, mode, rounds, k, tau1, r, start, trials }, seed)?, true)
        }
        Command::Iso { n, kmax, witness, r } => (run_iso(n, kmax, witness, r)?, true),
        Command::Spectral { n } => (run_spectral(n)?, true),
        Command::Trees { command } => (run_trees(command, seed)?, true),
        Command::EmbedCheck { n, perm, mutate } => run_embed_check(n, perm, mutate)?,
        Command::Verify { module } => run_verify(&module)?,
    };
    let globals = json!({"seed": seed, "format": if format == Format::Csv { "csv" } else { "json" }});
    let text = render(&output, format, &globals);
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
