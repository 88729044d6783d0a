//! Galton–Watson reference processes: the Poisson survival probability
//! `γ(c)`, binomial branching simulation, and truncated binomial means.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{check_probability, split_seed};

/// Total-size cap after which a run is declared surviving.
pub const GW_NODE_CAP: u64 = 10_000_000;

const CHUNK: u64 = 1024;

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl Estimate {
    pub fn from_samples(sum: f64, sum_sq: f64, trials: u64) -> Self {
        let t = trials as f64;
        let mean = sum / t;
        let var = if trials > 1 { ((sum_sq - t * mean * mean) / (t - 1.0)).max(0.0) } else { 0.0 };
        Estimate { estimate: mean, stderr: (var / t).sqrt(), trials }
    }

    /// Whether `target` lies within `z` standard errors plus `slack`.
    pub fn within(&self, target: f64, z: f64, slack: f64) -> bool {
        (self.estimate - target).abs() <= z * self.stderr + slack
    }
}

/// Runs `trials` seeded samples in parallel chunks and averages `f`.
/// Chunk `j` draws from `ChaCha8Rng` seeded with `split_seed(seed, j)`, so the
/// result does not depend on the thread count.
pub fn monte_carlo(trials: u64, seed: u64, f: impl Fn(&mut ChaCha8Rng) -> f64 + Sync) -> Estimate {
    let chunks = trials.div_ceil(CHUNK);
    let (sum, sum_sq) = (0..chunks)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, j));
            let count = CHUNK.min(trials - j * CHUNK);
            (0..count).fold((0.0, 0.0), |(s, q), _| {
                let x = f(&mut rng);
                (s + x, q + x * x)
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0.0), |(s, q), (a, b)| (s + a, q + b));
    Estimate::from_samples(sum, sum_sq, trials)
}

/// Survival probability of a Poisson(`c`) branching process: the root in
/// `(0, 1)` of `γ = 1 − e^{−cγ}` for `c > 1`, and 0 otherwise.
pub fn solve_gamma(c: f64) -> Result<f64> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::InvalidParameter(format!("c = {c} must be positive and finite")));
    }
    if c <= 1.0 {
        return Ok(0.0);
    }
    // f(γ) = γ − 1 + e^{−cγ} is convex with f(0) = 0, f'(0) < 0 and f(1) > 0
    let f = |g: f64| g + (-c * g).exp_m1();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Branching process with `Bin(n, p)` offspring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GwConfig {
    pub n: u64,
    pub p: f64,
    pub max_generations: usize,
    pub seed: u64,
}

impl GwConfig {
    pub fn from_c(n: u64, c: f64, max_generations: usize, seed: u64) -> Self {
        GwConfig { n, p: c / n as f64, max_generations, seed }
    }

    pub fn mean_offspring(&self) -> f64 {
        self.n as f64 * self.p
    }

    fn validate(&self) -> Result<()> {
        check_probability(self.p)?;
        if self.n == 0 {
            return Err(Error::InvalidParameter("offspring trials n must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwOutcome {
    /// Reached `max_generations` with a nonempty last generation, or hit the node cap.
    pub survived: bool,
    pub total_size: u64,
    pub generation_sizes: Vec<u64>,
}

/// One run using `rng`. A generation of size `k` has `Bin(k·n, p)` children.
pub fn simulate_gw_with<R: Rng>(cfg: &GwConfig, rng: &mut R) -> Result<GwOutcome> {
    cfg.validate()?;
    let mut sizes = vec![1u64];
    let mut total = 1u64;
    while sizes.len() <= cfg.max_generations {
        let k = *sizes.last().expect("nonempty");
        if k == 0 {
            break;
        }
        let next = Binomial::new(k * cfg.n, cfg.p)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .sample(rng);
        sizes.push(next);
        total += next;
        if total >= GW_NODE_CAP {
            return Ok(GwOutcome { survived: true, total_size: total, generation_sizes: sizes });
        }
    }
    let survived = sizes.len() > cfg.max_generations && *sizes.last().expect("nonempty") > 0;
    Ok(GwOutcome { survived, total_size: total, generation_sizes: sizes })
}

/// One run seeded from `cfg.seed`.
pub fn simulate_gw(cfg: &GwConfig) -> Result<GwOutcome> {
    simulate_gw_with(cfg, &mut ChaCha8Rng::seed_from_u64(cfg.seed))
}

/// Fraction of `trials` runs that survive `max_generations` generations.
pub fn survival_probability_mc(n: u64, c: f64, max_generations: usize, trials: u64, seed: u64) -> Result<Estimate> {
    let cfg = GwConfig::from_c(n, c, max_generations, seed);
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    Ok(monte_carlo(trials, seed, |rng| {
        if simulate_gw_with(&cfg, rng).expect("validated").survived {
            1.0
        } else {
            0.0
        }
    }))
}

/// Monte Carlo mean of `min(Bin(m', p), K)`.
pub fn truncated_binomial_mean(m_prime: u64, p: f64, k: u64, trials: u64, seed: u64) -> Result<Estimate> {
    check_probability(p)?;
    if m_prime == 0 {
        return Err(Error::InvalidParameter("m' must be at least 1".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("truncation K must be at least 1".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let bin = Binomial::new(m_prime, p).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(monte_carlo(trials, seed, |rng| bin.sample(rng).min(k) as f64))
}

/// Parameters `(m', p, K)` for supercriticality `β` in dimension `m`:
/// `p = (1 + β)/m`, `m' = ⌈(1 − min{β/2, 1/18})·m⌉`, `K = ⌈max{2e(1 + β), log₂ β⁻²}⌉`.
pub fn truncation_parameters(beta: f64, m: u64) -> Result<(u64, f64, u64)> {
    if beta.is_nan() || beta <= 0.0 || m == 0 {
        return Err(Error::InvalidParameter(format!("need beta > 0 and m >= 1 (got {beta}, {m})")));
    }
    let p = (1.0 + beta) / m as f64;
    check_probability(p)?;
    let m_prime = ((1.0 - (beta / 2.0).min(1.0 / 18.0)) * m as f64).ceil() as u64;
    let k = crate::pfs::truncation_level(m as usize, p)? as u64;
    Ok((m_prime, p, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_reference_values() {
        // 16-digit values from an arbitrary-precision root finder
        let table = [
            (1.05, 0.0937018370729016),
            (1.1, 0.1761341436318097),
            (1.2, 0.3136983310412177),
            (1.25, 0.3713702035030533),
            (1.5, 0.5828116438658114),
            (2.0, 0.7968121300200200),
            (3.0, 0.9404797907073596),
        ];
        for (c, g) in table {
            let got = solve_gamma(c).unwrap();
            assert!((got - g).abs() < 1e-12, "c = {c}: {got}");
            assert!((got - 1.0 + (-c * got).exp()).abs() <= 1e-12);
        }
    }

    #[test]
    fn gamma_subcritical_and_errors() {
        assert_eq!(solve_gamma(0.5).unwrap(), 0.0);
        assert_eq!(solve_gamma(1.0).unwrap(), 0.0);
        assert!(solve_gamma(0.0).is_err());
        assert!(solve_gamma(-1.0).is_err());
        assert!(solve_gamma(f64::NAN).is_err());
    }

    #[test]
    fn gamma_beats_c_minus_one_near_one() {
        for c in [1.05, 1.1, 1.2, 1.25] {
            assert!(solve_gamma(c).unwrap() > c - 1.0);
        }
    }

    #[test]
    fn gamma_increasing_and_continuous() {
        let grid: Vec<f64> = (1..=400).map(|i| 1.0 + i as f64 * 0.01).collect();
        let vals: Vec<f64> = grid.iter().map(|&c| solve_gamma(c).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[1] > w[0]);
            assert!(w[1] - w[0] < 0.05);
        }
        assert!(solve_gamma(1.0 + 1e-9).unwrap() < 1e-8);
    }

    #[test]
    fn gw_degenerate() {
        let out = simulate_gw(&GwConfig { n: 10, p: 0.0, max_generations: 5, seed: 1 }).unwrap();
        assert_eq!(out.total_size, 1);
        assert!(!out.survived);
        assert_eq!(out.generation_sizes, vec![1, 0]);
        let out = simulate_gw(&GwConfig { n: 2, p: 1.0, max_generations: 4, seed: 1 }).unwrap();
        assert!(out.survived);
        assert_eq!(out.generation_sizes, vec![1, 2, 4, 8, 16]);
        assert_eq!(out.total_size, 31);
    }

    #[test]
    fn gw_node_cap_counts_as_survival() {
        let out = simulate_gw(&GwConfig { n: 10, p: 1.0, max_generations: 50, seed: 0 }).unwrap();
        assert!(out.survived);
        assert!(out.total_size >= GW_NODE_CAP);
        assert!(out.generation_sizes.len() < 51);
    }

    #[test]
    fn gw_survival_matches_gamma() {
        let est = survival_probability_mc(100, 2.0, 25, 10_000, 7).unwrap();
        let g = solve_gamma(2.0).unwrap();
        assert!((est.estimate - g).abs() < 0.02, "{est:?} vs {g}");
    }

    #[test]
    fn gw_growth_rate() {
        let mut rates = Vec::new();
        let mut seed = 0;
        while rates.len() < 400 {
            let cfg = GwConfig::from_c(100, 2.0, 20, split_seed(99, seed));
            seed += 1;
            let out = simulate_gw(&cfg).unwrap();
            if out.survived && out.generation_sizes.len() == 21 {
                rates.push((out.generation_sizes[20] as f64).powf(1.0 / 20.0));
            }
        }
        rates.sort_by(f64::total_cmp);
        let median = rates[rates.len() / 2];
        assert!((median - 2.0).abs() < 0.15, "{median}");
    }

    #[test]
    fn gw_total_size_follows_borel_law() {
        // Poisson(c) trees have P(|T| = k) = e^{-ck}(ck)^{k-1}/k!
        let (n, c) = (1000u64, 0.6);
        let trials = 200_000u64;
        let cfg = GwConfig::from_c(n, c, 60, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut counts = [0u64; 4];
        for _ in 0..trials {
            let t = simulate_gw_with(&cfg, &mut rng).unwrap().total_size;
            if t <= 3 {
                counts[t as usize] += 1;
            }
        }
        let borel = |k: u64| {
            let kf = k as f64;
            (-c * kf).exp() * (c * kf).powi(k as i32 - 1) / (1..=k).product::<u64>() as f64
        };
        for k in 1..=3 {
            let freq = counts[k as usize] as f64 / trials as f64;
            let se = (borel(k) * (1.0 - borel(k)) / trials as f64).sqrt();
            assert!((freq - borel(k)).abs() < 4.0 * se + 2e-3, "k = {k}: {freq} vs {}", borel(k));
        }
    }

    #[test]
    fn truncated_mean_inactive_truncation() {
        let est = truncated_binomial_mean(20, 0.1, 20, 100_000, 3).unwrap();
        assert!(est.within(2.0, 4.0, 0.0), "{est:?}");
    }

    #[test]
    fn truncated_mean_rejects_bad_input() {
        assert!(truncated_binomial_mean(10, 0.1, 0, 10, 0).is_err());
        assert!(truncated_binomial_mean(0, 0.1, 1, 10, 0).is_err());
        assert!(truncated_binomial_mean(10, 1.5, 1, 10, 0).is_err());
    }

    #[test]
    fn truncated_mean_clears_its_bound() {
        let (m_prime, p, k) = truncation_parameters(1.0, 100).unwrap();
        assert_eq!((m_prime, k), (95, 11));
        let est = truncated_binomial_mean(m_prime, p, k, 100_000, 11).unwrap();
        assert!(est.estimate >= 1.25 - 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let a = truncated_binomial_mean(50, 0.04, 5, 5000, 9).unwrap();
        let b = truncated_binomial_mean(50, 0.04, 5, 5000, 9).unwrap();
        assert_eq!(a, b);
    }
}
