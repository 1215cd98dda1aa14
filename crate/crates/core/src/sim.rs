//! Binary symmetric channel and seeded Monte Carlo estimation of block-error
//! probability.
//!
//! Trial `i` draws all of its randomness from a ChaCha8 generator seeded with
//! the master seed and switched to stream `i`, so the counts do not depend on
//! how trials are spread over worker threads.

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fht;
use crate::rm::{self, CodeParams};
use crate::rpa::{RpaConfig, RpaDecoder};
use crate::subspace::{self, CosetIndexMap};
use crate::word::Word;

/// Identifier of the per-trial generator construction.
pub const RNG_ID: &str = "chacha8/seed_from_u64(master_seed)/stream(trial_index)";

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959963984540054;

/// Generator for trial (or sample) `index` under `master_seed`.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

fn flip_distribution(p: f64) -> Result<Bernoulli> {
    Bernoulli::new(p).map_err(|_| Error::OutOfRange {
        name: "p",
        value: p,
        domain: "[0, 1]",
    })
}

fn bsc_noise<R: Rng + ?Sized>(len: usize, flips: &Bernoulli, rng: &mut R) -> Word {
    let mut nu = Word::zeros(len);
    for i in 0..len {
        if flips.sample(rng) {
            nu.flip(i);
        }
    }
    nu
}

/// Sends `c` through BSC(p), flipping each bit independently.
pub fn bsc_transmit<R: Rng + ?Sized>(c: &Word, p: f64, rng: &mut R) -> Result<Word> {
    let flips = flip_distribution(p)?;
    let mut y = bsc_noise(c.len(), &flips, rng);
    y.xor_assign(c);
    Ok(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialConfig {
    pub code: CodeParams,
    pub k: u32,
    pub p: f64,
    pub max_iter: usize,
    pub num_trials: u64,
    pub master_seed: u64,
}

impl TrialConfig {
    pub fn rpa_config(&self) -> Result<RpaConfig> {
        RpaConfig::new(self.code, self.k, self.max_iter)
    }

    fn validate(&self) -> Result<RpaConfig> {
        let cfg = self.rpa_config()?;
        if !(self.p >= 0.0 && self.p <= 0.5) {
            return Err(Error::OutOfRange {
                name: "p",
                value: self.p,
                domain: "[0, 0.5]",
            });
        }
        if self.num_trials == 0 {
            return Err(Error::InvalidConfig("num_trials must be at least 1".into()));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialResult {
    pub trials: u64,
    pub block_errors: u64,
    pub p_err_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub converged_fraction: f64,
    pub mean_iterations: f64,
    /// Trials in which some first-order or majority decision was tied.
    pub tied_trials: u64,
    /// Block errors among the remaining, tie-free trials.
    pub tie_free_errors: u64,
    pub rng: &'static str,
}

/// Which codeword each trial transmits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transmission {
    #[default]
    AllZeros,
    /// A uniformly random codeword per trial, drawn before the noise.
    RandomCodeword,
}

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).clamp(0.0, phat), (center + half).clamp(phat, 1.0))
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    errors: u64,
    converged: u64,
    iterations: u64,
    tied: u64,
    tie_free_errors: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            errors: self.errors + o.errors,
            converged: self.converged + o.converged,
            iterations: self.iterations + o.iterations,
            tied: self.tied + o.tied,
            tie_free_errors: self.tie_free_errors + o.tie_free_errors,
        }
    }

    fn finish(self, trials: u64) -> TrialResult {
        let (ci_low, ci_high) = wilson_interval(self.errors, trials);
        let n = trials as f64;
        TrialResult {
            trials,
            block_errors: self.errors,
            p_err_hat: self.errors as f64 / n,
            ci_low,
            ci_high,
            converged_fraction: self.converged as f64 / n,
            mean_iterations: self.iterations as f64 / n,
            tied_trials: self.tied,
            tie_free_errors: self.tie_free_errors,
            rng: RNG_ID,
        }
    }
}

/// Runs `f` inside a pool of `workers` threads, or the global pool for `None`.
fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidConfig("workers must be at least 1".into())),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn random_codeword<R: Rng + ?Sized>(code: CodeParams, rng: &mut R) -> Word {
    let msg: Vec<bool> = (0..code.dimension()).map(|_| rng.random()).collect();
    rm::encode(&msg, code).expect("message length matches the code dimension")
}

fn draw_trial(
    cfg: &TrialConfig,
    flips: &Bernoulli,
    transmission: Transmission,
    index: u64,
) -> (Word, Word) {
    let mut rng = trial_rng(cfg.master_seed, index);
    let n = cfg.code.len();
    let c = match transmission {
        Transmission::AllZeros => Word::zeros(n),
        Transmission::RandomCodeword => random_codeword(cfg.code, &mut rng),
    };
    let mut y = bsc_noise(n, flips, &mut rng);
    y.xor_assign(&c);
    (c, y)
}

/// Decodes `num_trials` (codeword, received) pairs produced by `draw` and
/// counts block errors.
pub fn run_trials_custom<F>(cfg: &TrialConfig, workers: Option<usize>, draw: F) -> Result<TrialResult>
where
    F: Fn(u64) -> (Word, Word) + Sync,
{
    let rpa_cfg = cfg.validate()?;
    let decoder = RpaDecoder::new(rpa_cfg)?;
    let tally = with_workers(workers, || {
        (0..cfg.num_trials)
            .into_par_iter()
            .map(|i| {
                let (c, y) = draw(i);
                let out = decoder.decode(&y, false)?;
                let error = (out.estimate != c) as u64;
                let tied = (out.ties > 0) as u64;
                Ok(Tally {
                    errors: error,
                    converged: out.converged as u64,
                    iterations: out.iterations_used as u64,
                    tied,
                    tie_free_errors: error * (1 - tied),
                })
            })
            .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
    })??;
    Ok(tally.finish(cfg.num_trials))
}

pub fn run_trials_with(
    cfg: &TrialConfig,
    workers: Option<usize>,
    transmission: Transmission,
) -> Result<TrialResult> {
    let flips = flip_distribution(cfg.p)?;
    run_trials_custom(cfg, workers, |i| draw_trial(cfg, &flips, transmission, i))
}

/// All-zeros transmission on the global thread pool.
pub fn run_trials(cfg: &TrialConfig) -> Result<TrialResult> {
    run_trials_with(cfg, None, Transmission::AllZeros)
}

pub fn run_trials_with_workers(cfg: &TrialConfig, workers: usize) -> Result<TrialResult> {
    run_trials_with(cfg, Some(workers), Transmission::AllZeros)
}

/// Paired block-error counts of RPA and exhaustive ML decoding on the same
/// received words.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MlComparison {
    pub trials: u64,
    pub rpa_errors: u64,
    pub ml_errors: u64,
    /// Trials where the RPA estimate differs from the ML estimate.
    pub disagreements: u64,
}

impl MlComparison {
    pub fn rpa_p_err(&self) -> f64 {
        self.rpa_errors as f64 / self.trials as f64
    }

    pub fn ml_p_err(&self) -> f64 {
        self.ml_errors as f64 / self.trials as f64
    }

    /// `sqrt(se_rpa^2 + se_ml^2)` from the two binomial standard errors.
    pub fn joint_standard_error(&self) -> f64 {
        let n = self.trials as f64;
        let (a, b) = (self.rpa_p_err(), self.ml_p_err());
        ((a * (1.0 - a) + b * (1.0 - b)) / n).sqrt()
    }
}

pub fn compare_with_ml(
    cfg: &TrialConfig,
    workers: Option<usize>,
    transmission: Transmission,
) -> Result<MlComparison> {
    let rpa_cfg = cfg.validate()?;
    let decoder = RpaDecoder::new(rpa_cfg)?;
    let flips = flip_distribution(cfg.p)?;
    let (rpa_errors, ml_errors, disagreements) = with_workers(workers, || {
        (0..cfg.num_trials)
            .into_par_iter()
            .map(|i| {
                let (c, y) = draw_trial(cfg, &flips, transmission, i);
                let rpa = decoder.decode(&y, false)?.estimate;
                let ml = fht::brute_force_ml(&y, cfg.code)?;
                Ok(((rpa != c) as u64, (ml != c) as u64, (rpa != ml) as u64))
            })
            .try_reduce(|| (0, 0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1, a.2 + b.2)))
    })??;
    Ok(MlComparison {
        trials: cfg.num_trials,
        rpa_errors,
        ml_errors,
        disagreements,
    })
}

/// Empirical noise level after nested projections of BSC(p) noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionNoiseReport {
    pub empirical: f64,
    pub expected: f64,
    pub z_score: f64,
    /// Sample correlation between projected coordinates 0 and 1.
    pub pair_correlation: f64,
    /// One standard error of `pair_correlation` under independence.
    pub correlation_std: f64,
}

/// The chain used by [`projection_noise_test`]: at each depth, the first
/// enumerated k-dimensional subspace of the current ambient space.
pub fn projection_chain(m: u32, k: u32, j: u32) -> Result<Vec<CosetIndexMap>> {
    if k == 0 || j.checked_mul(k).is_none_or(|jk| jk + 1 > m) {
        return Err(Error::InvalidConfig(format!(
            "need k >= 1 and j*k <= m-1, got m={m} k={k} j={j}"
        )));
    }
    (0..j)
        .map(|level| {
            let first = subspace::enumerate_subspaces(m - level * k, k)?
                .into_iter()
                .next()
                .expect("at least one subspace");
            Ok(CosetIndexMap::new(&first))
        })
        .collect()
}

pub fn projection_noise_test(
    m: u32,
    k: u32,
    j: u32,
    p: f64,
    samples: u64,
    master_seed: u64,
) -> Result<ProjectionNoiseReport> {
    let chain = projection_chain(m, k, j)?;
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            domain: "[0, 0.5]",
        });
    }
    if samples < 2 {
        return Err(Error::InvalidConfig("samples must be at least 2".into()));
    }
    let flips = flip_distribution(p)?;
    let n = 1usize << m;
    // (ones, ones at coordinate 0, at coordinate 1, at both)
    let (ones, a, b, ab) = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = trial_rng(master_seed, s);
            let mut w = bsc_noise(n, &flips, &mut rng);
            for map in &chain {
                w = subspace::project(&w, map).expect("chain matches word length");
            }
            let (x, y) = (w.bit(0) as u64, w.bit(1) as u64);
            (w.weight() as u64, x, y, x * y)
        })
        .reduce(
            || (0, 0, 0, 0),
            |u, v| (u.0 + v.0, u.1 + v.1, u.2 + v.2, u.3 + v.3),
        );
    let per_sample = (1u64 << (m - j * k)) as f64;
    let total = samples as f64 * per_sample;
    let empirical = ones as f64 / total;
    let expected = crate::bounds::p_level(p, j * k);
    let sd = (expected * (1.0 - expected) / total).sqrt();
    let z_score = if sd > 0.0 {
        (empirical - expected) / sd
    } else if empirical == expected {
        0.0
    } else {
        f64::INFINITY
    };
    let s = samples as f64;
    let (ma, mb) = (a as f64 / s, b as f64 / s);
    let var = (ma * (1.0 - ma) * mb * (1.0 - mb)).sqrt();
    let pair_correlation = if var > 0.0 { (ab as f64 / s - ma * mb) / var } else { 0.0 };
    Ok(ProjectionNoiseReport {
        empirical,
        expected,
        z_score,
        pair_correlation,
        correlation_std: 1.0 / s.sqrt(),
    })
}
