//! Seeded stochastic simulation of the retry pipelines.
//!
//! Trials are grouped into fixed batches of [`BATCH_SIZE`]; batch `i` draws
//! from ChaCha8 stream `i` under the configured seed. Per-trial results are
//! integers and are reduced with exact integer sums, so the statistics are
//! bit-identical for any thread count or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::estimate::{ArchitectureKind, ArchitectureSpec};
use crate::parity::{parity_sign_zeta, DepolarizingRates, ErrorPattern, Pauli, NOISY_QUBITS};
use crate::pipeline::{GhzProtocol, PipelineProbabilities};

/// Trials per RNG stream.
pub const BATCH_SIZE: u64 = 1024;

pub const DEFAULT_CONFIDENCE_LEVEL: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub trials: u64,
    pub seed: u64,
    pub confidence_level: f64,
}

impl SimulationConfig {
    pub fn new(trials: u64, seed: u64) -> Result<Self> {
        Self::with_confidence(trials, seed, DEFAULT_CONFIDENCE_LEVEL)
    }

    pub fn with_confidence(trials: u64, seed: u64, confidence_level: f64) -> Result<Self> {
        let config = Self {
            trials,
            seed,
            confidence_level,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::ZeroTrials);
        }
        if !(self.confidence_level > 0.0 && self.confidence_level < 1.0) {
            return Err(Error::OutOfRange {
                field: "confidence_level",
                value: self.confidence_level,
                range: "(0, 1)",
            });
        }
        Ok(())
    }
}

/// Sample mean of a per-trial count with its standard error and a normal
/// confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttemptStatistics {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
}

impl AttemptStatistics {
    /// Number of standard errors separating the mean from `value`.
    /// Infinite when the mean differs but the standard error is zero.
    pub fn z_score(&self, value: f64) -> f64 {
        let diff = (self.mean - value).abs();
        if diff == 0.0 {
            0.0
        } else if self.std_error == 0.0 {
            f64::INFINITY
        } else {
            diff / self.std_error
        }
    }

    pub fn within(&self, value: f64, std_errors: f64) -> bool {
        self.z_score(value) <= std_errors
    }
}

/// Exact running moments of integer samples.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
struct Moments {
    count: u64,
    sum: u128,
    sum_sq: u128,
}

impl Moments {
    fn push(&mut self, x: u64) {
        let x = u128::from(x);
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(self, other: Moments) -> Moments {
        Moments {
            count: self.count + other.count,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }

    fn statistics(&self, confidence_level: f64) -> AttemptStatistics {
        let n = self.count;
        let mean = self.sum as f64 / n as f64;
        let std_error = if n < 2 {
            0.0
        } else {
            // n Σx² − (Σx)² is exact in integers; it is n(n−1) times the sample variance.
            let scatter = u128::from(n) * self.sum_sq - self.sum * self.sum;
            let variance = scatter as f64 / (n as f64 * (n - 1) as f64);
            (variance / n as f64).sqrt()
        };
        let z = standard_normal_quantile(0.5 + 0.5 * confidence_level);
        AttemptStatistics {
            mean,
            std_error,
            ci_low: mean - z * std_error,
            ci_high: mean + z * std_error,
            trials: n,
        }
    }
}

fn standard_normal_quantile(q: f64) -> f64 {
    Normal::standard().inverse_cdf(q)
}

/// Runs `config.trials` independent trials and summarises the per-trial counts.
pub fn run_trials<F>(config: &SimulationConfig, trial: F) -> Result<AttemptStatistics>
where
    F: Fn(&mut ChaCha8Rng) -> u64 + Sync,
{
    config.validate()?;
    let batches = config.trials.div_ceil(BATCH_SIZE);
    let moments = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(batch);
            let start = batch * BATCH_SIZE;
            let len = BATCH_SIZE.min(config.trials - start);
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(trial(&mut rng));
            }
            m
        })
        .reduce(Moments::default, Moments::merge);
    Ok(moments.statistics(config.confidence_level))
}

/// Attempts until a heralded link succeeds.
#[derive(Debug, Clone, Copy)]
struct LinkSampler {
    retries: Geometric,
}

impl LinkSampler {
    fn new(p_link: f64) -> Result<Self> {
        let retries = Geometric::new(p_link).map_err(|_| Error::OutOfRange {
            field: "p_link",
            value: p_link,
            range: "(0, 1]",
        })?;
        Ok(Self { retries })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        1 + self.retries.sample(rng)
    }

    fn sample_many<R: Rng + ?Sized>(&self, count: u64, rng: &mut R) -> u64 {
        (0..count).map(|_| self.sample(rng)).sum()
    }
}

/// One trial of the GHZ factory, ready to sample.
#[derive(Debug, Clone, Copy)]
struct GhzFactory {
    protocol: GhzProtocol,
    probs: PipelineProbabilities,
    link: LinkSampler,
}

impl GhzFactory {
    fn new(protocol: &GhzProtocol, probs: &PipelineProbabilities) -> Result<Self> {
        let probs = probs.resolve_for(protocol)?;
        Ok(Self {
            protocol: *protocol,
            probs,
            link: LinkSampler::new(probs.p_link)?,
        })
    }

    fn copy_attempts<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self.protocol.distilled_pairs_per_copy() {
            None => self
                .link
                .sample_many(u64::from(self.protocol.bell_pairs_per_copy()), rng),
            Some(pairs) => {
                let mut attempts = 0;
                for _ in 0..pairs {
                    loop {
                        attempts += self.link.sample(rng) + self.link.sample(rng);
                        if rng.random_bool(self.probs.p_distill) {
                            break;
                        }
                    }
                }
                attempts
            }
        }
    }

    /// Link attempts spent until one GHZ passes the parity projection.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let mut attempts = 0;
        loop {
            attempts += self.copy_attempts(rng);
            attempts += self.copy_attempts(rng);
            if rng.random_bool(self.probs.p_parity) {
                return attempts;
            }
        }
    }
}

/// Simulated link attempts per accepted GHZ state.
///
/// A distilled pair repeatedly draws two link successes followed by a
/// distillation trial; a copy needs `n/2` distilled pairs (or `n` raw pairs
/// without distillation); a failed parity projection discards both copies.
pub fn simulate_ghz_pipeline(
    protocol: &GhzProtocol,
    probs: &PipelineProbabilities,
    config: &SimulationConfig,
) -> Result<AttemptStatistics> {
    let factory = GhzFactory::new(protocol, probs)?;
    run_trials(config, |rng| factory.sample(rng))
}

/// Simulated link attempts for one operation of the given architecture.
///
/// Type I: the GHZ states of a full round (both stabilizer types). Type II:
/// one seam round. Type III: one logical operation.
pub fn simulate_architecture_round(
    spec: &ArchitectureSpec,
    config: &SimulationConfig,
) -> Result<AttemptStatistics> {
    let probs = spec.resolved_probabilities()?;
    match spec.kind {
        ArchitectureKind::TypeI { protocol, .. } => {
            let factory = GhzFactory::new(&protocol, &probs)?;
            let ghz_states = 2 * spec.ghz_states_per_type();
            run_trials(config, |rng| {
                (0..ghz_states).map(|_| factory.sample(rng)).sum()
            })
        }
        ArchitectureKind::TypeII | ArchitectureKind::TypeIII { .. } => {
            let link = LinkSampler::new(probs.p_link)?;
            let pairs = spec.link_pairs_needed().expect("link-only architecture");
            run_trials(config, |rng| link.sample_many(pairs, rng))
        }
    }
}

/// Simulated Type I cost of a single stabilizer type (`N_type`).
pub fn simulate_type1_per_type(
    spec: &ArchitectureSpec,
    config: &SimulationConfig,
) -> Result<AttemptStatistics> {
    let ArchitectureKind::TypeI { protocol, .. } = spec.kind else {
        return Err(Error::WrongArchitecture {
            expected: "type1",
            found: spec.kind.label(),
        });
    };
    let factory = GhzFactory::new(&protocol, &spec.resolved_probabilities()?)?;
    let ghz_states = spec.ghz_states_per_type();
    run_trials(config, |rng| {
        (0..ghz_states).map(|_| factory.sample(rng)).sum()
    })
}

/// Simulated attempts for a single heralded link.
pub fn simulate_single_link(p_link: f64, config: &SimulationConfig) -> Result<AttemptStatistics> {
    let p_link = crate::error::check_positive_probability("p_link", p_link)?;
    let link = LinkSampler::new(p_link)?;
    run_trials(config, |rng| link.sample(rng))
}

fn sample_pauli<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> Pauli {
    let u: f64 = rng.random();
    if u >= rate {
        return Pauli::I;
    }
    // Conditioned on an error, X, Y and Z are equally likely.
    match rng.random_range(0..3u8) {
        0 => Pauli::X,
        1 => Pauli::Y,
        _ => Pauli::Z,
    }
}

/// Frequency of accepted parity projections with sampled depolarizing errors.
///
/// The returned `mean` is the acceptance frequency; its standard error is
/// the binomial one.
pub fn sample_parity_projection(
    rates: &DepolarizingRates,
    config: &SimulationConfig,
) -> Result<AttemptStatistics> {
    let flat = rates.flat();
    run_trials(config, |rng| {
        let mut pattern: ErrorPattern = [Pauli::I; NOISY_QUBITS];
        for (slot, &rate) in pattern.iter_mut().zip(flat.iter()) {
            *slot = sample_pauli(rate, rng);
        }
        u64::from(parity_sign_zeta(&pattern) == 1)
    })
}
