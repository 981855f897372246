//! Risk of missing the common basis when edges go undetected.
//!
//! Model: every significant reference edge is independently missing from the
//! new image with probability `p`. There are `m` candidate basis couples; a
//! couple is usable only if all of its edges are detected. The basis search
//! misses when no couple is usable, which happens with probability
//! `[1 - (1 - p)^k]^m` for couples of `k` edges, and the expected number of
//! couples tried before a usable one is `(1 - p)^-k`.
//!
//! The Monte Carlo estimator draws trials in fixed-size chunks, chunk `c`
//! using stream `c` of a ChaCha8 generator seeded with the user seed. The
//! miss count is therefore a pure function of `(params, trials, seed)`,
//! whatever the order or thread in which chunks are evaluated.

#[allow(unused_imports)] // f64 has inherent methods once std is linked
use num_traits::Float;
use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Trials per independently seeded chunk.
pub const MC_CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbabilityParams {
    /// Probability that a significant reference edge is not detected.
    pub p: f64,
    /// Candidate couples (first and second element groups both of size m).
    pub m: u32,
}

impl ProbabilityParams {
    pub fn new(p: f64, m: u32) -> Result<Self> {
        let params = Self { p, m };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_p(self.p)
    }
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain("detection failure probability must lie in [0, 1]"))
    }
}

/// Number of edges a basis couple needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BasisArity {
    /// Two distinct edges define the basis.
    #[default]
    Two,
    /// Edges on straight lines need a third edge.
    Three,
}

impl BasisArity {
    pub fn edges(self) -> u32 {
        match self {
            BasisArity::Two => 2,
            BasisArity::Three => 3,
        }
    }

    /// Probability that one couple survives detection.
    pub fn survival(self, p: f64) -> f64 {
        (1.0 - p).powi(self.edges() as i32)
    }

    pub fn miss_probability(self, params: &ProbabilityParams) -> Result<f64> {
        params.validate()?;
        Ok((1.0 - self.survival(params.p)).powf(params.m as f64))
    }

    pub fn expected_trials(self, p: f64) -> Result<f64> {
        check_p(p)?;
        if p == 1.0 {
            return Err(Error::Domain("no couple ever survives when p = 1"));
        }
        Ok(1.0 / self.survival(p))
    }
}

/// `[1 - (1 - p)^2]^m`.
pub fn miss_probability(params: &ProbabilityParams) -> Result<f64> {
    BasisArity::Two.miss_probability(params)
}

/// `(1 - p)^-2`, defined for `p` in `[0, 1)`.
pub fn expected_trials(p: f64) -> Result<f64> {
    BasisArity::Two.expected_trials(p)
}

/// Monte Carlo estimate of the miss probability.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct McEstimate {
    pub misses: u64,
    pub trials: u64,
    pub estimate: f64,
    /// Binomial standard error `sqrt(est (1 - est) / trials)`.
    pub stderr: f64,
}

impl McEstimate {
    pub fn from_counts(misses: u64, trials: u64) -> Self {
        let estimate = misses as f64 / trials as f64;
        let stderr = (estimate * (1.0 - estimate) / trials as f64).sqrt();
        Self { misses, trials, estimate, stderr }
    }
}

/// Number of chunks covering `trials`.
pub fn chunk_count(trials: u64) -> u64 {
    trials.div_ceil(MC_CHUNK)
}

/// Trials in chunk `chunk` out of `trials` in total.
pub fn chunk_len(trials: u64, chunk: u64) -> u64 {
    MC_CHUNK.min(trials - chunk * MC_CHUNK)
}

/// Simulates `count` trials of chunk `chunk` and returns the number of misses.
pub fn monte_carlo_chunk(params: &ProbabilityParams, arity: BasisArity, seed: u64, chunk: u64, count: u64) -> Result<u64> {
    params.validate()?;
    let undetected = Bernoulli::new(params.p).map_err(|_| Error::Domain("p"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let k = arity.edges();
    let mut misses = 0;
    for _ in 0..count {
        let any_usable = (0..params.m).any(|_| (0..k).all(|_| !undetected.sample(&mut rng)));
        if !any_usable {
            misses += 1;
        }
    }
    Ok(misses)
}

/// Sequential Monte Carlo run over `trials` trials.
pub fn monte_carlo_miss(params: &ProbabilityParams, arity: BasisArity, trials: u64, seed: u64) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required"));
    }
    let mut misses = 0;
    for chunk in 0..chunk_count(trials) {
        misses += monte_carlo_chunk(params, arity, seed, chunk, chunk_len(trials, chunk))?;
    }
    Ok(McEstimate::from_counts(misses, trials))
}
