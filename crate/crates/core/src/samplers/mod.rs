//! Random generation: reproducible streams, standard families, elliptical
//! slice sampling and the exact Gaussian linear-model posterior.

mod ess;
mod linear;

pub use ess::{ess_step, run_ess, EssChain, EssConfig, EssState};
pub use linear::{sample_linear_posterior, LinearPosterior};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::divergences::{DirichletParams, GammaParams, NormalParams};
use crate::error::{Error, Result};
use crate::special::log_sum_exp;

/// Generator handed out by [`RngStream`]. ChaCha is counter based, so every
/// stream id selects an independent, non-overlapping sequence.
pub type StreamRng = ChaCha8Rng;

/// A (seed, stream) pair naming one reproducible random sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Child stream for a nested index, e.g. (grid point, replication).
    pub fn child(&self, index: u64) -> Self {
        // splitmix64 finalizer keeps nearby (stream, index) pairs apart
        let mut z = self
            .stream
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(index.wrapping_add(1));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Self::new(self.seed, z ^ (z >> 31))
    }
}

pub fn sample_normal<R: Rng + ?Sized>(rng: &mut R, params: &NormalParams<f64>) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    params.mean + params.std_dev() * z
}

pub fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, params: &GammaParams<f64>) -> f64 {
    Gamma::new(params.shape, 1.0 / params.rate)
        .expect("validated gamma params")
        .sample(rng)
}

/// `ln G` for `G ~ Gamma(shape, 1)`, stable when `shape` is tiny and `G`
/// itself would underflow.
pub fn sample_ln_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    if shape >= 1.0 {
        Gamma::new(shape, 1.0)
            .expect("positive shape")
            .sample(rng)
            .ln()
    } else {
        // G(a) = G(a + 1) U^{1/a}
        let boosted = Gamma::new(shape + 1.0, 1.0)
            .expect("positive shape")
            .sample(rng);
        let u: f64 = rng.random();
        boosted.ln() + u.ln() / shape
    }
}

/// Dirichlet draw returned as log coordinates.
pub fn sample_dirichlet_ln<R: Rng + ?Sized>(
    rng: &mut R,
    params: &DirichletParams<f64>,
) -> Vec<f64> {
    let mut logs: Vec<f64> = params
        .alphas()
        .iter()
        .map(|&a| sample_ln_gamma(rng, a))
        .collect();
    let norm = log_sum_exp(&logs).expect("non-empty");
    logs.iter_mut().for_each(|l| *l -= norm);
    logs
}

pub fn sample_dirichlet<R: Rng + ?Sized>(rng: &mut R, params: &DirichletParams<f64>) -> Vec<f64> {
    sample_dirichlet_ln(rng, params)
        .into_iter()
        .map(f64::exp)
        .collect()
}

/// Multinomial counts by sequential conditional binomials.
pub fn sample_multinomial<R: Rng + ?Sized>(rng: &mut R, n: u64, probs: &[f64]) -> Result<Vec<u64>> {
    if probs.is_empty() {
        return Err(Error::Empty("sample_multinomial"));
    }
    if probs.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
        return Err(Error::InvalidParameter(
            "multinomial probabilities must be >= 0".into(),
        ));
    }
    let total: f64 = probs.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidParameter(
            "multinomial probabilities sum to 0".into(),
        ));
    }
    let mut counts = vec![0u64; probs.len()];
    let mut remaining_n = n;
    let mut remaining_mass = total;
    for (i, &p) in probs.iter().enumerate() {
        if remaining_n == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = remaining_n;
            break;
        }
        let cond = (p / remaining_mass).clamp(0.0, 1.0);
        let k = Binomial::new(remaining_n, cond)
            .expect("probability in [0,1]")
            .sample(rng);
        counts[i] = k;
        remaining_n -= k;
        remaining_mass -= p;
    }
    Ok(counts)
}

pub fn sample_poisson<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> Result<u64> {
    if rate == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(rate)
        .map_err(|e| Error::InvalidParameter(format!("poisson rate {rate}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}

pub fn sample_bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> Result<bool> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "bernoulli probability {p}"
        )));
    }
    Ok(rng.random::<f64>() < p)
}

/// The standard families by name, for callers that pick one at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum StandardDist {
    Normal { mean: f64, variance: f64 },
    Gamma { shape: f64, rate: f64 },
    Dirichlet(Vec<f64>),
    Multinomial { trials: u64, probs: Vec<f64> },
    Poisson(f64),
    Bernoulli(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Draw {
    Real(f64),
    Simplex(Vec<f64>),
    Counts(Vec<u64>),
    Count(u64),
    Flag(bool),
}

pub fn sample_standard<R: Rng + ?Sized>(dist: &StandardDist, rng: &mut R) -> Result<Draw> {
    Ok(match dist {
        StandardDist::Normal { mean, variance } => {
            Draw::Real(sample_normal(rng, &NormalParams::new(*mean, *variance)?))
        }
        StandardDist::Gamma { shape, rate } => {
            Draw::Real(sample_gamma(rng, &GammaParams::new(*shape, *rate)?))
        }
        StandardDist::Dirichlet(alphas) => Draw::Simplex(sample_dirichlet(
            rng,
            &DirichletParams::new(alphas.clone())?,
        )),
        StandardDist::Multinomial { trials, probs } => {
            Draw::Counts(sample_multinomial(rng, *trials, probs)?)
        }
        StandardDist::Poisson(rate) => {
            if !(*rate >= 0.0) {
                return Err(Error::InvalidParameter(format!("poisson rate {rate}")));
            }
            Draw::Count(sample_poisson(rng, *rate)?)
        }
        StandardDist::Bernoulli(p) => Draw::Flag(sample_bernoulli(rng, *p)?),
    })
}
