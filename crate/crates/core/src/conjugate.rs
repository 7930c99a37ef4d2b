//! Normal-Normal, Poisson-Gamma and Multinomial-Dirichlet models with exact
//! posteriors, normalized likelihoods and closed-form information.
//!
//! Each model offers two routes to its [`InfoPair`]: `info` evaluates the
//! expanded closed-form expressions directly, `info_via_divergences` composes
//! the family KL divergence with the posterior, prior and normalized
//! likelihood. The two must agree to rounding error.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergences::{
    kl_dirichlet, kl_gamma, kl_normal, DirichletParams, GammaParams, NormalParams,
};
use crate::error::{Error, Result};
use crate::samplers::{sample_dirichlet, sample_multinomial, RngStream};
use crate::scalar::Real;
use crate::special::{digamma_pos, ln_gamma_pos};

/// Prior information `u = D_KL(posterior, normalized likelihood)` and
/// likelihood information `v = D_KL(posterior, prior)`, in nats.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InfoPair<T> {
    pub prior_info: T,
    pub likelihood_info: T,
}

impl<T: Real> InfoPair<T> {
    pub fn new(prior_info: T, likelihood_info: T) -> Self {
        Self {
            prior_info,
            likelihood_info,
        }
    }
}

fn positive<T: Real>(name: &str, v: T) -> Result<T> {
    if v > T::zero() && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

/// `y_i | μ ~ N(μ, σ²)`, `μ ~ N(μ0, σ0²)`, summarized by `(n, ȳ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalNormalModel<T> {
    pub prior_mean: T,
    pub prior_variance: T,
    pub noise_variance: T,
    pub n: u64,
    pub ybar: T,
}

impl<T: Real> NormalNormalModel<T> {
    pub fn new(
        prior_mean: T,
        prior_variance: T,
        noise_variance: T,
        n: u64,
        ybar: T,
    ) -> Result<Self> {
        if !prior_mean.is_finite() || !ybar.is_finite() {
            return Err(Error::InvalidParameter(
                "prior mean and ȳ must be finite".into(),
            ));
        }
        Ok(Self {
            prior_mean,
            prior_variance: positive("prior variance", prior_variance)?,
            noise_variance: positive("noise variance", noise_variance)?,
            n,
            ybar,
        })
    }

    fn require_data(&self) -> Result<T> {
        if self.n == 0 {
            Err(Error::NoData("normal-normal model"))
        } else {
            Ok(T::from_count(self.n))
        }
    }

    pub fn prior(&self) -> NormalParams<T> {
        NormalParams {
            mean: self.prior_mean,
            variance: self.prior_variance,
        }
    }

    pub fn posterior(&self) -> Result<NormalParams<T>> {
        let n = self.require_data()?;
        let precision = self.prior_variance.recip() + n / self.noise_variance;
        let mean = (self.prior_mean / self.prior_variance + n * self.ybar / self.noise_variance)
            / precision;
        Ok(NormalParams {
            mean,
            variance: precision.recip(),
        })
    }

    /// `μ* ~ N(ȳ, σ²/n)`.
    pub fn normalized_likelihood(&self) -> Result<NormalParams<T>> {
        let n = self.require_data()?;
        Ok(NormalParams {
            mean: self.ybar,
            variance: self.noise_variance / n,
        })
    }

    pub fn info(&self) -> Result<InfoPair<T>> {
        let n = self.require_data()?;
        let (mu0, s0sq, ssq, ybar) = (
            self.prior_mean,
            self.prior_variance,
            self.noise_variance,
            self.ybar,
        );
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        let precision = s0sq.recip() + n / ssq;
        let post_mean = (ssq * mu0 + n * ybar * s0sq) / (ssq + n * s0sq);

        let dv = mu0 - post_mean;
        let v =
            (dv * dv - s0sq + precision.recip()) / (two * s0sq) + half * (s0sq * precision).ln();

        let du = ybar - post_mean;
        let u = (du * du - ssq / n + precision.recip()) * n / (two * ssq)
            + half * (ssq * precision / n).ln();
        Ok(InfoPair::new(u, v))
    }

    pub fn info_via_divergences(&self) -> Result<InfoPair<T>> {
        let post = self.posterior()?;
        Ok(InfoPair::new(
            kl_normal(&post, &self.normalized_likelihood()?),
            kl_normal(&post, &self.prior()),
        ))
    }
}

/// Expected prior information `E_Y[u] = ½ ln((n + 1) / n)` for the
/// Normal-Normal model with `μ0 = 0`, `σ = σ0 = 1`, data drawn from the
/// marginal. Infinite at `n = 0`.
pub fn nn_expected_prior_info<T: Real>(n: u64) -> T {
    let n = T::from_count(n);
    T::lit(0.5) * ((n + T::one()) / n).ln()
}

/// `y_i | λ ~ Poisson(λ)`, `λ ~ Gamma(α, β)` (rate β), summarized by `n` and
/// the integer total `Σ y_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonGammaModel<T> {
    pub shape: T,
    pub rate: T,
    pub n: u64,
    pub total: u64,
}

impl<T: Real> PoissonGammaModel<T> {
    pub fn new(shape: T, rate: T, n: u64, total: u64) -> Result<Self> {
        if n == 0 && total > 0 {
            return Err(Error::InvalidParameter(
                "positive total with no observations".into(),
            ));
        }
        Ok(Self {
            shape: positive("gamma shape", shape)?,
            rate: positive("gamma rate", rate)?,
            n,
            total,
        })
    }

    pub fn ybar(&self) -> T {
        if self.n == 0 {
            T::zero()
        } else {
            T::from_count(self.total) / T::from_count(self.n)
        }
    }

    pub fn prior(&self) -> GammaParams<T> {
        GammaParams {
            shape: self.shape,
            rate: self.rate,
        }
    }

    pub fn posterior(&self) -> GammaParams<T> {
        GammaParams {
            shape: self.shape + T::from_count(self.total),
            rate: self.rate + T::from_count(self.n),
        }
    }

    /// `λ* ~ Gamma(nȳ + 1, n)`; undefined without data.
    pub fn normalized_likelihood(&self) -> Result<GammaParams<T>> {
        if self.n == 0 {
            return Err(Error::NoData("poisson likelihood normalization"));
        }
        Ok(GammaParams {
            shape: T::from_count(self.total) + T::one(),
            rate: T::from_count(self.n),
        })
    }

    pub fn info(&self) -> Result<InfoPair<T>> {
        if self.n == 0 {
            return Err(Error::NoData("poisson-gamma information"));
        }
        let (a, b) = (self.shape, self.rate);
        let n = T::from_count(self.n);
        let s = T::from_count(self.total);
        let post_shape = a + s;
        let post_rate = b + n;
        let psi = digamma_pos(post_shape);
        let lg_post = ln_gamma_pos(post_shape);

        let v = s * psi - lg_post + ln_gamma_pos(a) + a * (post_rate.ln() - b.ln())
            - post_shape * n / post_rate;
        let u = (a - T::one()) * psi - lg_post
            + ln_gamma_pos(s + T::one())
            + (s + T::one()) * (post_rate.ln() - n.ln())
            - post_shape * b / post_rate;
        Ok(InfoPair::new(u, v))
    }

    pub fn info_via_divergences(&self) -> Result<InfoPair<T>> {
        let post = self.posterior();
        Ok(InfoPair::new(
            kl_gamma(&post, &self.normalized_likelihood()?),
            kl_gamma(&post, &self.prior()),
        ))
    }
}

/// Counts `x ~ Multinomial(n, p)`, `p ~ Dirichlet(α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultinomialDirichletModel<T> {
    alphas: Vec<T>,
    counts: Vec<u64>,
}

impl<T: Real> MultinomialDirichletModel<T> {
    pub fn new(alphas: Vec<T>, counts: Vec<u64>) -> Result<Self> {
        if alphas.len() != counts.len() {
            return Err(Error::LengthMismatch {
                expected: alphas.len(),
                found: counts.len(),
            });
        }
        DirichletParams::new(alphas.clone())?;
        Ok(Self { alphas, counts })
    }

    pub fn alphas(&self) -> &[T] {
        &self.alphas
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn prior(&self) -> DirichletParams<T> {
        DirichletParams::new(self.alphas.clone()).expect("validated")
    }

    pub fn posterior(&self) -> DirichletParams<T> {
        let post = self
            .alphas
            .iter()
            .zip(&self.counts)
            .map(|(&a, &x)| a + T::from_count(x))
            .collect();
        DirichletParams::new(post).expect("validated")
    }

    /// `p* ~ Dirichlet(x + 1)`; with no data this is the flat distribution.
    pub fn normalized_likelihood(&self) -> DirichletParams<T> {
        let nl = self
            .counts
            .iter()
            .map(|&x| T::from_count(x) + T::one())
            .collect();
        DirichletParams::new(nl).expect("positive")
    }

    pub fn info(&self) -> InfoPair<T> {
        let k = T::from_usize(self.alphas.len()).unwrap();
        let n = T::from_count(self.n());
        let alpha0 = self.alphas.iter().fold(T::zero(), |acc, &a| acc + a);
        let psi_total = digamma_pos(alpha0 + n);
        let lg_total = ln_gamma_pos(alpha0 + n);

        let mut v = lg_total - ln_gamma_pos(alpha0);
        let mut u = lg_total - ln_gamma_pos(n + k);
        for (&a, &x) in self.alphas.iter().zip(&self.counts) {
            let x = T::from_count(x);
            let lg_post = ln_gamma_pos(a + x);
            let centered_psi = digamma_pos(a + x) - psi_total;
            v = v - lg_post + ln_gamma_pos(a) + x * centered_psi;
            u = u - lg_post + ln_gamma_pos(x + T::one()) + (a - T::one()) * centered_psi;
        }
        InfoPair::new(u, v)
    }

    pub fn info_via_divergences(&self) -> InfoPair<T> {
        let post = self.posterior();
        InfoPair::new(
            kl_dirichlet(&post, &self.normalized_likelihood()).expect("same dimension"),
            kl_dirichlet(&post, &self.prior()).expect("same dimension"),
        )
    }
}

/// One point of a prior-information decay curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub n: u64,
    pub mean_prior_info: f64,
    pub sd_prior_info: f64,
    pub median_prior_info: f64,
    pub replications: usize,
}

impl DecayPoint {
    pub(crate) fn from_samples(n: u64, mut values: Vec<f64>) -> Self {
        let reps = values.len();
        let mean = values.iter().sum::<f64>() / reps as f64;
        let sd = if reps > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt()
        } else {
            0.0
        };
        values.sort_by(f64::total_cmp);
        let median = if reps % 2 == 1 {
            values[reps / 2]
        } else {
            0.5 * (values[reps / 2 - 1] + values[reps / 2])
        };
        Self {
            n,
            mean_prior_info: mean,
            sd_prior_info: sd,
            median_prior_info: median,
            replications: reps,
        }
    }
}

/// Draws `p ~ Dir(α·1_K)`, then `x ~ Multinomial(n, p)` per replication and
/// averages the closed-form prior information for every `n` in `n_grid`.
///
/// Replication `r` at grid index `i` uses its own stream, so the curve does
/// not depend on thread scheduling.
pub fn md_decay_curve(
    alpha: f64,
    k: usize,
    n_grid: &[u64],
    replications: usize,
    seed: u64,
) -> Result<Vec<DecayPoint>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "need K >= 2 categories, got {k}"
        )));
    }
    if replications == 0 || n_grid.is_empty() || n_grid.contains(&0) {
        return Err(Error::InvalidParameter(
            "decay curve needs replications >= 1 and sample sizes >= 1".into(),
        ));
    }
    let prior = DirichletParams::new(vec![positive("alpha", alpha)?; k])?;
    let root = RngStream::new(seed, 0);
    n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let grid_stream = root.child(i as u64);
            let values = (0..replications)
                .into_par_iter()
                .map(|r| {
                    let mut rng = grid_stream.child(r as u64).rng();
                    md_prior_info_draw(&prior, n, &mut rng)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(DecayPoint::from_samples(n, values))
        })
        .collect()
}

fn md_prior_info_draw<R: Rng + ?Sized>(
    prior: &DirichletParams<f64>,
    n: u64,
    rng: &mut R,
) -> Result<f64> {
    let p = sample_dirichlet(rng, prior);
    let counts = sample_multinomial(rng, n, &p)?;
    let model = MultinomialDirichletModel::new(prior.alphas().to_vec(), counts)?;
    Ok(model.info().prior_info)
}
