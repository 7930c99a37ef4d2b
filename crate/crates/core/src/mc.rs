//! Monte Carlo estimators of prior and likelihood information from posterior
//! draws, with delta-method standard errors.
//!
//! With `c1 = ∫ p(y|θ) dθ` and `c2 = p(y)`, posterior draws satisfy
//! `E[1/p(θ)] = c1/c2`, which gives
//! `u = E[log p(θ)] + log(c1/c2)`. Likewise `E[1/p(y|θ)] = 1/c2` gives
//! `v = E[log p(y|θ)] - log c2`. Each estimator evaluates the harmonic-mean
//! term on the first `N1` draws and the log-mean term on the rest, so the two
//! halves are independent.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conjugate::{MultinomialDirichletModel, NormalNormalModel, PoissonGammaModel};
use crate::error::{Error, Result};
use crate::samplers::{sample_dirichlet_ln, sample_gamma, sample_normal, RngStream};
use crate::special::{log_mean_exp, log_sum_exp};

pub const DEFAULT_SPLIT_FRACTION: f64 = 0.5;

/// Share of the harmonic-mean sum carried by its largest 1% of terms above
/// which an estimate is flagged as tail-dominated.
const TAIL_SHARE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrawSource {
    Posterior,
    NormalizedLikelihood,
}

/// Log prior and log likelihood at a set of draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    log_prior: Vec<f64>,
    log_likelihood: Vec<f64>,
    source: DrawSource,
}

fn check_values(what: &'static str, values: &[f64]) -> Result<()> {
    for (i, &v) in values.iter().enumerate() {
        if v == f64::NEG_INFINITY {
            return Err(Error::Support(format!(
                "{what} density is zero at draw {i}"
            )));
        }
        if !v.is_finite() {
            return Err(Error::NonFinite {
                source_name: what,
                node: i,
                value: v,
            });
        }
    }
    Ok(())
}

impl SampleBatch {
    pub fn new(log_prior: Vec<f64>, log_likelihood: Vec<f64>, source: DrawSource) -> Result<Self> {
        if log_prior.len() != log_likelihood.len() {
            return Err(Error::LengthMismatch {
                expected: log_prior.len(),
                found: log_likelihood.len(),
            });
        }
        if log_prior.len() < 2 {
            return Err(Error::InvalidParameter(
                "a sample batch needs at least 2 draws".into(),
            ));
        }
        check_values("prior", &log_prior)?;
        check_values("likelihood", &log_likelihood)?;
        Ok(Self {
            log_prior,
            log_likelihood,
            source,
        })
    }

    /// Evaluates both densities at each draw.
    pub fn from_draws<D, P, L>(
        draws: &[D],
        log_prior: P,
        log_likelihood: L,
        source: DrawSource,
    ) -> Result<Self>
    where
        P: Fn(&D) -> f64,
        L: Fn(&D) -> f64,
    {
        Self::new(
            draws.iter().map(&log_prior).collect(),
            draws.iter().map(&log_likelihood).collect(),
            source,
        )
    }

    pub fn len(&self) -> usize {
        self.log_prior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_prior.is_empty()
    }

    pub fn source(&self) -> DrawSource {
        self.source
    }

    pub fn log_prior(&self) -> &[f64] {
        &self.log_prior
    }

    pub fn log_likelihood(&self) -> &[f64] {
        &self.log_likelihood
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    PriorInfo,
    LikelihoodInfo,
    LogRatioFromNormalizedLikelihood,
    PriorInfoWithNormalizedLikelihood,
}

/// A point estimate in nats with its delta-method standard error. Values may
/// be negative and are never clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoEstimate {
    pub value: f64,
    pub std_error: f64,
    /// Draws used by the harmonic-mean term and by the log-mean term.
    pub n_used: (usize, usize),
    pub method: EstimateMethod,
    /// The largest 1% of reciprocal-density terms make up more than half of
    /// their sum, so the estimate and its standard error are unreliable.
    pub tail_risk: bool,
}

/// Sample mean and variance, shifted by the first value so that constant
/// input gives exactly zero variance.
fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let shift = xs[0];
    let mean_d = xs.iter().map(|x| x - shift).sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - shift - mean_d).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (shift + mean_d, var)
}

/// `log mean exp(logs)` and the delta-method variance of that log,
/// `V[w] / (N mean(w)^2)`, computed on rescaled weights.
fn log_mean_with_var(logs: &[f64]) -> Result<(f64, f64)> {
    let lme = log_mean_exp(logs)?;
    let w: Vec<f64> = logs.iter().map(|l| (l - lme).exp()).collect();
    let (m, v) = mean_var(&w);
    Ok((lme, v / (logs.len() as f64 * m * m)))
}

fn tail_dominated(logs: &[f64]) -> Result<bool> {
    let mut sorted = logs.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let top = sorted.len().div_ceil(100);
    Ok(log_sum_exp(&sorted[..top])? - log_sum_exp(&sorted)? > TAIL_SHARE.ln())
}

fn split(n: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "split fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let n1 = (fraction * n as f64).round() as usize;
    if n1 == 0 || n1 == n {
        return Err(Error::InvalidParameter(format!(
            "split fraction {fraction} leaves an empty half of {n} draws"
        )));
    }
    Ok(n1)
}

/// `log mean(1/f)` on the first `N1` values plus `mean log f` on the rest.
fn split_estimate(log_f: &[f64], fraction: f64, method: EstimateMethod) -> Result<InfoEstimate> {
    let n1 = split(log_f.len(), fraction)?;
    let (head, tail) = log_f.split_at(n1);
    let neg: Vec<f64> = head.iter().map(|l| -l).collect();
    let (harmonic, harmonic_var) = log_mean_with_var(&neg)?;
    let (mean_log, var_log) = mean_var(tail);
    Ok(InfoEstimate {
        value: harmonic + mean_log,
        std_error: (harmonic_var + var_log / tail.len() as f64).sqrt(),
        n_used: (n1, tail.len()),
        method,
        tail_risk: tail_dominated(&neg)?,
    })
}

fn require_source(batch: &SampleBatch, want: DrawSource) -> Result<()> {
    if batch.source != want {
        return Err(Error::InvalidParameter(format!(
            "estimator needs {want:?} draws, got {:?}",
            batch.source
        )));
    }
    Ok(())
}

/// Prior information from posterior draws. The prior must be normalized.
pub fn estimate_prior_info(batch: &SampleBatch, split_fraction: f64) -> Result<InfoEstimate> {
    require_source(batch, DrawSource::Posterior)?;
    split_estimate(&batch.log_prior, split_fraction, EstimateMethod::PriorInfo)
}

/// Likelihood information from posterior draws. The prior must be
/// normalized; constants in the likelihood cancel.
pub fn estimate_likelihood_info(batch: &SampleBatch, split_fraction: f64) -> Result<InfoEstimate> {
    require_source(batch, DrawSource::Posterior)?;
    split_estimate(
        &batch.log_likelihood,
        split_fraction,
        EstimateMethod::LikelihoodInfo,
    )
}

/// `log(c1/c2) = -log E_L[p(θ)]` from draws of the normalized likelihood,
/// using every draw.
pub fn estimate_log_ratio_from_nl(nl_batch: &SampleBatch) -> Result<InfoEstimate> {
    require_source(nl_batch, DrawSource::NormalizedLikelihood)?;
    let (lme, var) = log_mean_with_var(&nl_batch.log_prior)?;
    Ok(InfoEstimate {
        value: -lme,
        std_error: var.sqrt(),
        n_used: (nl_batch.len(), nl_batch.len()),
        method: EstimateMethod::LogRatioFromNormalizedLikelihood,
        tail_risk: tail_dominated(&nl_batch.log_prior)?,
    })
}

/// Prior information as `mean log p(θ)` over posterior draws plus the
/// log-ratio estimated from normalized-likelihood draws. This avoids the
/// harmonic mean when normalized-likelihood draws (or a surrogate for them)
/// are available.
pub fn estimate_prior_info_with_nl(
    posterior: &SampleBatch,
    nl_batch: &SampleBatch,
) -> Result<InfoEstimate> {
    require_source(posterior, DrawSource::Posterior)?;
    let ratio = estimate_log_ratio_from_nl(nl_batch)?;
    let (mean_log, var_log) = mean_var(&posterior.log_prior);
    Ok(InfoEstimate {
        value: mean_log + ratio.value,
        std_error: (var_log / posterior.len() as f64 + ratio.std_error.powi(2)).sqrt(),
        n_used: (nl_batch.len(), posterior.len()),
        method: EstimateMethod::PriorInfoWithNormalizedLikelihood,
        tail_risk: ratio.tail_risk,
    })
}

/// A conjugate model whose exact posterior can be sampled and whose
/// information is known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum ConjugateCase {
    NormalNormal(NormalNormalModel<f64>),
    PoissonGamma(PoissonGammaModel<f64>),
    MultinomialDirichlet(MultinomialDirichletModel<f64>),
}

impl ConjugateCase {
    pub fn exact_prior_info(&self) -> Result<f64> {
        Ok(match self {
            Self::NormalNormal(m) => m.info()?.prior_info,
            Self::PoissonGamma(m) => m.info()?.prior_info,
            Self::MultinomialDirichlet(m) => m.info().prior_info,
        })
    }

    pub fn exact_likelihood_info(&self) -> Result<f64> {
        Ok(match self {
            Self::NormalNormal(m) => m.info()?.likelihood_info,
            Self::PoissonGamma(m) => m.info()?.likelihood_info,
            Self::MultinomialDirichlet(m) => m.info().likelihood_info,
        })
    }

    /// `draws` exact posterior draws with log prior and log likelihood (up to
    /// a constant) evaluated at each.
    pub fn posterior_batch<R: Rng + ?Sized>(
        &self,
        draws: usize,
        rng: &mut R,
    ) -> Result<SampleBatch> {
        let mut lp = Vec::with_capacity(draws);
        let mut ll = Vec::with_capacity(draws);
        match self {
            Self::NormalNormal(m) => {
                let post = m.posterior()?;
                let prior = m.prior();
                let n = m.n as f64;
                for _ in 0..draws {
                    let mu = sample_normal(rng, &post);
                    lp.push(prior.ln_pdf(mu));
                    ll.push(-0.5 * n * (m.ybar - mu).powi(2) / m.noise_variance);
                }
            }
            Self::PoissonGamma(m) => {
                let post = m.posterior();
                let prior = m.prior();
                let (n, total) = (m.n as f64, m.total as f64);
                for _ in 0..draws {
                    let lambda = sample_gamma(rng, &post);
                    lp.push(prior.ln_pdf(lambda));
                    ll.push(
                        if m.total == 0 {
                            0.0
                        } else {
                            total * lambda.ln()
                        } - n * lambda,
                    );
                }
            }
            Self::MultinomialDirichlet(m) => {
                let post = m.posterior();
                let prior = m.prior();
                for _ in 0..draws {
                    let logs = sample_dirichlet_ln(rng, &post);
                    lp.push(prior.ln_pdf_from_logs(&logs));
                    ll.push(
                        m.counts()
                            .iter()
                            .zip(&logs)
                            .filter(|(c, _)| **c > 0)
                            .map(|(&c, l)| c as f64 * l)
                            .sum(),
                    );
                }
            }
        }
        SampleBatch::new(lp, ll, DrawSource::Posterior)
    }
}

/// Truth against the spread of repeated prior-information estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub truth: f64,
    pub mean_estimate: f64,
    pub sd_estimate: f64,
    pub draws: usize,
    pub estimates: Vec<f64>,
}

/// Runs `replications` independent prior-information estimates, each from
/// `draws` exact posterior draws. Replication `r` uses stream `r` of `seed`.
pub fn validate_against_closed_form(
    case: &ConjugateCase,
    draws: usize,
    replications: usize,
    seed: u64,
) -> Result<ValidationRow> {
    if replications == 0 {
        return Err(Error::InvalidParameter(
            "need at least one replication".into(),
        ));
    }
    let truth = case.exact_prior_info()?;
    let estimates = (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(seed, r as u64).rng();
            let batch = case.posterior_batch(draws, &mut rng)?;
            Ok(estimate_prior_info(&batch, DEFAULT_SPLIT_FRACTION)?.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, var) = mean_var(&estimates);
    Ok(ValidationRow {
        truth,
        mean_estimate: mean,
        sd_estimate: var.sqrt(),
        draws,
        estimates,
    })
}
