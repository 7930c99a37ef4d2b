//! Exact computations for models with finitely many parameter values and
//! outcomes.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::error::{Error, Result};
use crate::samplers::RngStream;

/// Probability vectors are accepted when they sum to one within this
/// tolerance.
const MASS_TOLERANCE: f64 = 1e-9;

/// Prior masses over `m` parameter values and an `m x s` table of outcome
/// probabilities `p(y | θ)`. Prior masses must be positive; likelihood
/// entries may be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteModel {
    prior: Vec<f64>,
    likelihood: Vec<Vec<f64>>,
}

fn check_masses(what: &str, masses: &[f64], allow_zero: bool) -> Result<()> {
    if masses.is_empty() {
        return Err(Error::InvalidParameter(format!("{what} is empty")));
    }
    let bad = |m: &f64| !m.is_finite() || *m < 0.0 || (!allow_zero && *m == 0.0);
    if masses.iter().any(bad) {
        return Err(Error::InvalidParameter(format!(
            "{what} has an invalid mass"
        )));
    }
    let total: f64 = masses.iter().sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidParameter(format!(
            "{what} sums to {total}, not 1"
        )));
    }
    Ok(())
}

impl FiniteModel {
    pub fn new(prior: Vec<f64>, likelihood: Vec<Vec<f64>>) -> Result<Self> {
        check_masses("prior", &prior, false)?;
        if likelihood.len() != prior.len() {
            return Err(Error::LengthMismatch {
                expected: prior.len(),
                found: likelihood.len(),
            });
        }
        let outcomes = likelihood[0].len();
        for (i, row) in likelihood.iter().enumerate() {
            if row.len() != outcomes {
                return Err(Error::LengthMismatch {
                    expected: outcomes,
                    found: row.len(),
                });
            }
            check_masses(&format!("likelihood row {i}"), row, true)?;
        }
        Ok(Self { prior, likelihood })
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn likelihood(&self) -> &[Vec<f64>] {
        &self.likelihood
    }

    pub fn n_params(&self) -> usize {
        self.prior.len()
    }

    pub fn n_outcomes(&self) -> usize {
        self.likelihood[0].len()
    }

    /// `p(θ, y)` as an `m x s` table.
    pub fn joint(&self) -> Vec<Vec<f64>> {
        self.prior
            .iter()
            .zip(&self.likelihood)
            .map(|(p, row)| row.iter().map(|l| p * l).collect())
            .collect()
    }

    pub fn marginal(&self, y: usize) -> f64 {
        self.prior
            .iter()
            .zip(&self.likelihood)
            .map(|(p, row)| p * row[y])
            .sum()
    }
}

pub fn finite_posterior(model: &FiniteModel, y: usize) -> Result<Vec<f64>> {
    if y >= model.n_outcomes() {
        return Err(Error::InvalidParameter(format!(
            "outcome index {y} out of range for {} outcomes",
            model.n_outcomes()
        )));
    }
    let evidence = model.marginal(y);
    if evidence == 0.0 {
        return Err(Error::Support(format!(
            "outcome {y} has probability zero under every parameter"
        )));
    }
    Ok(model
        .prior
        .iter()
        .zip(&model.likelihood)
        .map(|(p, row)| p * row[y] / evidence)
        .collect())
}

/// Discrete KL divergence. Terms where `p` is zero contribute nothing.
pub fn kl_discrete(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a / b).ln())
        .sum()
}

/// `E_Y[v] = Σ_y p(y) D_KL(p(θ|y), p(θ))`, summed exactly over outcomes.
pub fn finite_avg_likelihood_info(model: &FiniteModel) -> f64 {
    (0..model.n_outcomes())
        .filter(|&y| model.marginal(y) > 0.0)
        .map(|y| {
            let post = finite_posterior(model, y).expect("index in range");
            model.marginal(y) * kl_discrete(&post, &model.prior)
        })
        .sum()
}

/// `I(θ; Y)` straight from a joint probability table.
pub fn mutual_information(joint: &[Vec<f64>]) -> f64 {
    let row: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let cols = joint.first().map_or(0, Vec::len);
    let col: Vec<f64> = (0..cols)
        .map(|j| joint.iter().map(|r| r[j]).sum())
        .collect();
    let mut total = 0.0;
    for (i, r) in joint.iter().enumerate() {
        for (j, &pij) in r.iter().enumerate() {
            if pij > 0.0 {
                total += pij * (pij / (row[i] * col[j])).ln();
            }
        }
    }
    total
}

fn normalize_logs(logs: &[f64]) -> Vec<f64> {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Prior information after each of `n_max` i.i.d. draws from
/// `p(y | θ_true)`. Element `k` uses the first `k` observations, so the
/// result has `n_max + 1` entries and starts at `D_KL(prior, uniform)`.
///
/// The normalized likelihood is the posterior under a uniform prior.
pub fn finite_prior_info_trajectory(
    model: &FiniteModel,
    true_theta: usize,
    n_max: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if true_theta >= model.n_params() {
        return Err(Error::InvalidParameter(format!(
            "true parameter index {true_theta} out of range for {} values",
            model.n_params()
        )));
    }
    let sampler = WeightedIndex::new(&model.likelihood[true_theta])
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = RngStream::new(seed, true_theta as u64).rng();
    let log_prior: Vec<f64> = model.prior.iter().map(|p| p.ln()).collect();
    let mut log_lik = vec![0.0; model.n_params()];
    let mut out = Vec::with_capacity(n_max + 1);
    for k in 0..=n_max {
        if k > 0 {
            let y = sampler.sample(&mut rng);
            for (ll, row) in log_lik.iter_mut().zip(&model.likelihood) {
                *ll += row[y].ln();
            }
        }
        let joint: Vec<f64> = log_prior.iter().zip(&log_lik).map(|(a, b)| a + b).collect();
        let post = normalize_logs(&joint);
        let nl = normalize_logs(&log_lik);
        out.push(kl_discrete(&post, &nl));
    }
    Ok(out)
}
