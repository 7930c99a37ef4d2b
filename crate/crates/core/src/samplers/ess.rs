//! Elliptical slice sampling for models with a zero-mean `N(0, σ²I)` prior.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EssState {
    pub point: Vec<f64>,
    pub log_likelihood: f64,
    /// Diagonal prior variance σ² (the prior is `N(0, σ²I)`).
    pub prior_variance: f64,
    pub iteration: u64,
}

impl EssState {
    pub fn new<F>(point: Vec<f64>, prior_variance: f64, log_likelihood: &mut F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> f64,
    {
        if !(prior_variance > 0.0 && prior_variance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "prior variance must be positive, got {prior_variance}"
            )));
        }
        let ll = log_likelihood(&point);
        if !ll.is_finite() {
            return Err(Error::Sampler(format!("initial log-likelihood is {ll}")));
        }
        Ok(Self {
            point,
            log_likelihood: ll,
            prior_variance,
            iteration: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }
}

/// Run settings for [`run_ess`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EssConfig {
    pub burn_in: usize,
    pub thin: usize,
    pub draws: usize,
    pub max_shrinks: usize,
}

impl Default for EssConfig {
    fn default() -> Self {
        Self {
            burn_in: 1000,
            thin: 10,
            draws: 100,
            max_shrinks: 1000,
        }
    }
}

/// One transition. The returned state's log-likelihood is above the slice
/// height drawn at the start of the step.
pub fn ess_step<F, R>(state: EssState, log_likelihood: &mut F, rng: &mut R) -> Result<EssState>
where
    F: FnMut(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    ess_step_capped(state, log_likelihood, rng, EssConfig::default().max_shrinks)
}

fn ess_step_capped<F, R>(
    state: EssState,
    log_likelihood: &mut F,
    rng: &mut R,
    max_shrinks: usize,
) -> Result<EssState>
where
    F: FnMut(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    let sd = state.prior_variance.sqrt();
    let nu: Vec<f64> = (0..state.dim())
        .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let u: f64 = rng.random();
    let threshold = state.log_likelihood + u.ln();

    let mut angle = rng.random::<f64>() * 2.0 * PI;
    let (mut lo, mut hi) = (angle - 2.0 * PI, angle);
    let mut proposal = vec![0.0; state.dim()];
    let mut last_ll = f64::NAN;
    for _ in 0..=max_shrinks {
        let (s, c) = angle.sin_cos();
        for ((p, f), n) in proposal.iter_mut().zip(&state.point).zip(&nu) {
            *p = f * c + n * s;
        }
        last_ll = log_likelihood(&proposal);
        if last_ll > threshold {
            return Ok(EssState {
                point: proposal,
                log_likelihood: last_ll,
                prior_variance: state.prior_variance,
                iteration: state.iteration + 1,
            });
        }
        if angle < 0.0 {
            lo = angle;
        } else {
            hi = angle;
        }
        angle = lo + rng.random::<f64>() * (hi - lo);
    }
    Err(Error::Sampler(format!(
        "no acceptable point after {max_shrinks} shrinkage steps (last log-likelihood {last_ll})"
    )))
}

#[derive(Debug, Clone)]
pub struct EssChain {
    pub draws: Vec<Vec<f64>>,
    pub config: EssConfig,
    pub final_state: EssState,
}

/// Burn in, then keep every `thin`-th state until `draws` points are stored.
pub fn run_ess<F, R>(
    initial: EssState,
    log_likelihood: &mut F,
    config: EssConfig,
    rng: &mut R,
) -> Result<EssChain>
where
    F: FnMut(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    if config.thin == 0 {
        return Err(Error::InvalidParameter(
            "thinning interval must be >= 1".into(),
        ));
    }
    let mut state = initial;
    for _ in 0..config.burn_in {
        state = ess_step_capped(state, log_likelihood, rng, config.max_shrinks)?;
    }
    let mut draws = Vec::with_capacity(config.draws);
    while draws.len() < config.draws {
        for _ in 0..config.thin {
            state = ess_step_capped(state, log_likelihood, rng, config.max_shrinks)?;
        }
        draws.push(state.point.clone());
    }
    Ok(EssChain {
        draws,
        config,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngStream;

    #[test]
    fn step_stays_above_slice_and_counts_iterations() {
        let mut rng = RngStream::new(10, 0).rng();
        let mut ll = |x: &[f64]| -0.5 * x.iter().map(|v| (v - 1.0).powi(2)).sum::<f64>();
        let mut state = EssState::new(vec![0.0, 0.0], 2.0, &mut ll).unwrap();
        for i in 0..50 {
            let prev = state.log_likelihood;
            state = ess_step(state, &mut ll, &mut rng).unwrap();
            assert_eq!(state.iteration, i + 1);
            assert!(state.log_likelihood.is_finite());
            assert!(state.log_likelihood > prev + (1e-300f64).ln());
        }
    }

    #[test]
    fn rejects_bad_initial_state() {
        let mut ll = |_: &[f64]| f64::NEG_INFINITY;
        assert!(EssState::new(vec![0.0], 1.0, &mut ll).is_err());
        let mut ok = |_: &[f64]| 0.0;
        assert!(EssState::new(vec![0.0], 0.0, &mut ok).is_err());
    }

    #[test]
    fn pathological_likelihood_reports_failure() {
        let mut rng = RngStream::new(11, 0).rng();
        let mut calls = 0usize;
        // finite only at the starting point, so every proposal is rejected
        let mut ll = |x: &[f64]| {
            calls += 1;
            if calls == 1 || x[0] == 0.25 {
                0.0
            } else {
                f64::NAN
            }
        };
        let state = EssState::new(vec![0.25], 1.0, &mut ll).unwrap();
        let err = ess_step_capped(state, &mut ll, &mut rng, 50).unwrap_err();
        assert!(matches!(err, Error::Sampler(_)));
    }

    #[test]
    fn chain_shape_follows_config() {
        let mut rng = RngStream::new(12, 0).rng();
        let mut ll = |_: &[f64]| 0.0;
        let init = EssState::new(vec![0.0; 3], 1.0, &mut ll).unwrap();
        let cfg = EssConfig {
            burn_in: 5,
            thin: 2,
            draws: 7,
            max_shrinks: 1000,
        };
        let chain = run_ess(init, &mut ll, cfg, &mut rng).unwrap();
        assert_eq!(chain.draws.len(), 7);
        assert_eq!(chain.final_state.iteration, 5 + 2 * 7);
    }
}
