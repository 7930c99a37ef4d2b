use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::persist::{format_f64, format_opt_f64, Tabular};
use crate::conjugate::{
    md_decay_curve, DecayPoint, MultinomialDirichletModel, NormalNormalModel, PoissonGammaModel,
};
use crate::error::{Error, Result};
use crate::mc::{validate_against_closed_form, ConjugateCase};
use crate::oracle::{finite_prior_info_trajectory, FiniteModel};
use crate::samplers::{sample_poisson, RngStream};

/// Model and data-generating setup for a decay study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum DecayFamily {
    /// Symmetric `Dir(α)` prior over `k` categories. Each replication draws
    /// its own true probabilities from the prior.
    MultinomialDirichlet { alpha: f64, k: usize },
    /// Data `ȳ ~ N(true_mean, σ²/n)`.
    NormalNormal {
        prior_mean: f64,
        prior_variance: f64,
        noise_variance: f64,
        true_mean: f64,
    },
    /// Counts `Σy ~ Poisson(n · true_rate)`.
    PoissonGamma {
        shape: f64,
        rate: f64,
        true_rate: f64,
    },
    /// Observations drawn i.i.d. from row `true_theta` of the likelihood.
    Finite {
        prior: Vec<f64>,
        likelihood: Vec<Vec<f64>>,
        true_theta: usize,
    },
}

impl DecayFamily {
    /// Three parameter values, four outcomes, a lopsided prior that puts
    /// little mass on the true value.
    pub fn default_finite() -> Self {
        Self::Finite {
            prior: vec![0.6, 0.3, 0.1],
            likelihood: vec![
                vec![0.4, 0.3, 0.2, 0.1],
                vec![0.25, 0.25, 0.25, 0.25],
                vec![0.1, 0.2, 0.3, 0.4],
            ],
            true_theta: 2,
        }
    }

    /// Number of free parameters when the family has a natural `K / n`
    /// reference curve.
    fn reference_dimension(&self) -> Option<usize> {
        match self {
            Self::MultinomialDirichlet { k, .. } => Some(*k),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayStudy {
    pub family: DecayFamily,
    pub n_grid: Vec<u64>,
    pub replications: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub n: u64,
    pub mean_prior_info: f64,
    pub sd_prior_info: f64,
    pub median_prior_info: f64,
    pub replications: usize,
    /// `K / n` for the multinomial family.
    pub k_over_n: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayResult {
    pub config: DecayStudy,
    pub rows: Vec<DecayRow>,
}

impl Tabular for DecayResult {
    fn csv_header(&self) -> Vec<&'static str> {
        vec![
            "n",
            "mean_prior_info",
            "sd_prior_info",
            "median_prior_info",
            "replications",
            "k_over_n",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    format_f64(r.mean_prior_info),
                    format_f64(r.sd_prior_info),
                    format_f64(r.median_prior_info),
                    r.replications.to_string(),
                    format_opt_f64(r.k_over_n),
                ]
            })
            .collect()
    }
}

/// Replicated prior information at each sample size. Grid point `i`,
/// replication `r` draws from stream `child(i).child(r)` of `(seed, 0)`;
/// the finite family reuses one path per replication across all `n`.
pub fn run_decay_study(study: &DecayStudy) -> Result<DecayResult> {
    if study.replications == 0 || study.n_grid.is_empty() {
        return Err(Error::InvalidParameter(
            "decay study needs replications >= 1 and a non-empty n grid".into(),
        ));
    }
    let mut n_grid = study.n_grid.clone();
    n_grid.sort_unstable();
    n_grid.dedup();
    let root = RngStream::new(study.seed, 0);
    let reps = study.replications;

    let points: Vec<DecayPoint> = match &study.family {
        DecayFamily::MultinomialDirichlet { alpha, k } => {
            md_decay_curve(*alpha, *k, &n_grid, reps, study.seed)?
        }
        DecayFamily::NormalNormal {
            prior_mean,
            prior_variance,
            noise_variance,
            true_mean,
        } => {
            NormalNormalModel::new(*prior_mean, *prior_variance, *noise_variance, 0, 0.0)?;
            per_replication(&n_grid, reps, root, |n, rng| {
                let sd = (noise_variance / n as f64).sqrt();
                let ybar =
                    true_mean + sd * rand::Rng::sample::<f64, _>(rng, rand_distr::StandardNormal);
                Ok(
                    NormalNormalModel::new(*prior_mean, *prior_variance, *noise_variance, n, ybar)?
                        .info()?
                        .prior_info,
                )
            })?
        }
        DecayFamily::PoissonGamma {
            shape,
            rate,
            true_rate,
        } => {
            if !(*true_rate > 0.0 && true_rate.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "true rate must be positive, got {true_rate}"
                )));
            }
            PoissonGammaModel::new(*shape, *rate, 0, 0)?;
            per_replication(&n_grid, reps, root, |n, rng| {
                let total = sample_poisson(rng, n as f64 * true_rate)?;
                PoissonGammaModel::new(*shape, *rate, n, total)?
                    .info()
                    .map(|i| i.prior_info)
            })?
        }
        DecayFamily::Finite {
            prior,
            likelihood,
            true_theta,
        } => {
            let model = FiniteModel::new(prior.clone(), likelihood.clone())?;
            let n_max = *n_grid.last().expect("grid is non-empty") as usize;
            let paths = (0..reps)
                .into_par_iter()
                .map(|r| {
                    finite_prior_info_trajectory(
                        &model,
                        *true_theta,
                        n_max,
                        root.child(r as u64).stream,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            n_grid
                .iter()
                .map(|&n| {
                    DecayPoint::from_samples(n, paths.iter().map(|p| p[n as usize]).collect())
                })
                .collect()
        }
    };

    let dim = study.family.reference_dimension();
    let rows = points
        .into_iter()
        .map(|p| DecayRow {
            n: p.n,
            mean_prior_info: p.mean_prior_info,
            sd_prior_info: p.sd_prior_info,
            median_prior_info: p.median_prior_info,
            replications: p.replications,
            k_over_n: dim.filter(|_| p.n > 0).map(|k| k as f64 / p.n as f64),
        })
        .collect();
    Ok(DecayResult {
        config: study.clone(),
        rows,
    })
}

fn per_replication<F>(
    n_grid: &[u64],
    reps: usize,
    root: RngStream,
    draw: F,
) -> Result<Vec<DecayPoint>>
where
    F: Fn(u64, &mut crate::samplers::StreamRng) -> Result<f64> + Sync,
{
    n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let stream = root.child(i as u64);
            let values = (0..reps)
                .into_par_iter()
                .map(|r| draw(n, &mut stream.child(r as u64).rng()))
                .collect::<Result<Vec<f64>>>()?;
            Ok(DecayPoint::from_samples(n, values))
        })
        .collect()
}

/// One hyperparameter sweep over a conjugate family with fixed data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ValidationFamily {
    /// Symmetric `Dir(α)` priors for each `α` in `alphas`.
    MultinomialDirichlet { alphas: Vec<f64>, counts: Vec<u64> },
    /// One row per prior variance.
    NormalNormal {
        prior_variances: Vec<f64>,
        prior_mean: f64,
        noise_variance: f64,
        n: u64,
        ybar: f64,
    },
    /// One row per prior shape at a fixed rate.
    PoissonGamma {
        shapes: Vec<f64>,
        rate: f64,
        n: u64,
        total: u64,
    },
}

impl ValidationFamily {
    /// The α sweep with counts `(3, 0, 1, 2)`.
    pub fn default_multinomial() -> Self {
        Self::MultinomialDirichlet {
            alphas: vec![0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0],
            counts: vec![3, 0, 1, 2],
        }
    }

    pub fn default_normal() -> Self {
        Self::NormalNormal {
            prior_variances: vec![0.01, 0.1, 1.0, 10.0],
            prior_mean: 0.0,
            noise_variance: 1.0,
            n: 10,
            ybar: 0.3,
        }
    }

    pub fn default_poisson() -> Self {
        Self::PoissonGamma {
            shapes: vec![0.5, 1.0, 2.0, 5.0, 10.0],
            rate: 1.0,
            n: 5,
            total: 12,
        }
    }

    fn cases(&self) -> Result<Vec<(f64, ConjugateCase)>> {
        match self {
            Self::MultinomialDirichlet { alphas, counts } => alphas
                .iter()
                .map(|&a| {
                    let m = MultinomialDirichletModel::new(vec![a; counts.len()], counts.clone())?;
                    Ok((a, ConjugateCase::MultinomialDirichlet(m)))
                })
                .collect(),
            Self::NormalNormal {
                prior_variances,
                prior_mean,
                noise_variance,
                n,
                ybar,
            } => prior_variances
                .iter()
                .map(|&v| {
                    let m = NormalNormalModel::new(*prior_mean, v, *noise_variance, *n, *ybar)?;
                    Ok((v, ConjugateCase::NormalNormal(m)))
                })
                .collect(),
            Self::PoissonGamma {
                shapes,
                rate,
                n,
                total,
            } => shapes
                .iter()
                .map(|&s| {
                    Ok((
                        s,
                        ConjugateCase::PoissonGamma(PoissonGammaModel::new(s, *rate, *n, *total)?),
                    ))
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McValidationConfig {
    pub family: ValidationFamily,
    pub n_samples: usize,
    pub replications: usize,
    /// Optional larger sample size run alongside as a consistency control.
    pub control_samples: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McValidationRow {
    /// The swept hyperparameter (α, prior variance or shape).
    pub hyperparameter: f64,
    pub truth: f64,
    pub mean_estimate: f64,
    pub sd_estimate: f64,
    pub n_samples: usize,
    pub replications: usize,
    pub control_mean_estimate: Option<f64>,
    pub control_sd_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McValidationResult {
    pub config: McValidationConfig,
    pub rows: Vec<McValidationRow>,
}

impl Tabular for McValidationResult {
    fn csv_header(&self) -> Vec<&'static str> {
        vec![
            "hyperparameter",
            "truth",
            "mean_estimate",
            "sd_estimate",
            "n_samples",
            "replications",
            "control_mean_estimate",
            "control_sd_estimate",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    format_f64(r.hyperparameter),
                    format_f64(r.truth),
                    format_f64(r.mean_estimate),
                    format_f64(r.sd_estimate),
                    r.n_samples.to_string(),
                    r.replications.to_string(),
                    format_opt_f64(r.control_mean_estimate),
                    format_opt_f64(r.control_sd_estimate),
                ]
            })
            .collect()
    }
}

/// Repeated prior-information estimates against the closed form at each
/// hyperparameter value. Row `i` seeds its replications from
/// `child(2i)` of `(seed, 0)` and its control run from `child(2i + 1)`.
pub fn run_mc_validation(config: &McValidationConfig) -> Result<McValidationResult> {
    if config.replications == 0 || config.n_samples < 2 {
        return Err(Error::InvalidParameter(
            "validation needs replications >= 1 and at least 2 samples".into(),
        ));
    }
    if config.control_samples.is_some_and(|c| c < 2) {
        return Err(Error::InvalidParameter(
            "control run needs at least 2 samples".into(),
        ));
    }
    let root = RngStream::new(config.seed, 0);
    let rows = config
        .family
        .cases()?
        .into_iter()
        .enumerate()
        .map(|(i, (hyper, case))| {
            let i = i as u64;
            let main = validate_against_closed_form(
                &case,
                config.n_samples,
                config.replications,
                root.child(2 * i).stream,
            )?;
            let control = config
                .control_samples
                .map(|n| {
                    validate_against_closed_form(
                        &case,
                        n,
                        config.replications,
                        root.child(2 * i + 1).stream,
                    )
                })
                .transpose()?;
            Ok(McValidationRow {
                hyperparameter: hyper,
                truth: main.truth,
                mean_estimate: main.mean_estimate,
                sd_estimate: main.sd_estimate,
                n_samples: config.n_samples,
                replications: config.replications,
                control_mean_estimate: control.as_ref().map(|c| c.mean_estimate),
                control_sd_estimate: control.as_ref().map(|c| c.sd_estimate),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(McValidationResult {
        config: config.clone(),
        rows,
    })
}
