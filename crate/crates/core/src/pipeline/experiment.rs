use std::path::PathBuf;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{load_dataset, DatasetKind};
use super::persist::{format_f64, Tabular};
use crate::error::{Error, Result};
use crate::mc::{
    estimate_likelihood_info, estimate_prior_info_with_nl, DrawSource, SampleBatch,
    DEFAULT_SPLIT_FRACTION,
};
use crate::regression::{
    evaluate, log_likelihood, posterior_predict, ClassificationRule, Dataset, ModelKind, ModelSpec,
    Standardizer,
};
use crate::samplers::{run_ess, EssConfig, EssState, LinearPosterior, RngStream};

/// The prior variances swept for the diabetes data.
pub const DIABETES_SIGMA2_GRID: [f64; 11] =
    [0.1, 0.5, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0];
/// The prior variances swept for the prostate data.
pub const PROSTATE_SIGMA2_GRID: [f64; 7] = [1e-5, 1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearSampler {
    /// Independent draws from the closed-form Gaussian posterior.
    Exact,
    /// Elliptical slice sampling, as used for the logistic model.
    Ess,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetKind,
    pub dataset_path: PathBuf,
    pub train_size: usize,
    pub sigma2_grid: Vec<f64>,
    /// Posterior draws kept for prediction.
    pub predictive_draws: usize,
    /// Posterior draws used by the information estimators, per σ².
    pub mc_draws: usize,
    /// Prior variance whose posterior stands in for the normalized
    /// likelihood.
    pub reference_sigma2: f64,
    pub seed: u64,
    pub ess: EssConfig,
    pub linear_sampler: LinearSampler,
    pub classification_rule: ClassificationRule,
    pub standardize: bool,
    pub includes_intercept: bool,
}

impl ExperimentConfig {
    /// Defaults for `dataset` read from its default location.
    pub fn for_dataset(dataset: DatasetKind, seed: u64) -> Self {
        Self {
            dataset,
            dataset_path: dataset.default_path(),
            train_size: dataset.default_train_size(),
            sigma2_grid: match dataset {
                DatasetKind::Diabetes => DIABETES_SIGMA2_GRID.to_vec(),
                DatasetKind::Prostate => PROSTATE_SIGMA2_GRID.to_vec(),
            },
            predictive_draws: 100,
            mc_draws: 1000,
            reference_sigma2: 100.0,
            seed,
            ess: EssConfig {
                draws: 1000,
                ..EssConfig::default()
            },
            linear_sampler: LinearSampler::Exact,
            classification_rule: ClassificationRule::default(),
            standardize: true,
            includes_intercept: false,
        }
    }

    fn validate(&self, n_rows: usize) -> Result<()> {
        if self.sigma2_grid.is_empty()
            || self
                .sigma2_grid
                .iter()
                .any(|s| !(*s > 0.0 && s.is_finite()))
        {
            return Err(Error::InvalidParameter(
                "σ² grid must be non-empty and positive".into(),
            ));
        }
        if !(self.reference_sigma2 > 0.0 && self.reference_sigma2.is_finite()) {
            return Err(Error::InvalidParameter(
                "reference σ² must be positive".into(),
            ));
        }
        if self.train_size < 2 || self.train_size >= n_rows {
            return Err(Error::InvalidParameter(format!(
                "training size {} must lie in [2, {n_rows}) for {n_rows} rows",
                self.train_size
            )));
        }
        if self.predictive_draws == 0 || self.mc_draws < 4 {
            return Err(Error::InvalidParameter(
                "need at least 1 predictive draw and 4 estimator draws".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub sigma2: f64,
    pub prior_info: f64,
    pub prior_info_se: f64,
    pub lik_info: f64,
    pub lik_info_se: f64,
    pub loss: f64,
    pub mc_draws: usize,
    pub reference_draws: usize,
    pub predictive_draws: usize,
    /// The likelihood-information harmonic mean is dominated by a few draws.
    pub lik_info_tail_risk: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentMetadata {
    pub seed: u64,
    pub dataset_rows: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub n_features: usize,
    pub model: ModelKind,
    pub sampler: String,
    pub ess: EssConfig,
    pub standardized: bool,
    pub reference_sigma2: f64,
    pub loss: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub rows: Vec<ExperimentRow>,
    pub metadata: ExperimentMetadata,
}

impl Tabular for ExperimentResult {
    fn csv_header(&self) -> Vec<&'static str> {
        vec![
            "sigma2",
            "prior_info",
            "prior_info_se",
            "lik_info",
            "lik_info_se",
            "loss",
            "mc_draws",
            "reference_draws",
            "predictive_draws",
            "lik_info_tail_risk",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    format_f64(r.sigma2),
                    format_f64(r.prior_info),
                    format_f64(r.prior_info_se),
                    format_f64(r.lik_info),
                    format_f64(r.lik_info_se),
                    format_f64(r.loss),
                    r.mc_draws.to_string(),
                    r.reference_draws.to_string(),
                    r.predictive_draws.to_string(),
                    r.lik_info_tail_risk.to_string(),
                ]
            })
            .collect()
    }
}

/// Shuffled train/test indices; the two sets partition `0..n`.
pub fn train_test_split(
    n: usize,
    train_size: usize,
    stream: RngStream,
) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut stream.rng());
    let test = idx.split_off(train_size.min(n));
    (idx, test)
}

/// Loads the configured file and runs [`run_prediction_experiment_on`].
pub fn run_prediction_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let data = load_dataset(&config.dataset_path, config.dataset)?;
    run_prediction_experiment_on(&data, config)
}

struct Split {
    train: Dataset,
    test: Dataset,
}

fn prepare(data: &Dataset, config: &ExperimentConfig, root: RngStream) -> Result<Split> {
    let (train_idx, test_idx) = train_test_split(data.n_rows(), config.train_size, root.child(0));
    let mut train = data.select(&train_idx);
    let mut test = data.select(&test_idx);
    if config.standardize {
        let s = Standardizer::fit(&train.x)?;
        train.x = s.apply(&train.x)?;
        test.x = s.apply(&test.x)?;
    }
    if config.includes_intercept {
        train = train.with_intercept();
        test = test.with_intercept();
    }
    Ok(Split { train, test })
}

fn posterior_draws(
    spec: &ModelSpec,
    train: &Dataset,
    config: &ExperimentConfig,
    stream: RngStream,
) -> Result<Vec<Vec<f64>>> {
    let mut rng = stream.rng();
    let use_exact = spec.kind == ModelKind::Linear && config.linear_sampler == LinearSampler::Exact;
    if use_exact {
        let post =
            LinearPosterior::new(&train.x, &train.y, spec.prior_variance, spec.noise_variance)?;
        return Ok((0..config.mc_draws)
            .map(|_| post.sample(&mut rng))
            .collect());
    }
    let mut ll = |beta: &[f64]| log_likelihood(spec, beta, train).unwrap_or(f64::NAN);
    let init = EssState::new(vec![0.0; train.n_features()], spec.prior_variance, &mut ll)?;
    let ess = EssConfig {
        draws: config.mc_draws,
        ..config.ess
    };
    run_ess(init, &mut ll, ess, &mut rng)
        .map(|chain| chain.draws)
        .map_err(|e| Error::Sampler(format!("σ² = {}: {e}", spec.prior_variance)))
}

/// `log N(β | 0, σ²I)`.
fn log_prior(beta: &[f64], sigma2: f64) -> f64 {
    let d = beta.len() as f64;
    -0.5 * (beta.iter().map(|b| b * b).sum::<f64>() / sigma2
        + d * (2.0 * std::f64::consts::PI * sigma2).ln())
}

/// Evenly spaced subset of `k` draws.
fn spaced(draws: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    let k = k.min(draws.len());
    (0..k).map(|i| draws[i * draws.len() / k].clone()).collect()
}

/// Fits the model at every σ² on a seeded train/test split, predicts the
/// test set, and estimates prior and likelihood information from posterior
/// draws. The posterior at `reference_sigma2` stands in for the normalized
/// likelihood.
///
/// Stream use under `seed`: child 0 splits the data, child 1 samples the
/// reference posterior, child `2 + i` handles grid point `i`.
pub fn run_prediction_experiment_on(
    data: &Dataset,
    config: &ExperimentConfig,
) -> Result<ExperimentResult> {
    config.validate(data.n_rows())?;
    let root = RngStream::new(config.seed, 0);
    let Split { train, test } = prepare(data, config, root)?;
    let kind = config.dataset.model_kind();
    let spec_for = |sigma2: f64| -> Result<ModelSpec> {
        let mut s = ModelSpec::new(kind, sigma2)?;
        s.includes_intercept = config.includes_intercept;
        Ok(s)
    };

    let reference = posterior_draws(
        &spec_for(config.reference_sigma2)?,
        &train,
        config,
        root.child(1),
    )?;

    let mut grid = config.sigma2_grid.clone();
    grid.sort_by(f64::total_cmp);
    let specs = grid
        .iter()
        .map(|&s| spec_for(s))
        .collect::<Result<Vec<_>>>()?;
    let rows = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let stream = root.child(2 + i as u64);
            let draws = posterior_draws(spec, &train, config, stream)?;
            let sigma2 = spec.prior_variance;

            let post = SampleBatch::from_draws(
                &draws,
                |b| log_prior(b, sigma2),
                |b| log_likelihood(spec, b, &train).unwrap_or(f64::NAN),
                DrawSource::Posterior,
            )?;
            let nl = SampleBatch::from_draws(
                &reference,
                |b| log_prior(b, sigma2),
                |_| 0.0,
                DrawSource::NormalizedLikelihood,
            )?;
            let u = estimate_prior_info_with_nl(&post, &nl)?;
            let v = estimate_likelihood_info(&post, DEFAULT_SPLIT_FRACTION)?;

            let kept = spaced(&draws, config.predictive_draws);
            let mut vote_rng = stream.child(0).rng();
            let report = posterior_predict(
                spec,
                &kept,
                &test.x,
                config.classification_rule,
                &mut vote_rng,
            )?;
            let loss = evaluate(&report.predictions, &test.y, kind)?;
            Ok(ExperimentRow {
                sigma2,
                prior_info: u.value,
                prior_info_se: u.std_error,
                lik_info: v.value,
                lik_info_se: v.std_error,
                loss,
                mc_draws: draws.len(),
                reference_draws: reference.len(),
                predictive_draws: kept.len(),
                lik_info_tail_risk: v.tail_risk,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let sampler = match (kind, config.linear_sampler) {
        (ModelKind::Linear, LinearSampler::Exact) => "exact-gaussian",
        _ => "elliptical-slice",
    };
    Ok(ExperimentResult {
        config: config.clone(),
        rows,
        metadata: ExperimentMetadata {
            seed: config.seed,
            dataset_rows: data.n_rows(),
            n_train: train.n_rows(),
            n_test: test.n_rows(),
            n_features: train.n_features(),
            model: kind,
            sampler: sampler.to_owned(),
            ess: config.ess,
            standardized: config.standardize,
            reference_sigma2: config.reference_sigma2,
            loss: match kind {
                ModelKind::Logistic => "zero-one".to_owned(),
                ModelKind::Linear => "mse".to_owned(),
            },
            version: env!("CARGO_PKG_VERSION").to_owned(),
        },
    })
}
