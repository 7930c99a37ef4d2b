//! Bayesian logistic classification and Gaussian linear regression with a
//! `N(0, σ²I)` coefficient prior: likelihoods, posterior predictive rules
//! and losses.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Covariates, outcomes and column names.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DMatrix<f64>,
    pub y: Vec<f64>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: Vec<f64>, feature_names: Vec<String>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.nrows(),
                found: y.len(),
            });
        }
        if feature_names.len() != x.ncols() {
            return Err(Error::LengthMismatch {
                expected: x.ncols(),
                found: feature_names.len(),
            });
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "dataset contains non-finite values".into(),
            ));
        }
        Ok(Self {
            x,
            y,
            feature_names,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    /// Rows in the given order.
    pub fn select(&self, rows: &[usize]) -> Self {
        Self {
            x: self.x.select_rows(rows),
            y: rows.iter().map(|&i| self.y[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// A copy with a leading column of ones named `intercept`.
    pub fn with_intercept(&self) -> Self {
        let x = self.x.clone().insert_column(0, 1.0);
        let mut names = vec!["intercept".to_owned()];
        names.extend(self.feature_names.iter().cloned());
        Self {
            x,
            y: self.y.clone(),
            feature_names: names,
        }
    }
}

/// Column means and standard deviations estimated on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub std_devs: Vec<f64>,
}

impl Standardizer {
    /// Constant columns keep a scale of one so they map to zero.
    pub fn fit(x: &DMatrix<f64>) -> Result<Self> {
        let n = x.nrows();
        if n < 2 {
            return Err(Error::InvalidParameter(
                "standardizing needs at least 2 rows".into(),
            ));
        }
        let mut means = Vec::with_capacity(x.ncols());
        let mut std_devs = Vec::with_capacity(x.ncols());
        for col in x.column_iter() {
            let mean = col.iter().sum::<f64>() / n as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            means.push(mean);
            std_devs.push(if var > 0.0 { var.sqrt() } else { 1.0 });
        }
        Ok(Self { means, std_devs })
    }

    pub fn apply(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.ncols() != self.means.len() {
            return Err(Error::LengthMismatch {
                expected: self.means.len(),
                found: x.ncols(),
            });
        }
        let mut out = x.clone();
        for (j, mut col) in out.column_iter_mut().enumerate() {
            col.apply(|v| *v = (*v - self.means[j]) / self.std_devs[j]);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Logistic,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub prior_variance: f64,
    /// Fixed noise variance of the linear model; ignored for logistic.
    pub noise_variance: f64,
    pub includes_intercept: bool,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, prior_variance: f64) -> Result<Self> {
        if !(prior_variance > 0.0 && prior_variance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "prior variance must be positive, got {prior_variance}"
            )));
        }
        Ok(Self {
            kind,
            prior_variance,
            noise_variance: 1.0,
            includes_intercept: false,
        })
    }
}

/// `log(1 + e^t)` without overflow.
pub fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn linear_predictor(x: &DMatrix<f64>, beta: &[f64]) -> Result<DVector<f64>> {
    if beta.len() != x.ncols() {
        return Err(Error::LengthMismatch {
            expected: x.ncols(),
            found: beta.len(),
        });
    }
    Ok(x * DVector::from_column_slice(beta))
}

/// `Σ_i log p(y_i | β, x_i)`. The logistic terms are `y η - softplus(η)`;
/// the linear terms include the Gaussian constant.
pub fn log_likelihood(spec: &ModelSpec, beta: &[f64], data: &Dataset) -> Result<f64> {
    let eta = linear_predictor(&data.x, beta)?;
    Ok(match spec.kind {
        ModelKind::Logistic => eta
            .iter()
            .zip(&data.y)
            .map(|(e, y)| y * e - softplus(*e))
            .sum(),
        ModelKind::Linear => {
            let s2 = spec.noise_variance;
            let c = (2.0 * std::f64::consts::PI * s2).ln();
            eta.iter()
                .zip(&data.y)
                .map(|(e, y)| -0.5 * ((y - e).powi(2) / s2 + c))
                .sum()
        }
    })
}

/// Gradient of [`log_likelihood`] in `β`.
pub fn log_likelihood_gradient(spec: &ModelSpec, beta: &[f64], data: &Dataset) -> Result<Vec<f64>> {
    let eta = linear_predictor(&data.x, beta)?;
    let resid: DVector<f64> = match spec.kind {
        ModelKind::Logistic => DVector::from_iterator(
            eta.len(),
            eta.iter().zip(&data.y).map(|(e, y)| y - sigmoid(*e)),
        ),
        ModelKind::Linear => DVector::from_iterator(
            eta.len(),
            eta.iter()
                .zip(&data.y)
                .map(|(e, y)| (y - e) / spec.noise_variance),
        ),
    };
    Ok((data.x.transpose() * resid).iter().copied().collect())
}

/// How a class label is read off the posterior predictive distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassificationRule {
    /// One Bernoulli draw through the logistic link per posterior draw, then
    /// the majority label.
    #[default]
    BernoulliVote,
    /// The mode of the predictive distribution computed exactly from the
    /// draws: class 1 when the mean predicted probability is at least one
    /// half.
    MeanProbability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub predictions: Vec<f64>,
    pub draw_count: usize,
    /// Filled in by [`PredictionReport::score`].
    pub loss: Option<f64>,
}

impl PredictionReport {
    pub fn score(mut self, y_test: &[f64], kind: ModelKind) -> Result<Self> {
        self.loss = Some(evaluate(&self.predictions, y_test, kind)?);
        Ok(self)
    }
}

/// Posterior predictive point predictions for every row of `x_test`.
///
/// Classification ties, exactly half the votes or a mean probability of
/// exactly one half, go to class 1. Regression predicts the mean of
/// `x β` over draws.
pub fn posterior_predict<R: Rng + ?Sized>(
    spec: &ModelSpec,
    draws: &[Vec<f64>],
    x_test: &DMatrix<f64>,
    rule: ClassificationRule,
    rng: &mut R,
) -> Result<PredictionReport> {
    if draws.is_empty() {
        return Err(Error::Empty("posterior draws"));
    }
    let etas = draws
        .iter()
        .map(|b| linear_predictor(x_test, b))
        .collect::<Result<Vec<_>>>()?;
    let m = draws.len() as f64;
    let units = x_test.nrows();
    let predictions = match (spec.kind, rule) {
        (ModelKind::Linear, _) => (0..units)
            .map(|i| etas.iter().map(|e| e[i]).sum::<f64>() / m)
            .collect(),
        (ModelKind::Logistic, ClassificationRule::MeanProbability) => (0..units)
            .map(|i| {
                let p = etas.iter().map(|e| sigmoid(e[i])).sum::<f64>() / m;
                if p >= 0.5 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect(),
        (ModelKind::Logistic, ClassificationRule::BernoulliVote) => (0..units)
            .map(|i| {
                let ones = etas
                    .iter()
                    .filter(|e| rng.random::<f64>() < sigmoid(e[i]))
                    .count();
                if 2 * ones >= draws.len() {
                    1.0
                } else {
                    0.0
                }
            })
            .collect(),
    };
    Ok(PredictionReport {
        predictions,
        draw_count: draws.len(),
        loss: None,
    })
}

/// Mean 0-1 loss for classification, mean squared error for regression.
pub fn evaluate(predictions: &[f64], y_test: &[f64], kind: ModelKind) -> Result<f64> {
    if predictions.len() != y_test.len() {
        return Err(Error::LengthMismatch {
            expected: y_test.len(),
            found: predictions.len(),
        });
    }
    if y_test.is_empty() {
        return Err(Error::Empty("test outcomes"));
    }
    let n = y_test.len() as f64;
    Ok(match kind {
        ModelKind::Logistic => {
            predictions
                .iter()
                .zip(y_test)
                .filter(|(p, y)| p != y)
                .count() as f64
                / n
        }
        ModelKind::Linear => {
            predictions
                .iter()
                .zip(y_test)
                .map(|(p, y)| (p - y).powi(2))
                .sum::<f64>()
                / n
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngStream;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};

    fn toy(kind: ModelKind, seed: u64, n: usize, d: usize) -> Dataset {
        let mut rng = RngStream::new(seed, 0).rng();
        let x = DMatrix::from_fn(n, d, |_, _| rng.random::<f64>() * 4.0 - 2.0);
        let y = (0..n)
            .map(|_| match kind {
                ModelKind::Logistic => f64::from(rng.random::<bool>()),
                ModelKind::Linear => rng.random::<f64>() * 3.0,
            })
            .collect();
        Dataset::new(x, y, (0..d).map(|j| format!("x{j}")).collect()).unwrap()
    }

    #[test]
    fn zero_coefficients() {
        let data = toy(ModelKind::Logistic, 1, 12, 3);
        let spec = ModelSpec::new(ModelKind::Logistic, 1.0).unwrap();
        assert_abs_diff_eq!(
            log_likelihood(&spec, &[0.0; 3], &data).unwrap(),
            12.0 * 0.5f64.ln(),
            epsilon = 1e-12
        );
        let data = toy(ModelKind::Linear, 2, 9, 2);
        let spec = ModelSpec::new(ModelKind::Linear, 1.0).unwrap();
        let want: f64 = data
            .y
            .iter()
            .map(|y| -0.5 * (y * y + (2.0 * std::f64::consts::PI).ln()))
            .sum();
        assert_abs_diff_eq!(
            log_likelihood(&spec, &[0.0; 2], &data).unwrap(),
            want,
            epsilon = 1e-12
        );
        assert!(log_likelihood(&spec, &[0.0; 3], &data).is_err());
        assert!(ModelSpec::new(ModelKind::Linear, 0.0).is_err());
    }

    #[test]
    fn logistic_terms_do_not_overflow() {
        let x = DMatrix::from_row_slice(2, 1, &[1.0, -1.0]);
        let data = Dataset::new(x, vec![0.0, 1.0], vec!["a".into()]).unwrap();
        let spec = ModelSpec::new(ModelKind::Logistic, 1.0).unwrap();
        let ll = log_likelihood(&spec, &[700.0], &data).unwrap();
        assert!(ll.is_finite());
        assert_abs_diff_eq!(ll, -1400.0, epsilon = 1e-9);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for kind in [ModelKind::Logistic, ModelKind::Linear] {
            let data = toy(kind, 3, 40, 4);
            let spec = ModelSpec::new(kind, 1.0).unwrap();
            let beta = [0.3, -0.7, 1.1, 0.05];
            let g = log_likelihood_gradient(&spec, &beta, &data).unwrap();
            for j in 0..4 {
                let h = 1e-6;
                let mut up = beta;
                let mut down = beta;
                up[j] += h;
                down[j] -= h;
                let fd = (log_likelihood(&spec, &up, &data).unwrap()
                    - log_likelihood(&spec, &down, &data).unwrap())
                    / (2.0 * h);
                assert!(
                    (fd - g[j]).abs() <= 1e-5 * g[j].abs().max(1.0),
                    "{kind:?} {j}: {fd} vs {}",
                    g[j]
                );
            }
        }
    }

    #[test]
    fn saturated_link_predicts_class_one() {
        let spec = ModelSpec::new(ModelKind::Logistic, 1.0).unwrap();
        let x = DMatrix::from_row_slice(1, 1, &[1.0]);
        let mut rng = RngStream::new(4, 0).rng();
        let r = posterior_predict(
            &spec,
            &[vec![10.0]],
            &x,
            ClassificationRule::BernoulliVote,
            &mut rng,
        )
        .unwrap();
        assert_eq!(r.predictions, vec![1.0]);
        let r = posterior_predict(
            &spec,
            &[vec![10.0]],
            &x,
            ClassificationRule::MeanProbability,
            &mut rng,
        )
        .unwrap();
        assert_eq!(r.predictions, vec![1.0]);
    }

    #[test]
    fn ties_go_to_class_one() {
        let spec = ModelSpec::new(ModelKind::Logistic, 1.0).unwrap();
        let x = DMatrix::from_row_slice(1, 1, &[1.0]);
        let mut rng = RngStream::new(5, 0).rng();
        // σ(±800) is exactly 1 and 0, so the vote is exactly 1 to 1
        let draws = [vec![800.0], vec![-800.0]];
        let r = posterior_predict(
            &spec,
            &draws,
            &x,
            ClassificationRule::BernoulliVote,
            &mut rng,
        )
        .unwrap();
        assert_eq!(r.predictions, vec![1.0]);
        let zero_row = DMatrix::from_row_slice(1, 1, &[0.0]);
        let r = posterior_predict(
            &spec,
            &draws,
            &zero_row,
            ClassificationRule::MeanProbability,
            &mut rng,
        )
        .unwrap();
        assert_eq!(r.predictions, vec![1.0]);
        assert!(posterior_predict(
            &spec,
            &[],
            &x,
            ClassificationRule::MeanProbability,
            &mut rng
        )
        .is_err());
    }

    #[test]
    fn linear_prediction_is_design_times_mean_draw() {
        let spec = ModelSpec::new(ModelKind::Linear, 1.0).unwrap();
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, -1.0, 0.5, 0.0, 3.0]);
        let draws = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![2.0, -1.0]];
        let mut rng = RngStream::new(6, 0).rng();
        let r =
            posterior_predict(&spec, &draws, &x, ClassificationRule::default(), &mut rng).unwrap();
        let mean_beta = DVector::from_column_slice(&[1.0, 0.0]);
        let want = &x * mean_beta;
        for (a, b) in r.predictions.iter().zip(want.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
        assert_eq!(r.draw_count, 3);
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(
            evaluate(&[1.0, 0.0], &[1.0, 0.0], ModelKind::Logistic).unwrap(),
            0.0
        );
        assert_eq!(
            evaluate(&[1.0, 0.0, 1.0], &[0.0, 1.0, 0.0], ModelKind::Logistic).unwrap(),
            1.0
        );
        // (1 + 4 + 0.25) / 3
        assert_abs_diff_eq!(
            evaluate(&[1.0, 2.0, 3.0], &[0.0, 4.0, 3.5], ModelKind::Linear).unwrap(),
            5.25 / 3.0,
            epsilon = 1e-15
        );
        assert!(evaluate(&[1.0], &[1.0, 0.0], ModelKind::Linear).is_err());
        let r = PredictionReport {
            predictions: vec![1.0, 1.0],
            draw_count: 1,
            loss: None,
        };
        assert_eq!(
            r.score(&[1.0, 0.0], ModelKind::Logistic).unwrap().loss,
            Some(0.5)
        );
    }

    #[test]
    fn standardizer_uses_training_statistics() {
        let train = DMatrix::from_row_slice(3, 2, &[1.0, 5.0, 2.0, 5.0, 3.0, 5.0]);
        let s = Standardizer::fit(&train).unwrap();
        assert_eq!(s.means, vec![2.0, 5.0]);
        assert_eq!(s.std_devs, vec![1.0, 1.0]);
        let test = DMatrix::from_row_slice(1, 2, &[4.0, 6.0]);
        let z = s.apply(&test).unwrap();
        assert_eq!((z[(0, 0)], z[(0, 1)]), (2.0, 1.0));
        assert!(s.apply(&DMatrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn intercept_column() {
        let d = toy(ModelKind::Linear, 7, 5, 2).with_intercept();
        assert_eq!(d.n_features(), 3);
        assert_eq!(d.feature_names[0], "intercept");
        assert!(d.x.column(0).iter().all(|v| *v == 1.0));
    }

    proptest! {
        #[test]
        fn logistic_log_likelihood_is_concave_on_lines(
            seed in any::<u64>(), t0 in -3.0f64..3.0,
        ) {
            let data = toy(ModelKind::Logistic, seed, 30, 3);
            let spec = ModelSpec::new(ModelKind::Logistic, 1.0).unwrap();
            let mut rng = RngStream::new(seed, 1).rng();
            let dir: Vec<f64> = (0..3).map(|_| rng.random::<f64>() - 0.5).collect();
            let at = |t: f64| {
                let b: Vec<f64> = dir.iter().map(|d| d * t).collect();
                log_likelihood(&spec, &b, &data).unwrap()
            };
            let h = 0.1;
            let second = at(t0 + h) - 2.0 * at(t0) + at(t0 - h);
            prop_assert!(second <= 1e-9);
        }

        #[test]
        fn duplicated_draws_keep_predictions(seed in any::<u64>()) {
            let data = toy(ModelKind::Logistic, seed, 10, 3);
            let spec = ModelSpec::new(ModelKind::Logistic, 1.0).unwrap();
            let mut rng = RngStream::new(seed, 2).rng();
            let draws: Vec<Vec<f64>> = (0..7).map(|_| (0..3).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()).collect();
            let doubled: Vec<Vec<f64>> = draws.iter().chain(&draws).cloned().collect();
            let a = posterior_predict(&spec, &draws, &data.x, ClassificationRule::MeanProbability, &mut rng).unwrap();
            let b = posterior_predict(&spec, &doubled, &data.x, ClassificationRule::MeanProbability, &mut rng).unwrap();
            prop_assert_eq!(a.predictions, b.predictions);
        }

        #[test]
        fn evaluate_is_permutation_invariant(
            pairs in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..30),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            let mut shuffled = pairs.clone();
            shuffled.shuffle(&mut RngStream::new(seed, 0).rng());
            let (p1, y1): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let (p2, y2): (Vec<f64>, Vec<f64>) = shuffled.into_iter().unzip();
            let a = evaluate(&p1, &y1, ModelKind::Linear).unwrap();
            let b = evaluate(&p2, &y2, ModelKind::Linear).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }
}
