//! Exact posterior of the Gaussian linear model with a `N(0, σ²I)` prior.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// `N(A⁻¹ Xᵀy / s², A⁻¹)` with precision `A = XᵀX / s² + I / σ²`.
#[derive(Debug, Clone)]
pub struct LinearPosterior {
    mean: DVector<f64>,
    precision_chol: Cholesky<f64, Dyn>,
}

impl LinearPosterior {
    pub fn new(
        design: &DMatrix<f64>,
        response: &[f64],
        prior_variance: f64,
        noise_variance: f64,
    ) -> Result<Self> {
        if design.nrows() != response.len() {
            return Err(Error::LengthMismatch {
                expected: design.nrows(),
                found: response.len(),
            });
        }
        for (name, v) in [
            ("prior variance", prior_variance),
            ("noise variance", noise_variance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if design.iter().chain(response).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite design or response".into(),
            ));
        }
        let d = design.ncols();
        let y = DVector::from_column_slice(response);
        let precision = design.transpose() * design / noise_variance
            + DMatrix::<f64>::identity(d, d) / prior_variance;
        let precision_chol = Cholesky::new(precision)
            .ok_or_else(|| Error::Sampler("posterior precision not positive definite".into()))?;
        let mean = precision_chol.solve(&(design.transpose() * y / noise_variance));
        Ok(Self {
            mean,
            precision_chol,
        })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        self.precision_chol.inverse()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let d = self.mean.len();
        let z = DVector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)));
        // A = L Lᵀ, so L⁻ᵀ z has covariance A⁻¹
        let offset = self
            .precision_chol
            .l()
            .transpose()
            .solve_upper_triangular(&z)
            .expect("cholesky factor is nonsingular");
        (&self.mean + offset).iter().copied().collect()
    }
}

/// `n_draws` i.i.d. draws from the exact linear-model posterior.
pub fn sample_linear_posterior<R: Rng + ?Sized>(
    design: &DMatrix<f64>,
    response: &[f64],
    prior_variance: f64,
    noise_variance: f64,
    rng: &mut R,
    n_draws: usize,
) -> Result<Vec<Vec<f64>>> {
    let post = LinearPosterior::new(design, response, prior_variance, noise_variance)?;
    Ok((0..n_draws).map(|_| post.sample(rng)).collect())
}
