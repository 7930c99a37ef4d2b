//! Closed-form Kullback-Leibler divergences between members of the same family.
//!
//! All divergences are `D_KL(p, q) = E_p[ln p - ln q]`, in nats. Gamma
//! distributions use the shape/rate parameterization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::{digamma_pos, ln_gamma_pos, ln_multi_beta};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalParams<T> {
    pub mean: T,
    pub variance: T,
}

impl<T: Real> NormalParams<T> {
    pub fn new(mean: T, variance: T) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "normal mean {mean} not finite"
            )));
        }
        if !(variance > T::zero() && variance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "normal variance must be positive, got {variance}"
            )));
        }
        Ok(Self { mean, variance })
    }

    pub fn std_dev(&self) -> T {
        self.variance.sqrt()
    }

    pub fn ln_pdf(&self, x: T) -> T {
        let z = x - self.mean;
        -T::lit(0.5) * ((T::lit(2.0) * T::PI() * self.variance).ln() + z * z / self.variance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams<T> {
    pub shape: T,
    pub rate: T,
}

impl<T: Real> GammaParams<T> {
    pub fn new(shape: T, rate: T) -> Result<Self> {
        if !(shape > T::zero() && shape.is_finite()) || !(rate > T::zero() && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma shape and rate must be positive, got ({shape}, {rate})"
            )));
        }
        Ok(Self { shape, rate })
    }

    pub fn mean(&self) -> T {
        self.shape / self.rate
    }

    pub fn ln_pdf(&self, x: T) -> T {
        if x <= T::zero() {
            return T::neg_infinity();
        }
        self.shape * self.rate.ln() - ln_gamma_pos(self.shape) + (self.shape - T::one()) * x.ln()
            - self.rate * x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletParams<T> {
    alphas: Vec<T>,
}

impl<T: Real> DirichletParams<T> {
    pub fn new(alphas: Vec<T>) -> Result<Self> {
        if alphas.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "dirichlet needs at least 2 concentrations, got {}",
                alphas.len()
            )));
        }
        if let Some(bad) = alphas.iter().find(|a| !(**a > T::zero() && a.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "dirichlet concentrations must be positive, got {bad}"
            )));
        }
        Ok(Self { alphas })
    }

    pub fn alphas(&self) -> &[T] {
        &self.alphas
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn concentration(&self) -> T {
        self.alphas.iter().fold(T::zero(), |acc, &a| acc + a)
    }

    /// Log density at a point of the simplex given by its log coordinates.
    pub fn ln_pdf_from_logs(&self, log_p: &[T]) -> T {
        let kernel = self
            .alphas
            .iter()
            .zip(log_p)
            .fold(T::zero(), |acc, (&a, &lp)| acc + (a - T::one()) * lp);
        kernel - ln_multi_beta(&self.alphas)
    }

    pub fn ln_pdf(&self, p: &[T]) -> T {
        let logs: Vec<T> = p.iter().map(|x| x.ln()).collect();
        self.ln_pdf_from_logs(&logs)
    }
}

/// `D_KL(N(μ1, σ1²), N(μ2, σ2²))`.
pub fn kl_normal<T: Real>(p: &NormalParams<T>, q: &NormalParams<T>) -> T {
    let diff = p.mean - q.mean;
    (diff * diff + p.variance - q.variance) / (T::lit(2.0) * q.variance)
        + T::lit(0.5) * (q.variance / p.variance).ln()
}

/// `D_KL(Gamma(α1, β1), Gamma(α2, β2))` with rates β.
///
/// The moment term is `α1 (β2 - β1) / β1`, i.e. `E_p[-β2 x + β1 x]` with
/// `E_p[x] = α1 / β1`.
pub fn kl_gamma<T: Real>(p: &GammaParams<T>, q: &GammaParams<T>) -> T {
    (p.shape - q.shape) * digamma_pos(p.shape) - ln_gamma_pos(p.shape)
        + ln_gamma_pos(q.shape)
        + q.shape * (p.rate.ln() - q.rate.ln())
        + p.shape * (q.rate - p.rate) / p.rate
}

/// `D_KL(Dir(α), Dir(β))`. Errors when the dimensions differ.
pub fn kl_dirichlet<T: Real>(p: &DirichletParams<T>, q: &DirichletParams<T>) -> Result<T> {
    if p.dim() != q.dim() {
        return Err(Error::LengthMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    let psi_total = digamma_pos(p.concentration());
    let cross = p
        .alphas
        .iter()
        .zip(&q.alphas)
        .fold(T::zero(), |acc, (&a, &b)| {
            acc + (a - b) * (digamma_pos(a) - psi_total)
        });
    Ok(ln_multi_beta(&q.alphas) - ln_multi_beta(&p.alphas) + cross)
}
