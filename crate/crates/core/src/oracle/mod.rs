//! Independent ground truth by quadrature and exhaustive enumeration.

mod finite;
mod grid;

pub use finite::{
    finite_avg_likelihood_info, finite_posterior, finite_prior_info_trajectory, kl_discrete,
    mutual_information, FiniteModel,
};
pub use grid::{
    grid_info, grid_info_proper_prior, grid_info_reparameterized, grid_kl,
    grid_normalized_likelihood, grid_posterior, grid_prior, lemma_bounds, Axis, GridDensity,
    GridModel, LemmaBounds, LogFn, DEFAULT_RESOLUTION_1D, DEFAULT_RESOLUTION_2D, MIN_RESOLUTION,
};

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::conjugate::{InfoPair, PoissonGammaModel};
use crate::divergences::{DirichletParams, GammaParams, NormalParams};
use crate::error::{Error, Result};

/// Counts for the bivariate binomial `r ~ Bin(m, p)`, `s | r ~ Bin(r, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BivBinData {
    pub m: u64,
    pub r: u64,
    pub s: u64,
}

impl BivBinData {
    pub fn new(m: u64, r: u64, s: u64) -> Result<Self> {
        if s > r || r > m {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= s <= r <= m, got m={m}, r={r}, s={s}"
            )));
        }
        Ok(Self { m, r, s })
    }

    /// Log-likelihood in `(p, q)` without the binomial coefficients.
    pub fn log_likelihood(&self, p: f64, q: f64) -> f64 {
        let (m, r, s) = (self.m as f64, self.r as f64, self.s as f64);
        xlogy(r, p) + xlogy(m - r, 1.0 - p) + xlogy(s, q) + xlogy(r - s, 1.0 - q)
    }
}

fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BivBinPrior {
    Flat,
    Jeffreys,
    Reference,
}

impl BivBinPrior {
    pub fn log_density(self, p: f64, q: f64) -> f64 {
        let lp = p.ln();
        let lp1 = (1.0 - p).ln();
        let lq = q.ln();
        let lq1 = (1.0 - q).ln();
        match self {
            BivBinPrior::Flat => 0.0,
            BivBinPrior::Jeffreys => -(2.0 * PI).ln() - 0.5 * (lp1 + lq + lq1),
            BivBinPrior::Reference => -2.0 * PI.ln() - 0.5 * (lp + lp1 + lq + lq1),
        }
    }
}

impl std::str::FromStr for BivBinPrior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(Self::Flat),
            "jeffreys" => Ok(Self::Jeffreys),
            "reference" => Ok(Self::Reference),
            other => Err(Error::InvalidParameter(format!(
                "unknown prior {other:?}; expected flat, jeffreys or reference"
            ))),
        }
    }
}

/// Prior and likelihood information for the bivariate binomial, by
/// midpoint quadrature on a `resolution x resolution` grid.
///
/// The grid lives in `(θ, φ)` with `p = sin²θ`, `q = sin²φ`. Under this map
/// the `x^(-1/2)` and `(1-x)^(-1/2)` factors of the Jeffreys and reference
/// priors, and the half-integer powers they leave in the posterior, become
/// smooth, so the rule converges quickly instead of at `O(h)`. The values
/// returned are the divergences in `(p, q)`.
pub fn bivbin_info(
    data: BivBinData,
    prior: BivBinPrior,
    resolution: usize,
) -> Result<InfoPair<f64>> {
    let axis = Axis::new(0.0, FRAC_PI_2, resolution)?;
    let to_unit = |t: f64| t.sin().powi(2);
    let model = GridModel::new(
        vec![axis, axis],
        move |t: &[f64]| prior.log_density(to_unit(t[0]), to_unit(t[1])),
        move |t: &[f64]| data.log_likelihood(to_unit(t[0]), to_unit(t[1])),
    )?;
    // dp/dθ = sin 2θ
    grid_info_reparameterized(&model, &|t: &[f64]| {
        (2.0 * t[0]).sin().ln() + (2.0 * t[1]).sin().ln()
    })
}

/// Parameterization used when putting a Poisson-Gamma model on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateScale {
    /// The rate `λ` itself.
    Rate,
    /// `φ = ln λ`; the prior picks up the Jacobian `e^φ`, the likelihood
    /// does not.
    LogRate,
}

/// A Poisson-Gamma model on a one-dimensional grid in `λ` or `ln λ`.
///
/// The log prior is the exact Gamma density (with its Jacobian on the log
/// scale), so [`grid_info_proper_prior`] applies. Prefer it when the shape
/// is below one: the density then diverges at `λ = 0` and renormalizing it
/// over midpoint nodes loses `O(h^α)` of its mass.
pub fn poisson_gamma_grid(
    model: &PoissonGammaModel<f64>,
    scale: RateScale,
    resolution: usize,
) -> Result<GridModel> {
    let prior = model.prior();
    let post = model.posterior();
    let nl = model.normalized_likelihood()?;
    // generous right edge for all three densities, which the grid must
    // cover in full because the prior is renormalized over it
    let right = |g: &GammaParams<f64>| g.mean() + 40.0 * (g.shape.sqrt() + 1.0) / g.rate;
    let hi = right(&prior).max(right(&post)).max(right(&nl));
    let total = model.total as f64;
    let n = model.n as f64;
    let ll = move |lambda: f64| xlogy(total, lambda) - n * lambda;
    match scale {
        RateScale::Rate => GridModel::new(
            vec![Axis::new(0.0, hi, resolution)?],
            move |t: &[f64]| prior.ln_pdf(t[0]),
            move |t: &[f64]| ll(t[0]),
        ),
        RateScale::LogRate => {
            if model.total == 0 {
                return Err(Error::NotIntegrable(
                    "likelihood in ln λ has no left tail decay when the total is 0".into(),
                ));
            }
            let lo = hi.ln() - 60.0 / prior.shape.min(total);
            GridModel::new(
                vec![Axis::new(lo, hi.ln(), resolution)?],
                move |t: &[f64]| prior.ln_pdf(t[0].exp()) + t[0],
                move |t: &[f64]| ll(t[0].exp()),
            )
        }
    }
}

fn log_sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        -(-t).exp().ln_1p()
    } else {
        t - t.exp().ln_1p()
    }
}

/// `D_KL(p, q)` for two normals by quadrature on `mean ± 16 sd`.
pub fn quad_kl_normal(p: &NormalParams<f64>, q: &NormalParams<f64>) -> Result<f64> {
    let span = |d: &NormalParams<f64>| (d.mean - 16.0 * d.std_dev(), d.mean + 16.0 * d.std_dev());
    let (a, b) = span(p);
    let (c, d) = span(q);
    let axes = vec![Axis::new(a.min(c), b.max(d), DEFAULT_RESOLUTION_1D)?];
    let dp = GridDensity::from_log_fn(axes.clone(), |t| p.ln_pdf(t[0]))?;
    let dq = GridDensity::from_log_fn(axes, |t| q.ln_pdf(t[0]))?;
    grid_kl(&dp, &dq)
}

/// `D_KL(p, q)` for two gammas by quadrature in `φ = ln x`, where both
/// densities are smooth and decay exponentially in each direction.
pub fn quad_kl_gamma(p: &GammaParams<f64>, q: &GammaParams<f64>) -> Result<f64> {
    let min_shape = p.shape.min(q.shape);
    let hi = (p.mean().max(q.mean())
        + 10.0 * (p.shape.sqrt() / p.rate).max(q.shape.sqrt() / q.rate))
    .ln()
        + 4.0;
    let lo = (p.mean().min(q.mean())).ln() - 50.0 / min_shape;
    let axes = vec![Axis::new(lo, hi, DEFAULT_RESOLUTION_1D)?];
    let in_log = |g: &GammaParams<f64>| {
        let g = *g;
        move |t: &[f64]| g.shape * t[0] - g.rate * t[0].exp()
    };
    let dp = GridDensity::from_log_fn(axes.clone(), in_log(p))?;
    let dq = GridDensity::from_log_fn(axes, in_log(q))?;
    grid_kl(&dp, &dq)
}

/// `D_KL(p, q)` for Dirichlet distributions with `K = 2` (logit of the first
/// coordinate) or `K = 3` (stick-breaking logits), where the transformed
/// densities are smooth on the whole plane.
pub fn quad_kl_dirichlet(p: &DirichletParams<f64>, q: &DirichletParams<f64>) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::LengthMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    let min_alpha = p
        .alphas()
        .iter()
        .chain(q.alphas())
        .copied()
        .fold(f64::INFINITY, f64::min);
    let half = 40.0 / min_alpha + 10.0;
    match p.dim() {
        2 => {
            let axes = vec![Axis::new(-half, half, DEFAULT_RESOLUTION_1D)?];
            // x = σ(t), density in t: x^a (1 - x)^b
            let f = |d: &DirichletParams<f64>| {
                let a = d.alphas().to_vec();
                move |t: &[f64]| a[0] * log_sigmoid(t[0]) + a[1] * log_sigmoid(-t[0])
            };
            let dp = GridDensity::from_log_fn(axes.clone(), f(p))?;
            let dq = GridDensity::from_log_fn(axes, f(q))?;
            grid_kl(&dp, &dq)
        }
        3 => {
            let axis = Axis::new(-half, half, DEFAULT_RESOLUTION_2D)?;
            let axes = vec![axis, axis];
            // x1 = σ(s), x2 = (1 - x1) σ(t), x3 = (1 - x1)(1 - σ(t));
            // Jacobian x1 (1 - x1)^2 σ(t)(1 - σ(t))
            let f = |d: &DirichletParams<f64>| {
                let a = d.alphas().to_vec();
                move |t: &[f64]| {
                    let l1 = log_sigmoid(t[0]);
                    let l1c = log_sigmoid(-t[0]);
                    let l2 = log_sigmoid(t[1]);
                    let l2c = log_sigmoid(-t[1]);
                    a[0] * l1 + (a[1] + a[2]) * l1c + a[1] * l2 + a[2] * l2c
                }
            };
            let dp = GridDensity::from_log_fn(axes.clone(), f(p))?;
            let dq = GridDensity::from_log_fn(axes, f(q))?;
            grid_kl(&dp, &dq)
        }
        k => Err(Error::InvalidParameter(format!(
            "Dirichlet quadrature supports K = 2 or 3, got {k}"
        ))),
    }
}
