//! Prior information `u = KL(posterior ‖ normalized likelihood)` and
//! likelihood information `v = KL(posterior ‖ prior)` for parametric Bayesian
//! models.
//!
//! Closed forms for the Normal-Normal, Poisson-Gamma and
//! Multinomial-Dirichlet pairs are generic over the float type; the aliases
//! below fix it to `f64` or `f32`. Grid and finite-model oracles, the Monte
//! Carlo estimators, samplers and the experiment pipeline work in `f64`.

pub mod conjugate;
pub mod divergences;
pub mod error;
pub mod mc;
pub mod oracle;
pub mod pipeline;
pub mod regression;
pub mod samplers;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Real;

pub type NormalParams64 = divergences::NormalParams<f64>;
pub type GammaParams64 = divergences::GammaParams<f64>;
pub type DirichletParams64 = divergences::DirichletParams<f64>;
pub type InfoPair64 = conjugate::InfoPair<f64>;
pub type NormalNormal64 = conjugate::NormalNormalModel<f64>;
pub type PoissonGamma64 = conjugate::PoissonGammaModel<f64>;
pub type MultinomialDirichlet64 = conjugate::MultinomialDirichletModel<f64>;

pub type NormalParams32 = divergences::NormalParams<f32>;
pub type GammaParams32 = divergences::GammaParams<f32>;
pub type DirichletParams32 = divergences::DirichletParams<f32>;
pub type InfoPair32 = conjugate::InfoPair<f32>;
pub type NormalNormal32 = conjugate::NormalNormalModel<f32>;
pub type PoissonGamma32 = conjugate::PoissonGammaModel<f32>;
pub type MultinomialDirichlet32 = conjugate::MultinomialDirichletModel<f32>;
