//! Open midpoint grids in one or two dimensions, with densities kept in log
//! space.
//!
//! Nodes sit at cell centres and never on the boundary, so priors that blow
//! up at the edge of the domain are still evaluated at finite points.
//! Evaluators may return `-inf` for zero density. `NaN` or `+inf` at any node
//! is an error.

use rayon::prelude::*;

use crate::conjugate::InfoPair;
use crate::error::{Error, Result};
use crate::special::log_sum_exp;

/// Smallest resolution accepted per axis.
pub const MIN_RESOLUTION: usize = 64;
/// Default resolution per axis for two-dimensional grids.
pub const DEFAULT_RESOLUTION_2D: usize = 1024;
/// Default resolution for one-dimensional grids.
pub const DEFAULT_RESOLUTION_1D: usize = 65_536;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lower: f64,
    pub upper: f64,
    pub resolution: usize,
}

impl Axis {
    pub fn new(lower: f64, upper: f64, resolution: usize) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::InvalidParameter(format!(
                "axis bounds must be finite with lower < upper, got [{lower}, {upper}]"
            )));
        }
        if resolution < MIN_RESOLUTION {
            return Err(Error::InvalidParameter(format!(
                "grid resolution {resolution} is below the minimum of {MIN_RESOLUTION}"
            )));
        }
        Ok(Self {
            lower,
            upper,
            resolution,
        })
    }

    pub fn width(&self) -> f64 {
        (self.upper - self.lower) / self.resolution as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lower + (i as f64 + 0.5) * self.width()
    }
}

pub type LogFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A low-dimensional model given by black-box log-prior and log-likelihood
/// evaluators over a rectangular domain.
pub struct GridModel {
    axes: Vec<Axis>,
    log_prior: LogFn,
    log_likelihood: LogFn,
}

impl std::fmt::Debug for GridModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridModel")
            .field("axes", &self.axes)
            .finish_non_exhaustive()
    }
}

impl GridModel {
    pub fn new<P, L>(axes: Vec<Axis>, log_prior: P, log_likelihood: L) -> Result<Self>
    where
        P: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        L: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        check_axes(&axes)?;
        Ok(Self {
            axes,
            log_prior: Box::new(log_prior),
            log_likelihood: Box::new(log_likelihood),
        })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn log_prior(&self, point: &[f64]) -> f64 {
        (self.log_prior)(point)
    }

    pub fn log_likelihood(&self, point: &[f64]) -> f64 {
        (self.log_likelihood)(point)
    }
}

fn check_axes(axes: &[Axis]) -> Result<()> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::InvalidParameter(format!(
            "grids support 1 or 2 dimensions, got {}",
            axes.len()
        )));
    }
    for a in axes {
        Axis::new(a.lower, a.upper, a.resolution)?;
    }
    Ok(())
}

fn node_count(axes: &[Axis]) -> usize {
    axes.iter().map(|a| a.resolution).product()
}

fn node_point(axes: &[Axis], index: usize, out: &mut [f64]) {
    match axes {
        [a] => out[0] = a.node(index),
        [a, b] => {
            out[0] = a.node(index / b.resolution);
            out[1] = b.node(index % b.resolution);
        }
        _ => unreachable!("axes validated"),
    }
}

/// Evaluates `f` at every node, rejecting `NaN` and `+inf`.
fn evaluate(
    axes: &[Axis],
    source_name: &'static str,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
) -> Result<Vec<f64>> {
    let dim = axes.len();
    (0..node_count(axes))
        .into_par_iter()
        .map_init(
            || vec![0.0; dim],
            |point, i| {
                node_point(axes, i, point);
                let v = f(point);
                if v.is_nan() || v == f64::INFINITY {
                    Err(Error::NonFinite {
                        source_name,
                        node: i,
                        value: v,
                    })
                } else {
                    Ok(v)
                }
            },
        )
        .collect()
}

/// A density on a grid: log values at the nodes, normalized so that the
/// midpoint rule integrates it to one.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    axes: Vec<Axis>,
    log_density: Vec<f64>,
    cell_volume: f64,
}

impl GridDensity {
    /// Normalizes an unnormalized log density given at the nodes.
    pub fn from_log_values(axes: Vec<Axis>, mut log_values: Vec<f64>) -> Result<Self> {
        check_axes(&axes)?;
        if log_values.len() != node_count(&axes) {
            return Err(Error::LengthMismatch {
                expected: node_count(&axes),
                found: log_values.len(),
            });
        }
        if let Some((node, &value)) = log_values
            .iter()
            .enumerate()
            .find(|(_, v)| v.is_nan() || **v == f64::INFINITY)
        {
            return Err(Error::NonFinite {
                source_name: "log density",
                node,
                value,
            });
        }
        let cell_volume: f64 = axes.iter().map(Axis::width).product();
        let log_mass = log_sum_exp(&log_values)? + cell_volume.ln();
        if !log_mass.is_finite() {
            return Err(Error::NotIntegrable(format!(
                "grid normalizer is exp({log_mass})"
            )));
        }
        log_values.par_iter_mut().for_each(|v| *v -= log_mass);
        Ok(Self {
            axes,
            log_density: log_values,
            cell_volume,
        })
    }

    /// Evaluates and normalizes `f` on the grid.
    pub fn from_log_fn<F>(axes: Vec<Axis>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        check_axes(&axes)?;
        let values = evaluate(&axes, "log density", &f)?;
        Self::from_log_values(axes, values)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn log_density(&self) -> &[f64] {
        &self.log_density
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    /// Midpoint-rule total mass; one up to rounding.
    pub fn total_mass(&self) -> f64 {
        self.log_density.iter().map(|l| l.exp()).sum::<f64>() * self.cell_volume
    }

    /// Coordinates of node `index`.
    pub fn node(&self, index: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.axes.len()];
        node_point(&self.axes, index, &mut p);
        p
    }

    /// Differential entropy by the midpoint rule.
    pub fn entropy(&self) -> f64 {
        // sequential sum: a parallel reduction would round differently
        // depending on the thread count
        -self
            .log_density
            .iter()
            .filter(|l| l.is_finite())
            .map(|&l| l.exp() * l)
            .sum::<f64>()
            * self.cell_volume
    }
}

pub fn grid_posterior(model: &GridModel) -> Result<GridDensity> {
    let lp = evaluate(&model.axes, "log prior", &model.log_prior)?;
    let ll = evaluate(&model.axes, "log likelihood", &model.log_likelihood)?;
    let joint = lp.iter().zip(&ll).map(|(a, b)| a + b).collect();
    GridDensity::from_log_values(model.axes.clone(), joint)
}

/// The prior renormalized over the grid domain.
pub fn grid_prior(model: &GridModel) -> Result<GridDensity> {
    let lp = evaluate(&model.axes, "log prior", &model.log_prior)?;
    GridDensity::from_log_values(model.axes.clone(), lp)
}

pub fn grid_normalized_likelihood(model: &GridModel) -> Result<GridDensity> {
    let ll = evaluate(&model.axes, "log likelihood", &model.log_likelihood)?;
    GridDensity::from_log_values(model.axes.clone(), ll)
}

/// Midpoint-rule `D_KL(p, q)`. Fails if `q` vanishes where `p` has mass.
pub fn grid_kl(p: &GridDensity, q: &GridDensity) -> Result<f64> {
    if p.axes != q.axes {
        return Err(Error::InvalidParameter(
            "densities live on different grids".into(),
        ));
    }
    let terms: Result<Vec<f64>> = p
        .log_density
        .par_iter()
        .zip(&q.log_density)
        .enumerate()
        .map(|(i, (&lp, &lq))| {
            if lp == f64::NEG_INFINITY {
                Ok(0.0)
            } else if lq == f64::NEG_INFINITY {
                Err(Error::Support(format!(
                    "second density is zero at node {i} where the first is positive"
                )))
            } else {
                Ok(lp.exp() * (lp - lq))
            }
        })
        .collect();
    Ok(terms?.iter().sum::<f64>() * p.cell_volume)
}

/// Prior and likelihood information by quadrature, with the prior
/// renormalized over the domain.
pub fn grid_info(model: &GridModel) -> Result<InfoPair<f64>> {
    let lp = evaluate(&model.axes, "log prior", &model.log_prior)?;
    let ll = evaluate(&model.axes, "log likelihood", &model.log_likelihood)?;
    let joint = lp.iter().zip(&ll).map(|(a, b)| a + b).collect();
    let post = GridDensity::from_log_values(model.axes.clone(), joint)?;
    let prior = GridDensity::from_log_values(model.axes.clone(), lp)?;
    let nl = GridDensity::from_log_values(model.axes.clone(), ll)?;
    Ok(InfoPair::new(grid_kl(&post, &nl)?, grid_kl(&post, &prior)?))
}

/// Like [`grid_info`], but trusts the prior's own normalization. Use it when
/// the prior integrates to one analytically but has integrable
/// singularities that a midpoint sum under-weights by `O(h^(1/2))`.
pub fn grid_info_proper_prior(model: &GridModel) -> Result<InfoPair<f64>> {
    grid_info_reparameterized(model, &|_| 0.0)
}

/// Information for a model stated in coordinates `x` but integrated over
/// grid coordinates `t`, with `x = g(t)` and `log_jacobian(t) = ln|g'(t)|`.
///
/// The model's log prior is an `x`-space density evaluated at `g(t)` and is
/// taken as normalized; its log likelihood is `ln p(y | g(t))`. Both
/// divergences are invariant under the change of variables, so the result
/// is `u` and `v` in `x`-space, where the normalized likelihood is
/// normalized with respect to `dx`. A `g` that flattens boundary
/// singularities makes the midpoint rule converge much faster.
pub fn grid_info_reparameterized(
    model: &GridModel,
    log_jacobian: &(dyn Fn(&[f64]) -> f64 + Sync),
) -> Result<InfoPair<f64>> {
    let lj = evaluate(&model.axes, "log jacobian", log_jacobian)?;
    let lp: Vec<f64> = evaluate(&model.axes, "log prior", &model.log_prior)?
        .iter()
        .zip(&lj)
        .map(|(a, b)| a + b)
        .collect();
    let ll = evaluate(&model.axes, "log likelihood", &model.log_likelihood)?;
    let joint = lp.iter().zip(&ll).map(|(a, b)| a + b).collect();
    let post = GridDensity::from_log_values(model.axes.clone(), joint)?;
    let nl_logs = ll.iter().zip(&lj).map(|(a, b)| a + b).collect();
    let nl = GridDensity::from_log_values(model.axes.clone(), nl_logs)?;
    let terms: Vec<f64> = post
        .log_density
        .par_iter()
        .zip(&lp)
        .map(|(&l, &p)| {
            if l == f64::NEG_INFINITY {
                0.0
            } else {
                l.exp() * (l - p)
            }
        })
        .collect();
    let v = terms.iter().sum::<f64>() * post.cell_volume;
    if !v.is_finite() {
        return Err(Error::Support(
            "prior vanishes where the posterior has mass".into(),
        ));
    }
    Ok(InfoPair::new(grid_kl(&post, &nl)?, v))
}

/// Both sides of the bound on likelihood information for a possibly
/// unnormalized prior, together with `v` itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaBounds {
    pub lower: f64,
    pub upper: f64,
    pub v: f64,
}

/// `v = E_post[log(post / prior)]` with the prior taken as given (not
/// renormalized), bracketed by
/// `-H(post) - log sup prior <= v <= log sup likelihood - log p(y)`.
pub fn lemma_bounds(model: &GridModel) -> Result<LemmaBounds> {
    let lp = evaluate(&model.axes, "log prior", &model.log_prior)?;
    let ll = evaluate(&model.axes, "log likelihood", &model.log_likelihood)?;
    let max_lp = lp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_ll = ll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let joint: Vec<f64> = lp.iter().zip(&ll).map(|(a, b)| a + b).collect();
    let cell: f64 = model.axes.iter().map(Axis::width).product();
    let log_evidence = log_sum_exp(&joint)? + cell.ln();
    let post = GridDensity::from_log_values(model.axes.clone(), joint)?;

    let v = post
        .log_density
        .iter()
        .zip(&lp)
        .filter(|(l, _)| l.is_finite())
        .map(|(&l, &p)| l.exp() * (l - p))
        .sum::<f64>()
        * cell;
    let entropy = post.entropy();
    let out = LemmaBounds {
        lower: -entropy - max_lp,
        upper: max_ll - log_evidence,
        v,
    };
    if [out.lower, out.upper, out.v].iter().any(|x| !x.is_finite()) {
        return Err(Error::NotIntegrable(format!(
            "non-finite bound terms {out:?}"
        )));
    }
    Ok(out)
}
