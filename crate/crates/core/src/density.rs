//! Density estimation on [0, 1] with a Dirichlet prior on the weights of a
//! scaled B-spline mixture, `f = Σ θ_k B*_k` with `θ` on the simplex.
//!
//! Each observation is a single-index slot weighted by `B*_k(X_s)`; the
//! conjugate integral is Dirichlet-multinomial. Densities on the real line are
//! handled by mapping the data through a monotone link `Ψ : ℝ → [0, 1]` and
//! reporting `f̂(Ψ(y)) Ψ'(y)`.

use serde::Serialize;

use crate::engine::{EngineOptions, EvalBasis, Method, Prepared, RatioSumSpec, Slot};
use crate::engine::DimensionTerm;
use crate::error::{Error, Result};
use crate::estimate::PosteriorEstimate;
use crate::laws::DirichletLaw;
use crate::priors::{CoefFamily, DimensionPrior};
use crate::splinebasis::{ScaledBasis, SplineBasis};

#[derive(Debug, Clone)]
pub struct DensityModel {
    pub order: usize,
    pub dim_prior: DimensionPrior,
    /// Symmetric Dirichlet parameter.
    pub alpha: f64,
}

impl DensityModel {
    pub fn new(order: usize, dim_prior: DimensionPrior, coef: CoefFamily) -> Result<Self> {
        let CoefFamily::Dirichlet { alpha } = coef else {
            return Err(Error::param("coef-prior", format!("density needs a Dirichlet prior, got {coef}")));
        };
        if order == 0 {
            return Err(Error::param("q", "spline order must be at least 1"));
        }
        if dim_prior.min() < order {
            return Err(Error::param(
                "dim-prior",
                format!("smallest dimension {} is below the spline order {order}", dim_prior.min()),
            ));
        }
        if !(alpha > 0.0) {
            return Err(Error::param("coef-prior", "Dirichlet parameter must be positive"));
        }
        Ok(Self { order, dim_prior, alpha })
    }

    /// Ratio-of-sums problem for `data`, sorted internally so the
    /// result does not depend on input order.
    pub fn spec(&self, data: &[f64]) -> Result<RatioSumSpec> {
        let data = sorted_unit_data(data)?;
        RatioSumSpec::from_prior(&self.dim_prior, |j, log_prior| {
            let scaled = ScaledBasis::new(SplineBasis::with_dim(self.order, j)?);
            let slots = data
                .iter()
                .map(|&x| Ok(Slot::single(scaled.eval(x)?, 0)))
                .collect::<Result<Vec<_>>>()?;
            Ok(DimensionTerm {
                dim: j,
                log_prior,
                log_const: 0.0,
                slots,
                law: Box::new(DirichletLaw::new(vec![self.alpha; j])),
                eval: EvalBasis::Scaled(scaled),
            })
        })
    }
}

fn sorted_unit_data(data: &[f64]) -> Result<Vec<f64>> {
    if let Some(&x) = data.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::InvalidData(format!("observation {x} lies outside [0, 1]")));
    }
    let mut data = data.to_vec();
    data.sort_by(f64::total_cmp);
    Ok(data)
}

/// Prepared posterior for one data set; evaluate anywhere on [0, 1].
pub struct DensityFit {
    prepared: Prepared,
}

impl DensityFit {
    pub fn new(data: &[f64], model: &DensityModel, method: Method, with_variance: bool) -> Result<Self> {
        let options = EngineOptions { second_moments: with_variance, ..EngineOptions::default() };
        Ok(Self { prepared: Prepared::new(&model.spec(data)?, method, options)? })
    }

    pub fn prepared(&self) -> &Prepared {
        &self.prepared
    }

    pub fn mean_at(&self, x: f64) -> Result<f64> {
        Ok(self.prepared.ratio_at(x)?.value)
    }

    pub fn variance_at(&self, x: f64) -> Result<f64> {
        self.prepared.variance_at(x)
    }

    pub fn estimate(&self, grid: &[f64], with_variance: bool) -> Result<PosteriorEstimate> {
        PosteriorEstimate::from_prepared(&self.prepared, grid, with_variance)
    }

    /// Density on the real line under `link`, at `y`.
    pub fn mean_on_real(&self, link: Link, y: f64) -> Result<f64> {
        Ok(self.mean_at(link.forward(y))? * link.derivative(y))
    }
}

/// Posterior mean density on `grid` (with Monte Carlo standard errors).
pub fn fit_density(data: &[f64], model: &DensityModel, grid: &[f64], method: Method) -> Result<PosteriorEstimate> {
    DensityFit::new(data, model, method, false)?.estimate(grid, false)
}

/// Posterior variance of `f(x)`.
pub fn posterior_variance_at(model: &DensityModel, data: &[f64], x: f64, method: Method) -> Result<f64> {
    DensityFit::new(data, model, method, true)?.variance_at(x)
}

/// Monotone map from the real line onto [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "link", rename_all = "snake_case")]
pub enum Link {
    /// Data already on [0, 1].
    Identity,
    /// `Ψ(y) = 1 / (1 + exp(−(y − location)/scale))`.
    Logistic { location: f64, scale: f64 },
}

impl Link {
    pub fn forward(&self, y: f64) -> f64 {
        match *self {
            Link::Identity => y,
            Link::Logistic { location, scale } => 1.0 / (1.0 + (-(y - location) / scale).exp()),
        }
    }

    pub fn derivative(&self, y: f64) -> f64 {
        match *self {
            Link::Identity => 1.0,
            Link::Logistic { scale, .. } => {
                let p = self.forward(y);
                p * (1.0 - p) / scale
            }
        }
    }
}

/// Maps a sample on the real line into [0, 1].
pub fn transform_unbounded(data: &[f64], link: Link) -> Result<Vec<f64>> {
    if let Some(x) = data.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidData(format!("nonfinite observation {x}")));
    }
    if let Link::Logistic { scale, .. } = link {
        if !(scale > 0.0) {
            return Err(Error::param("link", "logistic scale must be positive"));
        }
    }
    let mapped: Vec<f64> = data.iter().map(|&y| link.forward(y)).collect();
    if let Some(x) = mapped.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::InvalidData(format!("identity link needs data in [0, 1], got {x}")));
    }
    Ok(mapped)
}

/// Posterior mean density on the real line at the points of `grid`.
pub fn fit_density_unbounded(
    data: &[f64],
    model: &DensityModel,
    link: Link,
    grid: &[f64],
    method: Method,
) -> Result<PosteriorEstimate> {
    let mapped = transform_unbounded(data, link)?;
    let fit = DensityFit::new(&mapped, model, method, false)?;
    let unit: Vec<f64> = grid.iter().map(|&y| link.forward(y)).collect();
    let mut est = fit.estimate(&unit, false)?;
    for ((m, s), &y) in est.mean.iter_mut().zip(est.stderr.iter_mut()).zip(grid) {
        let d = link.derivative(y);
        *m *= d;
        *s *= d;
    }
    est.grid = grid.to_vec();
    Ok(est)
}
