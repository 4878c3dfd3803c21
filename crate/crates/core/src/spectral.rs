//! Whittle-likelihood spectral density estimation.
//!
//! Frequencies live on [0, 1]: `λ = 1` is the Nyquist frequency, so the
//! usual angular frequency is `πλ`. The periodogram is
//! `I(λ) = |Σ_t X_t e^{−itπλ}|² / (2πn)` at `λ_j = 2j/n`, `j = 1..⌊n/2⌋`, and
//! the ordinates are treated as independent exponentials with means `f(λ_j)`.
//! The model places `1/f = θᵀB` with independent Gamma coordinates, which is
//! conjugate to that likelihood.

use serde::Serialize;

use crate::engine::{DimensionTerm, EngineOptions, EvalBasis, Method, Prepared, RatioSumSpec, Slot};
use crate::error::{Error, Result};
use crate::estimate::PosteriorEstimate;
use crate::laws::GammaLaw;
use crate::priors::{CoefFamily, DimensionPrior};
use crate::splinebasis::SplineBasis;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodogramData {
    /// Series length.
    pub n: usize,
    /// Mean removed before transforming.
    pub mean: f64,
    pub frequencies: Vec<f64>,
    pub ordinates: Vec<f64>,
}

impl PeriodogramData {
    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }
}

/// Periodogram of a mean-corrected series, summed directly.
pub fn periodogram(series: &[f64]) -> Result<PeriodogramData> {
    let n = series.len();
    if n < 2 {
        return Err(Error::InvalidData(format!("periodogram needs at least 2 observations, got {n}")));
    }
    if let Some(x) = series.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidData(format!("nonfinite series value {x}")));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let nu = n / 2;
    let scale = 2.0 * std::f64::consts::PI * n as f64;
    let mut frequencies = Vec::with_capacity(nu);
    let mut ordinates = Vec::with_capacity(nu);
    for j in 1..=nu {
        // e^{−itπλ_j} = e^{−2πi tj/n}; reduce tj mod n to keep the angle small.
        let (mut re, mut im) = (0.0, 0.0);
        for (t0, x) in series.iter().enumerate() {
            let t = t0 + 1;
            let angle = 2.0 * std::f64::consts::PI * ((t * j) % n) as f64 / n as f64;
            re += (x - mean) * angle.cos();
            im -= (x - mean) * angle.sin();
        }
        frequencies.push(2.0 * j as f64 / n as f64);
        ordinates.push((re * re + im * im) / scale);
    }
    Ok(PeriodogramData { n, mean, frequencies, ordinates })
}

#[derive(Debug, Clone)]
pub struct SpectralModel {
    pub order: usize,
    pub dim_prior: DimensionPrior,
    pub shape: f64,
    pub rate: f64,
}

impl SpectralModel {
    pub fn new(order: usize, dim_prior: DimensionPrior, coef: CoefFamily) -> Result<Self> {
        let CoefFamily::Gamma { shape, rate } = coef else {
            return Err(Error::param("coef-prior", format!("spectral model needs a Gamma prior, got {coef}")));
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
        if !(shape > 0.0 && rate > 0.0) {
            return Err(Error::param("coef-prior", "Gamma parameters must be positive"));
        }
        Ok(Self { order, dim_prior, shape, rate })
    }

    pub fn spec(&self, pgram: &PeriodogramData) -> Result<RatioSumSpec> {
        if pgram.is_empty() {
            return Err(Error::InvalidData("periodogram has no ordinates".into()));
        }
        if pgram.frequencies.len() != pgram.ordinates.len() {
            return Err(Error::DimensionMismatch { expected: pgram.frequencies.len(), got: pgram.ordinates.len() });
        }
        if let Some(u) = pgram.ordinates.iter().find(|u| !(u.is_finite() && **u >= 0.0)) {
            return Err(Error::InvalidData(format!("periodogram ordinate {u} is not a nonnegative number")));
        }
        let mut pairs: Vec<(f64, f64)> = pgram.frequencies.iter().copied().zip(pgram.ordinates.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        RatioSumSpec::from_prior(&self.dim_prior, |j, log_prior| {
            let basis = SplineBasis::with_dim(self.order, j)?;
            let mut exposure = vec![0.0; j];
            let mut slots = Vec::with_capacity(pairs.len());
            for &(w, u) in &pairs {
                let row = basis.eval(w)?;
                for (k, b) in row.iter() {
                    exposure[k] += u * b;
                }
                slots.push(Slot::single(row, 0));
            }
            Ok(DimensionTerm {
                dim: j,
                log_prior,
                log_const: 0.0,
                slots,
                law: Box::new(GammaLaw::new(vec![self.shape; j], vec![self.rate; j], &exposure)),
                eval: EvalBasis::Plain(basis),
            })
        })
    }
}

/// Posterior mean of the inverse spectral density `1/f` on `grid`.
pub fn fit_inverse_spectral(
    pgram: &PeriodogramData,
    model: &SpectralModel,
    grid: &[f64],
    method: Method,
) -> Result<PosteriorEstimate> {
    let prepared = Prepared::new(&model.spec(pgram)?, method, EngineOptions::default())?;
    PosteriorEstimate::from_prepared(&prepared, grid, false)
}

/// Plug-in spectral density `1 / E[1/f]`. This is not the posterior mean of `f`.
pub fn spectral_density_estimate(inverse: &PosteriorEstimate) -> Result<Vec<f64>> {
    inverse
        .mean
        .iter()
        .zip(&inverse.grid)
        .map(|(&m, &w)| {
            if m > 0.0 && m.is_finite() {
                Ok(1.0 / m)
            } else {
                Err(Error::InvalidData(format!("inverse spectral estimate {m} at {w} is not positive")))
            }
        })
        .collect()
}
