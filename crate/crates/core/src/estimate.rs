use serde::Serialize;

use crate::engine::{Method, Prepared};
use crate::error::Result;

/// Pointwise posterior summaries on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorEstimate {
    pub grid: Vec<f64>,
    pub mean: Vec<f64>,
    /// Monte Carlo standard errors; all zero for exact evaluation.
    pub stderr: Vec<f64>,
    pub variance: Option<Vec<f64>>,
    pub dimension_posterior: Vec<(usize, f64)>,
    pub method: Method,
}

impl PosteriorEstimate {
    pub(crate) fn from_prepared(prepared: &Prepared, grid: &[f64], with_variance: bool) -> Result<Self> {
        let results = prepared.ratio_grid(grid)?;
        let variance = if with_variance {
            Some(
                grid.iter()
                    .zip(&results)
                    .map(|(&x, r)| Ok((prepared.second_moment_at(x)? - r.value * r.value).max(0.0)))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        Ok(Self {
            grid: grid.to_vec(),
            mean: results.iter().map(|r| r.value).collect(),
            stderr: results.iter().map(|r| r.stderr).collect(),
            variance,
            dimension_posterior: prepared.dimension_posterior(),
            method: prepared.method(),
        })
    }

    pub fn max_stderr(&self) -> f64 {
        self.stderr.iter().copied().fold(0.0, f64::max)
    }

    /// Posterior mode of the dimension.
    pub fn map_dimension(&self) -> Option<usize> {
        self.dimension_posterior
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(j, _)| *j)
    }
}
