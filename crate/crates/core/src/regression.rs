//! Binary and Poisson regression with identity links on unscaled B-splines.
//!
//! Binary: `P(X = 1 | Z = z) = θᵀB(z)` with independent Beta coordinates.
//! Poisson: `E[X | Z = z] = θᵀB(z)` with independent Gamma coordinates. Both
//! expand the likelihood over per-observation index choices; a Poisson count
//! `X` expands into weak compositions of `X` over the support of `B(Z)`.

use crate::engine::{Compositions, DimensionTerm, EngineOptions, EvalBasis, Method, Prepared, RatioSumSpec, Slot};
use crate::error::{Error, Result};
use crate::estimate::PosteriorEstimate;
use crate::laws::{BetaLaw, GammaLaw};
use crate::priors::{CoefFamily, DimensionPrior};
use crate::splinebasis::SplineBasis;

fn check_order(order: usize, dim_prior: &DimensionPrior) -> Result<()> {
    if order == 0 {
        return Err(Error::param("q", "spline order must be at least 1"));
    }
    if dim_prior.min() < order {
        return Err(Error::param(
            "dim-prior",
            format!("smallest dimension {} is below the spline order {order}", dim_prior.min()),
        ));
    }
    Ok(())
}

fn check_covariates(z: &[f64], x_len: usize) -> Result<()> {
    if z.len() != x_len {
        return Err(Error::DimensionMismatch { expected: z.len(), got: x_len });
    }
    if let Some(v) = z.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidData(format!("covariate {v} lies outside [0, 1]")));
    }
    Ok(())
}

fn sorted_pairs<T: Copy + Ord>(z: &[f64], x: &[T]) -> Vec<(f64, T)> {
    let mut pairs: Vec<(f64, T)> = z.iter().copied().zip(x.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    pairs
}

#[derive(Debug, Clone)]
pub struct BinaryModel {
    pub order: usize,
    pub dim_prior: DimensionPrior,
    pub a: f64,
    pub b: f64,
}

impl BinaryModel {
    pub fn new(order: usize, dim_prior: DimensionPrior, coef: CoefFamily) -> Result<Self> {
        let CoefFamily::Beta { a, b } = coef else {
            return Err(Error::param("coef-prior", format!("binary regression needs a Beta prior, got {coef}")));
        };
        check_order(order, &dim_prior)?;
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::param("coef-prior", "Beta parameters must be positive"));
        }
        Ok(Self { order, dim_prior, a, b })
    }

    pub fn spec(&self, z: &[f64], x: &[u8]) -> Result<RatioSumSpec> {
        check_covariates(z, x.len())?;
        if let Some(v) = x.iter().find(|&&v| v > 1) {
            return Err(Error::InvalidData(format!("binary response must be 0 or 1, got {v}")));
        }
        let pairs = sorted_pairs(z, x);
        RatioSumSpec::from_prior(&self.dim_prior, |j, log_prior| {
            let basis = SplineBasis::with_dim(self.order, j)?;
            let slots = pairs
                .iter()
                .map(|&(zi, xi)| Ok(Slot::single(basis.eval(zi)?, u32::from(xi))))
                .collect::<Result<Vec<_>>>()?;
            Ok(DimensionTerm {
                dim: j,
                log_prior,
                log_const: 0.0,
                slots,
                law: Box::new(BetaLaw::new(vec![self.a; j], vec![self.b; j])),
                eval: EvalBasis::Plain(basis),
            })
        })
    }
}

/// Posterior mean of the success probability on `grid`.
pub fn fit_binary(z: &[f64], x: &[u8], model: &BinaryModel, grid: &[f64], method: Method) -> Result<PosteriorEstimate> {
    let prepared = Prepared::new(&model.spec(z, x)?, method, EngineOptions::default())?;
    PosteriorEstimate::from_prepared(&prepared, grid, false)
}

#[derive(Debug, Clone)]
pub struct PoissonModel {
    pub order: usize,
    pub dim_prior: DimensionPrior,
    pub shape: f64,
    pub rate: f64,
}

impl PoissonModel {
    pub fn new(order: usize, dim_prior: DimensionPrior, coef: CoefFamily) -> Result<Self> {
        let CoefFamily::Gamma { shape, rate } = coef else {
            return Err(Error::param("coef-prior", format!("Poisson regression needs a Gamma prior, got {coef}")));
        };
        check_order(order, &dim_prior)?;
        if !(shape > 0.0 && rate > 0.0) {
            return Err(Error::param("coef-prior", "Gamma parameters must be positive"));
        }
        Ok(Self { order, dim_prior, shape, rate })
    }

    pub fn spec(&self, z: &[f64], x: &[u32]) -> Result<RatioSumSpec> {
        check_covariates(z, x.len())?;
        let pairs = sorted_pairs(z, x);
        RatioSumSpec::from_prior(&self.dim_prior, |j, log_prior| {
            let basis = SplineBasis::with_dim(self.order, j)?;
            let mut exposure = vec![0.0; j];
            let mut slots = Vec::with_capacity(pairs.len());
            for &(zi, xi) in &pairs {
                let row = basis.eval(zi)?;
                for (k, b) in row.iter() {
                    exposure[k] += b;
                }
                // Zero counts contribute only through the exposure.
                if xi > 0 {
                    slots.push(Slot::composition(row, xi));
                }
            }
            Ok(DimensionTerm {
                dim: j,
                log_prior,
                // The `1/X!` of the pmf cancels against the multinomial expansion.
                log_const: 0.0,
                slots,
                law: Box::new(GammaLaw::new(vec![self.shape; j], vec![self.rate; j], &exposure)),
                eval: EvalBasis::Plain(basis),
            })
        })
    }
}

/// Posterior mean of the Poisson intensity on `grid`.
pub fn fit_poisson(z: &[f64], x: &[u32], model: &PoissonModel, grid: &[f64], method: Method) -> Result<PosteriorEstimate> {
    let prepared = Prepared::new(&model.spec(z, x)?, method, EngineOptions::default())?;
    PosteriorEstimate::from_prepared(&prepared, grid, false)
}

/// All weak compositions of `total` into `parts` nonnegative integers, in
/// lexicographic order.
pub fn enumerate_compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    Compositions::new(total, parts).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fixed(j: usize) -> DimensionPrior {
        DimensionPrior::fixed(j).unwrap()
    }

    #[test]
    fn beta_binomial_collapse() {
        for (a, b) in [(1.0, 1.0), (2.0, 0.5), (0.3, 4.0)] {
            let model = BinaryModel::new(1, fixed(1), CoefFamily::Beta { a, b }).unwrap();
            let z = [0.1, 0.5, 0.9, 0.2, 0.7];
            let x = [1, 0, 1, 1, 0];
            let est = fit_binary(&z, &x, &model, &[0.0, 0.3, 1.0], Method::Exact).unwrap();
            for v in est.mean {
                assert_abs_diff_eq!(v, (a + 3.0) / (a + b + 5.0), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn binary_prior_mean_is_one_half() {
        let model = BinaryModel::new(3, "geom:0.3:3:7".parse().unwrap(), CoefFamily::Beta { a: 1.0, b: 1.0 }).unwrap();
        let est = fit_binary(&[], &[], &model, &[0.0, 0.25, 0.8], Method::Exact).unwrap();
        for v in est.mean {
            assert_abs_diff_eq!(v, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn label_flip_symmetry() {
        let model = BinaryModel::new(2, "geom:0.4:2:4".parse().unwrap(), CoefFamily::Beta { a: 1.5, b: 1.5 }).unwrap();
        let z = [0.1, 0.35, 0.6, 0.8, 0.95];
        let x = [1, 1, 0, 1, 0];
        let flipped: Vec<u8> = x.iter().map(|v| 1 - v).collect();
        let grid = crate::splinebasis::unit_grid(21);
        let a = fit_binary(&z, &x, &model, &grid, Method::Exact).unwrap();
        let b = fit_binary(&z, &flipped, &model, &grid, Method::Exact).unwrap();
        for (u, v) in a.mean.iter().zip(&b.mean) {
            assert!((0.0..=1.0).contains(u));
            assert_abs_diff_eq!(u + v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gamma_poisson_collapse() {
        for (a, b) in [(1.0, 1.0), (2.0, 0.5), (0.5, 3.0)] {
            let model = PoissonModel::new(1, fixed(1), CoefFamily::Gamma { shape: a, rate: b }).unwrap();
            let z = [0.2, 0.5, 0.9];
            let x = [2, 0, 3];
            let est = fit_poisson(&z, &x, &model, &[0.1, 0.6], Method::Exact).unwrap();
            for v in est.mean {
                assert_abs_diff_eq!(v, (a + 5.0) / (b + 3.0), epsilon = 1e-10);
            }
            let zeros = fit_poisson(&z, &[0, 0, 0], &model, &[0.4], Method::Exact).unwrap();
            assert_abs_diff_eq!(zeros.mean[0], a / (b + 3.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn input_validation() {
        let bm = BinaryModel::new(1, fixed(2), CoefFamily::Beta { a: 1.0, b: 1.0 }).unwrap();
        assert!(fit_binary(&[0.5], &[2], &bm, &[0.5], Method::Exact).is_err());
        assert!(fit_binary(&[1.5], &[1], &bm, &[0.5], Method::Exact).is_err());
        assert!(fit_binary(&[0.5, 0.2], &[1], &bm, &[0.5], Method::Exact).is_err());
        assert!(BinaryModel::new(1, fixed(2), CoefFamily::Dirichlet { alpha: 1.0 }).is_err());
        let pm = PoissonModel::new(2, fixed(3), CoefFamily::Gamma { shape: 1.0, rate: 1.0 }).unwrap();
        let big = fit_poisson(&[0.3; 8], &[60; 8], &pm, &[0.5], Method::Exact);
        assert!(matches!(big, Err(Error::EnumerationBudget { .. })));
        assert!(fit_poisson(&[0.3; 8], &[60; 8], &pm, &[0.5], Method::mc(200, 1)).is_ok());
    }

    #[test]
    fn compositions_examples() {
        assert_eq!(enumerate_compositions(3, 2), vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);
        assert_eq!(enumerate_compositions(0, 5), vec![vec![0; 5]]);
        assert_eq!(enumerate_compositions(4, 3).len(), 15);
    }

    #[test]
    fn estimates_stay_in_range() {
        let pm = PoissonModel::new(2, "geom:0.5:2:4".parse().unwrap(), CoefFamily::Gamma { shape: 1.0, rate: 1.0 }).unwrap();
        let grid = crate::splinebasis::unit_grid(17);
        for method in [Method::Exact, Method::mc(500, 3)] {
            let est = fit_poisson(&[0.1, 0.4, 0.8], &[3, 0, 5], &pm, &grid, method).unwrap();
            assert!(est.mean.iter().all(|&v| v >= 0.0 && v.is_finite()));
        }
    }
}
