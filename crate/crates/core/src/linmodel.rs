//! Conjugate Gaussian models mixed over the basis dimension: the white-noise
//! sequence model, nonparametric regression and functional regression.
//!
//! Regression uses `X = Bθ + ε`, `ε ~ N(0, σ²I)`, `θ | σ² ~ N(0, σ²τ²I)` and
//! `σ² ~ IG(α₀, β₀)`, so every dimension has a closed-form evidence. An
//! optional lower bound on `σ` truncates the precision and the evidence is
//! then integrated numerically over it.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::density::Link;
use crate::engine::Method;
use crate::error::{Error, Result};
use crate::estimate::PosteriorEstimate;
use crate::numeric::{ln_gamma, LogSumExp};
use crate::oracle::quad_integrate;
use crate::priors::DimensionPrior;
use crate::splinebasis::SplineBasis;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn normalize(dims: &[usize], logs: &[f64]) -> Vec<(usize, f64)> {
    let mut acc = LogSumExp::new();
    logs.iter().for_each(|&l| acc.push(l));
    let norm = acc.value();
    dims.iter().zip(logs).map(|(&j, &l)| (j, (l - norm).exp())).collect()
}

/// `X_i = θ_i + n^{-1/2} ε_i` with `θ_i ~ N(0, τ²)` for `i ≤ J` and zero beyond.
#[derive(Debug, Clone)]
pub struct SequenceModel {
    pub observations: Vec<f64>,
    pub n: f64,
    pub tau2: f64,
    pub dim_prior: DimensionPrior,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhiteNoiseFit {
    pub coefficients: Vec<f64>,
    pub dimension_posterior: Vec<(usize, f64)>,
    pub log_marginals: Vec<f64>,
}

impl SequenceModel {
    fn validate(&self) -> Result<()> {
        if !(self.n >= 1.0) {
            return Err(Error::param("n", "noise level n must be at least 1"));
        }
        if !(self.tau2 > 0.0) {
            return Err(Error::param("tau2", "prior variance must be positive"));
        }
        if self.dim_prior.max() > self.observations.len() {
            return Err(Error::param(
                "dim-prior",
                format!("largest dimension {} exceeds the {} observed coordinates", self.dim_prior.max(), self.observations.len()),
            ));
        }
        if let Some(x) = self.observations.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidData(format!("nonfinite coordinate {x}")));
        }
        Ok(())
    }
}

fn ln_normal(x: f64, var: f64) -> f64 {
    -0.5 * (LN_2PI + var.ln()) - x * x / (2.0 * var)
}

pub fn fit_whitenoise(model: &SequenceModel) -> Result<WhiteNoiseFit> {
    model.validate()?;
    let x = &model.observations;
    let noise = 1.0 / model.n;
    let shrink = model.n * model.tau2 / (model.n * model.tau2 + 1.0);
    // Prefix sums of the "signal" minus "noise" log densities.
    let mut all_noise = 0.0;
    let mut gain = vec![0.0; x.len() + 1];
    for (i, &xi) in x.iter().enumerate() {
        let null = ln_normal(xi, noise);
        all_noise += null;
        gain[i + 1] = gain[i] + ln_normal(xi, model.tau2 + noise) - null;
    }
    let (dims, logs): (Vec<usize>, Vec<f64>) = model
        .dim_prior
        .support()
        .map(|(j, lp)| (j, lp + all_noise + gain[j]))
        .unzip();
    let log_marginals: Vec<f64> = dims.iter().map(|&j| all_noise + gain[j]).collect();
    let dimension_posterior = normalize(&dims, &logs);
    let coefficients = x
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let w: f64 = dimension_posterior.iter().filter(|(j, _)| *j > i).map(|p| p.1).sum();
            w * shrink * xi
        })
        .collect();
    Ok(WhiteNoiseFit { coefficients, dimension_posterior, log_marginals })
}

#[derive(Debug, Clone)]
pub struct GaussRegressionModel {
    pub order: usize,
    pub dim_prior: DimensionPrior,
    pub tau2: f64,
    pub alpha0: f64,
    pub beta0: f64,
    /// Lower bound on the noise standard deviation.
    pub sigma_min: Option<f64>,
    /// Map from the covariate scale onto [0, 1].
    pub covariate_link: Link,
}

impl GaussRegressionModel {
    pub fn new(order: usize, dim_prior: DimensionPrior, tau2: f64, alpha0: f64, beta0: f64) -> Result<Self> {
        let model = Self { order, dim_prior, tau2, alpha0, beta0, sigma_min: None, covariate_link: Link::Identity };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::param("q", "spline order must be at least 1"));
        }
        if self.dim_prior.min() < self.order {
            return Err(Error::param(
                "dim-prior",
                format!("smallest dimension {} is below the spline order {}", self.dim_prior.min(), self.order),
            ));
        }
        if !(self.tau2 > 0.0 && self.alpha0 > 0.0 && self.beta0 > 0.0) {
            return Err(Error::param("coef-prior", "tau2, alpha0 and beta0 must be positive"));
        }
        if let Some(s) = self.sigma_min {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::param("sigma-min", "lower bound on sigma must be positive"));
            }
        }
        if let Link::Logistic { scale, .. } = self.covariate_link {
            if !(scale > 0.0) {
                return Err(Error::param("link", "logistic scale must be positive"));
            }
        }
        Ok(())
    }
}

/// Posterior mean coefficients and log evidence of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateFit {
    pub mean: DVector<f64>,
    pub log_evidence: f64,
}

/// `ln ∫_0^y t^{a−1} e^{−t} dt` by adaptive quadrature.
pub fn ln_lower_gamma_quad(a: f64, y: f64) -> Result<f64> {
    if !(a > 0.0 && y > 0.0) {
        return Err(Error::param("incomplete gamma", "shape and upper limit must be positive"));
    }
    // Near zero: with w = t^a the piece becomes (1/a) ∫_0^{y0^a} exp(−w^{1/a}) dw.
    let y0 = y.min(1.0);
    let head_len = y0.powf(a);
    let head = quad_integrate(|w| (-w.powf(1.0 / a)).exp(), 0.0, head_len, 1e-14 * head_len)? / a;
    let mut acc = LogSumExp::new();
    acc.push(head.ln());
    let top = y.min(a + 60.0 + 30.0 * a.sqrt());
    if top > y0 {
        let g = |t: f64| (a - 1.0) * t.ln() - t;
        let peak = g((a - 1.0).clamp(y0, top));
        let body = quad_integrate(|t| (g(t) - peak).exp(), y0, top, 1e-13)?;
        acc.push(body.ln() + peak);
    }
    Ok(acc.value())
}

/// Conjugate fit of `x = design·θ + ε` under the model's priors.
pub fn conjugate_fit(design: &DMatrix<f64>, x: &DVector<f64>, model: &GaussRegressionModel) -> Result<ConjugateFit> {
    let (n, j) = design.shape();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let mut precision = design.transpose() * design;
    for d in 0..j {
        precision[(d, d)] += 1.0 / model.tau2;
    }
    let chol = precision
        .cholesky()
        .ok_or_else(|| Error::Singular("regularized normal equations are not positive definite".into()))?;
    let rhs = design.transpose() * x;
    let mean = chol.solve(&rhs);
    let ln_det: f64 = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let resid = (x.dot(x) - mean.dot(&rhs)).max(0.0);
    let alpha_n = model.alpha0 + n as f64 / 2.0;
    let beta_n = model.beta0 + resid / 2.0;
    let common = -(n as f64) / 2.0 * LN_2PI - 0.5 * (j as f64 * model.tau2.ln() + ln_det) + model.alpha0 * model.beta0.ln();
    let log_evidence = match model.sigma_min {
        None => common - alpha_n * beta_n.ln() + ln_gamma(alpha_n) - ln_gamma(model.alpha0),
        Some(s) => {
            let cap = 1.0 / (s * s);
            common - alpha_n * beta_n.ln() + ln_lower_gamma_quad(alpha_n, beta_n * cap)?
                - ln_lower_gamma_quad(model.alpha0, model.beta0 * cap)?
        }
    };
    Ok(ConjugateFit { mean, log_evidence })
}

fn mix_curves(
    dims: &[usize],
    log_priors: &[f64],
    fits: &[ConjugateFit],
    bases: &[SplineBasis],
    unit_grid: &[f64],
    grid: &[f64],
) -> Result<PosteriorEstimate> {
    let logs: Vec<f64> = log_priors.iter().zip(fits).map(|(lp, f)| lp + f.log_evidence).collect();
    let dimension_posterior = normalize(dims, &logs);
    let mean = unit_grid
        .par_iter()
        .map(|&u| {
            let mut v = 0.0;
            for ((fit, basis), (_, w)) in fits.iter().zip(bases).zip(&dimension_posterior) {
                v += w * basis.eval(u)?.dot(fit.mean.as_slice());
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PosteriorEstimate {
        grid: grid.to_vec(),
        stderr: vec![0.0; grid.len()],
        mean,
        variance: None,
        dimension_posterior,
        method: Method::Exact,
    })
}

fn to_unit(values: &[f64], link: Link, what: &str) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&v| {
            let u = link.forward(v);
            if (0.0..=1.0).contains(&u) && v.is_finite() {
                Ok(u)
            } else {
                Err(Error::InvalidData(format!("{what} {v} lies outside [0, 1]")))
            }
        })
        .collect()
}

/// Posterior mean regression curve on `grid` (covariate scale).
pub fn fit_gauss_regression(model: &GaussRegressionModel, z: &[f64], x: &[f64], grid: &[f64]) -> Result<PosteriorEstimate> {
    model.validate()?;
    if z.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: z.len(), got: x.len() });
    }
    if let Some(v) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidData(format!("nonfinite response {v}")));
    }
    let mut rows: Vec<(f64, f64)> = to_unit(z, model.covariate_link, "covariate")?.into_iter().zip(x.iter().copied()).collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let unit_grid = to_unit(grid, model.covariate_link, "grid point")?;
    let (zs, xs): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    let xv = DVector::from_vec(xs);
    let support: Vec<(usize, f64)> = model.dim_prior.support().collect();
    let (bases, fits): (Vec<SplineBasis>, Vec<ConjugateFit>) = support
        .par_iter()
        .map(|&(j, _)| {
            let basis = SplineBasis::with_dim(model.order, j)?;
            let fit = conjugate_fit(&basis.design(&zs)?, &xv, model)?;
            Ok((basis, fit))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let dims: Vec<usize> = support.iter().map(|p| p.0).collect();
    let priors: Vec<f64> = support.iter().map(|p| p.1).collect();
    mix_curves(&dims, &priors, &fits, &bases, &unit_grid, grid)
}

/// Functional covariates reduced to `W_ik = ∫ Z_i(t) B_k(t) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalDesign {
    pub time_grid: Vec<f64>,
    pub weights: Vec<f64>,
    pub w: DMatrix<f64>,
    /// The time grid has fewer than `4J` points.
    pub coarse: bool,
}

fn trapezoid_weights(t: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; t.len()];
    for i in 1..t.len() {
        let h = 0.5 * (t[i] - t[i - 1]);
        w[i - 1] += h;
        w[i] += h;
    }
    w
}

pub fn build_functional_design(time_grid: &[f64], trajectories: &[Vec<f64>], basis: &SplineBasis) -> Result<FunctionalDesign> {
    if time_grid.len() < 2 {
        return Err(Error::InvalidData("time grid needs at least 2 points".into()));
    }
    if time_grid.windows(2).any(|w| !(w[0] < w[1])) || time_grid[0] < 0.0 || time_grid[time_grid.len() - 1] > 1.0 {
        return Err(Error::InvalidData("time grid must be strictly increasing inside [0, 1]".into()));
    }
    let weights = trapezoid_weights(time_grid);
    let j = basis.dim();
    let mut w = DMatrix::zeros(trajectories.len(), j);
    let rows = time_grid.iter().map(|&t| basis.eval(t)).collect::<Result<Vec<_>>>()?;
    for (i, traj) in trajectories.iter().enumerate() {
        if traj.len() != time_grid.len() {
            return Err(Error::DimensionMismatch { expected: time_grid.len(), got: traj.len() });
        }
        for ((row, &zt), &h) in rows.iter().zip(traj).zip(&weights) {
            for (k, b) in row.iter() {
                w[(i, k)] += h * zt * b;
            }
        }
    }
    Ok(FunctionalDesign { time_grid: time_grid.to_vec(), weights, w, coarse: time_grid.len() < 4 * j })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalFit {
    pub estimate: PosteriorEstimate,
    /// Some dimension's design came from a grid with fewer than `4J` points.
    pub coarse_grid: bool,
}

/// Posterior mean of the coefficient function `β(t)` on `grid`.
pub fn fit_functional(
    time_grid: &[f64],
    trajectories: &[Vec<f64>],
    responses: &[f64],
    model: &GaussRegressionModel,
    grid: &[f64],
) -> Result<FunctionalFit> {
    model.validate()?;
    if trajectories.len() != responses.len() {
        return Err(Error::DimensionMismatch { expected: trajectories.len(), got: responses.len() });
    }
    if let Some(v) = responses.iter().chain(trajectories.iter().flatten()).find(|v| !v.is_finite()) {
        return Err(Error::InvalidData(format!("nonfinite value {v}")));
    }
    let unit_grid = to_unit(grid, Link::Identity, "grid point")?;
    let xv = DVector::from_column_slice(responses);
    let support: Vec<(usize, f64)> = model.dim_prior.support().collect();
    let built = support
        .par_iter()
        .map(|&(j, _)| {
            let basis = SplineBasis::with_dim(model.order, j)?;
            let design = build_functional_design(time_grid, trajectories, &basis)?;
            let fit = conjugate_fit(&design.w, &xv, model)?;
            Ok((basis, fit, design.coarse))
        })
        .collect::<Result<Vec<_>>>()?;
    let coarse_grid = built.iter().any(|b| b.2);
    let (bases, fits): (Vec<_>, Vec<_>) = built.into_iter().map(|(b, f, _)| (b, f)).unzip();
    let dims: Vec<usize> = support.iter().map(|p| p.0).collect();
    let priors: Vec<f64> = support.iter().map(|p| p.1).collect();
    let estimate = mix_curves(&dims, &priors, &fits, &bases, &unit_grid, grid)?;
    Ok(FunctionalFit { estimate, coarse_grid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use statrs::function::gamma::gamma_lr;

    fn seq(x: &[f64], n: f64, tau2: f64, prior: &str) -> SequenceModel {
        SequenceModel { observations: x.to_vec(), n, tau2, dim_prior: prior.parse().unwrap() }
    }

    #[test]
    fn whitenoise_shrinkage_and_posterior() {
        let fit = fit_whitenoise(&seq(&[1.0, -2.0, 0.5], 1.0, 1.0, "fixed:3")).unwrap();
        assert_eq!(fit.coefficients, vec![0.5, -1.0, 0.25]);
        let tiny = fit_whitenoise(&seq(&[1.0, -2.0, 0.5], 1.0, 1e-12, "fixed:3")).unwrap();
        assert!(tiny.coefficients.iter().all(|c| c.abs() < 1e-11));

        // Uniform prior on {1, 2, 3}: direct products of normal densities.
        let x = [2.0, 0.1, 0.05];
        let fit = fit_whitenoise(&seq(&x, 4.0, 1.0, "uniform:1:3")).unwrap();
        let direct: Vec<f64> = (1..=3)
            .map(|j| {
                x.iter()
                    .enumerate()
                    .map(|(i, &xi)| {
                        let v = if i < j { 1.25 } else { 0.25 };
                        (-xi * xi / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt()
                    })
                    .product()
            })
            .collect();
        let total: f64 = direct.iter().sum();
        for ((_, p), d) in fit.dimension_posterior.iter().zip(&direct) {
            assert_abs_diff_eq!(*p, d / total, epsilon = 1e-12);
        }
        let mass: f64 = fit.dimension_posterior.iter().map(|p| p.1).sum();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn shrinkage_is_monotone_in_tau2() {
        let x = [1.5, -0.7, 0.3, 0.2];
        let mut last = vec![0.0f64; 4];
        for tau2 in [1e-3, 1e-2, 0.1, 1.0, 10.0] {
            let c = fit_whitenoise(&seq(&x, 4.0, tau2, "fixed:4")).unwrap().coefficients;
            for (a, b) in c.iter().zip(&last) {
                assert!(a.abs() >= b.abs());
            }
            last = c;
        }
    }

    #[test]
    fn whitenoise_rejects_bad_models() {
        assert!(fit_whitenoise(&seq(&[1.0], 1.0, 1.0, "fixed:2")).is_err());
        assert!(fit_whitenoise(&seq(&[1.0], 0.5, 1.0, "fixed:1")).is_err());
        assert!(fit_whitenoise(&seq(&[1.0], 1.0, 0.0, "fixed:1")).is_err());
    }

    #[test]
    fn incomplete_gamma_matches_library() {
        for (a, y) in [(0.5, 0.3), (1.0, 2.0), (2.5, 1.0), (3.0, 50.0), (12.0, 8.0), (60.0, 55.0), (0.1, 5.0)] {
            let got = ln_lower_gamma_quad(a, y).unwrap();
            let want = gamma_lr(a, y).ln() + ln_gamma(a);
            assert_abs_diff_eq!(got, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn sigma_floor_reduces_to_closed_form_when_loose() {
        let mut model = GaussRegressionModel::new(2, DimensionPrior::fixed(3).unwrap(), 2.0, 2.0, 1.0).unwrap();
        let basis = SplineBasis::with_dim(2, 3).unwrap();
        let z = [0.1, 0.4, 0.7, 0.9];
        let x = DVector::from_vec(vec![0.3, 0.9, 0.2, -0.1]);
        let d = basis.design(&z).unwrap();
        let open = conjugate_fit(&d, &x, &model).unwrap();
        model.sigma_min = Some(1e-4);
        let floored = conjugate_fit(&d, &x, &model).unwrap();
        assert_abs_diff_eq!(open.log_evidence, floored.log_evidence, epsilon = 1e-9);
        model.sigma_min = Some(2.0);
        assert!(conjugate_fit(&d, &x, &model).unwrap().log_evidence != open.log_evidence);
    }

    #[test]
    fn regression_examples() {
        let z: Vec<f64> = (0..40).map(|i| i as f64 / 39.0).collect();
        let model = GaussRegressionModel::new(2, DimensionPrior::fixed(6).unwrap(), 1e6, 1.0, 1.0).unwrap();
        let grid = crate::splinebasis::unit_grid(25);
        let est = fit_gauss_regression(&model, &z, &z, &grid).unwrap();
        for (g, m) in grid.iter().zip(&est.mean) {
            assert!((g - m).abs() < 1e-3);
        }
        let empty = fit_gauss_regression(&model, &[], &[], &grid).unwrap();
        assert!(empty.mean.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn vague_prior_approaches_least_squares() {
        let z: Vec<f64> = (0..30).map(|i| (i as f64 + 0.5) / 30.0).collect();
        let x: Vec<f64> = z.iter().map(|v| (5.0 * v).sin() + 0.1 * (17.0 * v).cos()).collect();
        let model = GaussRegressionModel::new(3, DimensionPrior::fixed(7).unwrap(), 1e8, 1.0, 1.0).unwrap();
        let grid = crate::splinebasis::unit_grid(50);
        let est = fit_gauss_regression(&model, &z, &x, &grid).unwrap();
        let basis = SplineBasis::with_dim(3, 7).unwrap();
        let ls = basis.least_squares(&z, &x).unwrap();
        for (g, m) in grid.iter().zip(&est.mean) {
            assert!((basis.combine(&ls, *g).unwrap() - m).abs() < 1e-4);
        }
    }

    #[test]
    fn row_order_does_not_matter() {
        let z = [0.9, 0.1, 0.5, 0.3];
        let x = [1.0, 0.2, -0.4, 0.8];
        let model = GaussRegressionModel::new(2, "geom:0.4:2:5".parse().unwrap(), 1.0, 1.0, 1.0).unwrap();
        let a = fit_gauss_regression(&model, &z, &x, &[0.2, 0.6]).unwrap();
        let b = fit_gauss_regression(&model, &[0.5, 0.3, 0.9, 0.1], &[-0.4, 0.8, 1.0, 0.2], &[0.2, 0.6]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn logistic_covariates() {
        let mut model = GaussRegressionModel::new(2, DimensionPrior::fixed(4).unwrap(), 10.0, 1.0, 1.0).unwrap();
        model.covariate_link = Link::Logistic { location: 0.0, scale: 2.0 };
        let z = [-5.0, -1.0, 0.0, 2.0, 7.0];
        let x = [0.0, 0.5, 1.0, 1.2, 2.0];
        let est = fit_gauss_regression(&model, &z, &x, &[-10.0, 0.0, 10.0]).unwrap();
        assert!(est.mean.iter().all(|v| v.is_finite()));
        assert!(fit_gauss_regression(&GaussRegressionModel { covariate_link: Link::Identity, ..model }, &z, &x, &[0.5]).is_err());
    }

    #[test]
    fn functional_design_examples() {
        let basis = SplineBasis::new(2, 4).unwrap();
        let t: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
        let d = build_functional_design(&t, &[vec![1.0; 41], vec![0.0; 41]], &basis).unwrap();
        for (k, want) in basis.integrals().iter().enumerate() {
            assert_abs_diff_eq!(d.w[(0, k)], *want, epsilon = 1e-14);
            assert_eq!(d.w[(1, k)], 0.0);
        }
        assert!(!d.coarse);
        let coarse = build_functional_design(&[0.0, 0.5, 1.0], &[vec![1.0; 3]], &basis).unwrap();
        assert!(coarse.coarse);
        assert!(build_functional_design(&[0.0, 0.5, 0.4], &[vec![1.0; 3]], &basis).is_err());
    }

    #[test]
    fn one_coefficient_functional_ridge() {
        let t: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let trajectories: Vec<Vec<f64>> = [0.5, 1.0, 2.0].iter().map(|c| t.iter().map(|s| c * (1.0 + s)).collect()).collect();
        let responses = [0.7, 1.4, 3.1];
        let tau2 = 0.8;
        let model = GaussRegressionModel::new(1, DimensionPrior::fixed(1).unwrap(), tau2, 1.0, 1.0).unwrap();
        let fit = fit_functional(&t, &trajectories, &responses, &model, &[0.3]).unwrap();
        // ∫(1 + s) ds = 3/2 exactly under the trapezoid rule.
        let w: Vec<f64> = [0.5, 1.0, 2.0].iter().map(|c| 1.5 * c).collect();
        let num: f64 = w.iter().zip(&responses).map(|(a, b)| a * b).sum();
        let den: f64 = w.iter().map(|a| a * a).sum::<f64>() + 1.0 / tau2;
        assert_abs_diff_eq!(fit.estimate.mean[0], num / den, epsilon = 1e-12);
    }
}
