//! Slow, independent reference computations used to check the fast paths:
//! adaptive quadrature, a recursive B-spline evaluator, a literal periodogram,
//! brute-force posterior integration over `θ` for tiny models, and empirical
//! approximation rates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{ln_beta, ln_gamma};
use crate::splinebasis::SplineBasis;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_SUBDIVISIONS: usize = 4000;

struct Piece<const M: usize> {
    a: f64,
    b: f64,
    value: [f64; M],
    error: f64,
}

fn kronrod<const M: usize>(f: &impl Fn(f64) -> [f64; M], a: f64, b: f64) -> Result<Piece<M>> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = [0.0; M];
    let mut g = [0.0; M];
    let mut add = |x: f64, wk: f64, wg: f64| -> Result<()> {
        let v = f(x);
        for m in 0..M {
            if !v[m].is_finite() {
                return Err(Error::Quadrature(format!("integrand is not finite at {x}")));
            }
            k[m] += wk * v[m];
            g[m] += wg * v[m];
        }
        Ok(())
    };
    for i in 0..7 {
        let wg = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        add(c - h * XGK[i], WGK[i], wg)?;
        add(c + h * XGK[i], WGK[i], wg)?;
    }
    add(c, WGK[7], WG[3])?;
    let mut value = [0.0; M];
    let mut error = 0.0;
    for m in 0..M {
        value[m] = k[m] * h;
        error += ((k[m] - g[m]) * h).abs();
    }
    Ok(Piece { a, b, value, error })
}

/// Globally adaptive Gauss–Kronrod (7, 15) quadrature of a vector integrand;
/// `tol` bounds the summed absolute error estimate.
pub fn quad_integrate_vec<const M: usize>(f: impl Fn(f64) -> [f64; M], a: f64, b: f64, tol: f64) -> Result<[f64; M]> {
    if !(tol > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::param("quadrature", "need finite limits and a positive tolerance"));
    }
    if a == b {
        return Ok([0.0; M]);
    }
    let mut pieces = vec![kronrod(&f, a, b)?];
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.error).sum();
        if total_err <= tol {
            break;
        }
        if pieces.len() >= MAX_SUBDIVISIONS {
            return Err(Error::Quadrature(format!(
                "no convergence after {MAX_SUBDIVISIONS} subdivisions (error estimate {total_err:e}, target {tol:e})"
            )));
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return Err(Error::Quadrature("interval can no longer be split".into()));
        }
        pieces.push(kronrod(&f, p.a, mid)?);
        pieces.push(kronrod(&f, mid, p.b)?);
    }
    let mut out = [0.0; M];
    for p in &pieces {
        for (o, v) in out.iter_mut().zip(&p.value) {
            *o += v;
        }
    }
    Ok(out)
}

/// `∫_a^b f` to absolute error `tol`.
pub fn quad_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    Ok(quad_integrate_vec(|x| [f(x)], a, b, tol)?[0])
}

/// Clamped uniform knots for order `q` with `intervals` pieces.
pub fn clamped_knots(q: usize, intervals: usize) -> Vec<f64> {
    let mut t = vec![0.0; q];
    t.extend((1..intervals).map(|i| i as f64 / intervals as f64));
    t.extend(std::iter::repeat_n(1.0, q));
    t
}

/// Textbook Cox–de Boor recursion for `B_{i,q}` with `0/0 = 0`; the right end
/// of the domain belongs to the last nonempty interval.
pub fn naive_bspline(knots: &[f64], i: usize, q: usize, x: f64) -> f64 {
    if q == 1 {
        let last = knots[knots.len() - 1];
        let inside = knots[i] <= x && x < knots[i + 1];
        let right_end = x == last && knots[i] < knots[i + 1] && knots[i + 1] == last;
        return if inside || right_end { 1.0 } else { 0.0 };
    }
    let mut v = 0.0;
    let d1 = knots[i + q - 1] - knots[i];
    if d1 > 0.0 {
        v += (x - knots[i]) / d1 * naive_bspline(knots, i, q - 1, x);
    }
    let d2 = knots[i + q] - knots[i + 1];
    if d2 > 0.0 {
        v += (knots[i + q] - x) / d2 * naive_bspline(knots, i + 1, q - 1, x);
    }
    v
}

/// All `q + K − 1` basis values at `x` by the naive recursion.
pub fn naive_basis(q: usize, intervals: usize, x: f64) -> Vec<f64> {
    let knots = clamped_knots(q, intervals);
    (0..q + intervals - 1).map(|i| naive_bspline(&knots, i, q, x)).collect()
}

/// `I(λ_j) = |Σ_t (X_t − X̄) e^{−itπλ_j}|² / (2πn)` for `λ_j = 2j/n`, by the
/// literal double loop.
pub fn reference_periodogram(series: &[f64]) -> Vec<f64> {
    let n = series.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    (1..=n / 2)
        .map(|j| {
            let lambda = 2.0 * j as f64 / n as f64;
            let (mut re, mut im) = (0.0, 0.0);
            for t in 1..=n {
                let arg = t as f64 * std::f64::consts::PI * lambda;
                re += (series[t - 1] - mean) * arg.cos();
                im -= (series[t - 1] - mean) * arg.sin();
            }
            (re * re + im * im) / (2.0 * std::f64::consts::PI * n as f64)
        })
        .collect()
}

/// Tiny models for brute-force integration over `θ`.
#[derive(Debug, Clone, PartialEq)]
pub enum BruteModel {
    /// `f = Σ θ_k B_k / ∫B_k`, `θ ~ Dirichlet(α, …, α)`.
    Density { order: usize, alpha: f64, data: Vec<f64> },
    /// `P(X = 1 | z) = θᵀB(z)`, `θ_k ~ Beta(a, b)`.
    Binary { order: usize, a: f64, b: f64, z: Vec<f64>, x: Vec<u8> },
    /// `X | z ~ Poisson(θᵀB(z))`, `θ_k ~ Gamma(shape, rate)`.
    Poisson { order: usize, shape: f64, rate: f64, z: Vec<f64>, x: Vec<u32> },
    /// `U_s ~ Exp(mean f(ω_s))`, `1/f = θᵀB`, `θ_k ~ Gamma(shape, rate)`.
    Spectral { order: usize, shape: f64, rate: f64, frequencies: Vec<f64>, ordinates: Vec<f64> },
    /// `X = θᵀB(z) + σε`, `θ | σ² ~ N(0, σ²τ²I)`, `σ^{-2} ~ Gamma(α₀, β₀)`,
    /// optionally with `σ ≥ σ_min`.
    Gauss { order: usize, tau2: f64, alpha0: f64, beta0: f64, sigma_min: Option<f64>, z: Vec<f64>, x: Vec<f64> },
}

pub const BRUTE_MAX_DIM: usize = 3;
pub const BRUTE_MAX_OBS: usize = 8;

/// Absolute tolerance per nested axis; the integrand peaks near one.
fn brute_tol(box_dim: usize) -> f64 {
    if box_dim >= 4 {
        1e-6
    } else {
        1e-8
    }
}

fn ln_gamma_pdf(x: f64, shape: f64, rate: f64) -> f64 {
    shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * x.ln() - rate * x
}

fn ln_beta_pdf(x: f64, a: f64, b: f64) -> f64 {
    (a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_beta(a, b)
}

struct Setup {
    order: usize,
    intervals: usize,
    /// Number of box coordinates.
    box_dim: usize,
    /// Basis rows at the observation locations, in data order.
    rows: Vec<Vec<f64>>,
}

impl BruteModel {
    fn order(&self) -> usize {
        match self {
            BruteModel::Density { order, .. }
            | BruteModel::Binary { order, .. }
            | BruteModel::Poisson { order, .. }
            | BruteModel::Spectral { order, .. }
            | BruteModel::Gauss { order, .. } => *order,
        }
    }

    fn observations(&self) -> usize {
        match self {
            BruteModel::Density { data, .. } => data.len(),
            BruteModel::Binary { z, .. } | BruteModel::Poisson { z, .. } | BruteModel::Gauss { z, .. } => z.len(),
            BruteModel::Spectral { frequencies, .. } => frequencies.len(),
        }
    }

    fn setup(&self, j: usize) -> Result<Setup> {
        let order = self.order();
        if j > BRUTE_MAX_DIM || self.observations() > BRUTE_MAX_OBS {
            return Err(Error::param(
                "brute posterior",
                format!("limited to j <= {BRUTE_MAX_DIM} and n <= {BRUTE_MAX_OBS}"),
            ));
        }
        if order == 0 || j < order {
            return Err(Error::param("brute posterior", format!("dimension {j} is below the order {order}")));
        }
        let box_dim = match self {
            BruteModel::Density { .. } => j - 1,
            BruteModel::Gauss { .. } => j + 1,
            _ => j,
        };
        let mut setup = Setup { order, intervals: j + 1 - order, box_dim, rows: Vec::new() };
        let locations: &[f64] = match self {
            BruteModel::Density { data, .. } => data,
            BruteModel::Binary { z, .. } | BruteModel::Poisson { z, .. } | BruteModel::Gauss { z, .. } => z,
            BruteModel::Spectral { frequencies, .. } => frequencies,
        };
        setup.rows = locations.iter().map(|&x| self.basis_at(&setup, x)).collect();
        Ok(setup)
    }

    /// Basis of the modeled function at `x` (scaled for densities).
    fn basis_at(&self, s: &Setup, x: f64) -> Vec<f64> {
        let mut b = naive_basis(s.order, s.intervals, x);
        if let BruteModel::Density { .. } = self {
            let knots = clamped_knots(s.order, s.intervals);
            for (i, v) in b.iter_mut().enumerate() {
                *v /= (knots[i + s.order] - knots[i]) / s.order as f64;
            }
        }
        b
    }

    /// Maps a box point to `(θ, extra, ln prior density in box coordinates)`;
    /// `extra` is the precision for Gauss models.
    fn map(&self, u: &[f64], j: usize) -> (Vec<f64>, f64, f64) {
        match self {
            BruteModel::Density { alpha, .. } => {
                let mut theta = Vec::with_capacity(j);
                let mut rest = 1.0;
                let mut lw = 0.0;
                for (i, &ui) in u.iter().enumerate() {
                    lw += ln_beta_pdf(ui, *alpha, (j - 1 - i) as f64 * alpha);
                    theta.push(rest * ui);
                    rest *= 1.0 - ui;
                }
                theta.push(rest);
                (theta, 0.0, lw)
            }
            BruteModel::Binary { a, b, .. } => {
                let lw = u.iter().map(|&t| ln_beta_pdf(t, *a, *b)).sum();
                (u.to_vec(), 0.0, lw)
            }
            BruteModel::Poisson { shape, rate, .. } | BruteModel::Spectral { shape, rate, .. } => {
                let mut lw = 0.0;
                let theta = u
                    .iter()
                    .map(|&t| {
                        let th = t / (1.0 - t);
                        lw += ln_gamma_pdf(th, *shape, *rate) - 2.0 * (1.0 - t).ln();
                        th
                    })
                    .collect();
                (theta, 0.0, lw)
            }
            BruteModel::Gauss { tau2, alpha0, beta0, sigma_min, .. } => {
                let (lambda, mut lw) = match sigma_min {
                    None => {
                        let l = u[0] / (1.0 - u[0]);
                        (l, ln_gamma_pdf(l, *alpha0, *beta0) - 2.0 * (1.0 - u[0]).ln())
                    }
                    Some(s) => {
                        let cap = 1.0 / (s * s);
                        let l = cap * u[0];
                        (l, ln_gamma_pdf(l, *alpha0, *beta0) + cap.ln())
                    }
                };
                let sd = (tau2 / lambda).sqrt();
                let theta = u[1..]
                    .iter()
                    .map(|&t| {
                        let arg = std::f64::consts::PI * (t - 0.5);
                        let th = sd * arg.tan();
                        let z = th / sd;
                        lw += -0.5 * z * z - 0.5 * (2.0 * std::f64::consts::PI).ln() + std::f64::consts::PI.ln()
                            - 2.0 * arg.cos().ln();
                        th
                    })
                    .collect();
                (theta, lambda, lw)
            }
        }
    }

    fn log_likelihood(&self, s: &Setup, theta: &[f64], lambda: f64) -> f64 {
        let fitted = s.rows.iter().map(|row| row.iter().zip(theta).map(|(b, t)| b * t).sum::<f64>());
        match self {
            BruteModel::Density { .. } => fitted.map(f64::ln).sum(),
            BruteModel::Binary { x, .. } => fitted
                .zip(x)
                .map(|(f, &xi)| if xi == 1 { f.ln() } else { (1.0 - f).ln() })
                .sum(),
            BruteModel::Poisson { x, .. } => fitted
                .zip(x)
                .map(|(f, &xi)| f64::from(xi) * f.ln() - f - ln_gamma(f64::from(xi) + 1.0))
                .sum(),
            BruteModel::Spectral { ordinates, .. } => fitted.zip(ordinates).map(|(g, &u)| g.ln() - u * g).sum(),
            BruteModel::Gauss { x, .. } => fitted
                .zip(x)
                .map(|(f, &xi)| {
                    let r = xi - f;
                    0.5 * (lambda / (2.0 * std::f64::consts::PI)).ln() - 0.5 * lambda * r * r
                })
                .sum(),
        }
    }

    fn log_prior_mass(&self) -> Result<f64> {
        match self {
            BruteModel::Gauss { alpha0, beta0, sigma_min: Some(s), .. } => {
                let cap = 1.0 / (s * s);
                let mass = quad_integrate(|l| ln_gamma_pdf(l, *alpha0, *beta0).exp(), 0.0, cap, 1e-13)?;
                Ok(mass.ln())
            }
            _ => Ok(0.0),
        }
    }
}

fn nested<const M: usize>(dim: usize, prefix: &mut Vec<f64>, f: &dyn Fn(&[f64]) -> [f64; M]) -> Result<[f64; M]> {
    if prefix.len() == dim {
        return Ok(f(prefix));
    }
    let cell = std::cell::RefCell::new((prefix.clone(), None::<Error>));
    // u = s²(3 − 2s) flattens power-law behavior at both ends of each axis.
    let out = quad_integrate_vec(
        |s| {
            let u = s * s * (3.0 - 2.0 * s);
            let jac = 6.0 * s * (1.0 - s);
            let mut guard = cell.borrow_mut();
            guard.0.push(u);
            let r = nested(dim, &mut guard.0, f);
            guard.0.pop();
            match r {
                Ok(v) => v.map(|c| c * jac),
                Err(e) => {
                    guard.1 = Some(e);
                    [f64::NAN; M]
                }
            }
        },
        0.0,
        1.0,
        brute_tol(dim),
    );
    if let Some(e) = cell.into_inner().1 {
        return Err(e);
    }
    out
}

/// Posterior expectation `E[g(θ) | data]` at fixed dimension `j`, together
/// with the log marginal likelihood, by tensorized adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BruteResult {
    pub mean: f64,
    pub log_evidence: f64,
}

pub fn brute_expectation(model: &BruteModel, j: usize, g: &dyn Fn(&[f64]) -> f64) -> Result<BruteResult> {
    let s = model.setup(j)?;
    // Shift the log likelihood by its maximum over a coarse grid.
    let coarse: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
    let mut shift = f64::NEG_INFINITY;
    let mut idx = vec![0usize; s.box_dim];
    loop {
        let u: Vec<f64> = idx.iter().map(|&i| coarse[i]).collect();
        let (theta, lambda, _) = model.map(&u, j);
        shift = shift.max(model.log_likelihood(&s, &theta, lambda));
        let mut d = 0;
        while d < s.box_dim {
            idx[d] += 1;
            if idx[d] < coarse.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == s.box_dim {
            break;
        }
    }
    if !shift.is_finite() {
        shift = 0.0;
    }
    let integrand = |u: &[f64]| -> [f64; 2] {
        let (theta, lambda, lw) = model.map(u, j);
        let w = (model.log_likelihood(&s, &theta, lambda) - shift + lw).exp();
        if w == 0.0 || !w.is_finite() {
            return [0.0, 0.0];
        }
        [g(&theta) * w, w]
    };
    let [num, den] = nested(s.box_dim, &mut Vec::new(), &integrand)?;
    if !(den > 0.0) {
        return Err(Error::Quadrature("posterior normalizer vanished".into()));
    }
    Ok(BruteResult { mean: num / den, log_evidence: den.ln() + shift - model.log_prior_mass()? })
}

/// Posterior mean of the modeled function at `x` for fixed dimension `j`.
pub fn brute_posterior(model: &BruteModel, j: usize, x: f64) -> Result<BruteResult> {
    let s = model.setup(j)?;
    let b = model.basis_at(&s, x);
    brute_expectation(model, j, &|theta: &[f64]| b.iter().zip(theta).map(|(u, v)| u * v).sum())
}

/// Posterior mean mixed over `(j, ln π(j))` pairs, with the posterior weights.
pub fn brute_mixture(model: &BruteModel, prior: &[(usize, f64)], x: f64) -> Result<(f64, Vec<(usize, f64)>)> {
    let fits = prior.iter().map(|&(j, _)| brute_posterior(model, j, x)).collect::<Result<Vec<_>>>()?;
    let logs: Vec<f64> = fits.iter().zip(prior).map(|(f, p)| f.log_evidence + p.1).collect();
    let norm = crate::numeric::log_sum_exp(&logs);
    let weights: Vec<(usize, f64)> = prior.iter().zip(&logs).map(|(p, l)| (p.0, (l - norm).exp())).collect();
    let mean = fits.iter().zip(&weights).map(|(f, w)| f.mean * w.1).sum();
    Ok((mean, weights))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    Sup,
    L2,
}

pub struct RateCheckConfig<F: Fn(f64) -> f64> {
    pub target: F,
    /// Smoothness of the target.
    pub alpha: f64,
    pub order: usize,
    pub ladder: Vec<usize>,
    pub norm: Norm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCheck {
    pub slope: f64,
    /// `(J, error)` pairs used in the fit.
    pub points: Vec<(usize, f64)>,
    /// Dimensions whose error sat at the machine floor.
    pub excluded: Vec<usize>,
}

const RATE_GRID: usize = 10_000;
const ERROR_FLOOR: f64 = 1e-13;

/// Least-squares approximation error on each ladder dimension, and the
/// slope of `ln error` against `ln J`.
pub fn approx_rate_slope<F: Fn(f64) -> f64>(config: &RateCheckConfig<F>) -> Result<RateCheck> {
    if !(config.alpha > 0.0 && config.alpha <= config.order as f64) {
        return Err(Error::param("alpha", "smoothness must lie in (0, q]"));
    }
    if config.ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("ladder", "dimensions must be strictly increasing"));
    }
    let grid = crate::splinebasis::unit_grid(RATE_GRID);
    let truth: Vec<f64> = grid.iter().map(|&x| (config.target)(x)).collect();
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for &j in &config.ladder {
        let basis = SplineBasis::with_dim(config.order, j)?;
        let coefs = basis.least_squares(&grid, &truth)?;
        let mut sup: f64 = 0.0;
        let mut ss = 0.0;
        for (&x, &t) in grid.iter().zip(&truth) {
            let e = (basis.combine(&coefs, x)? - t).abs();
            sup = sup.max(e);
            ss += e * e;
        }
        let err = match config.norm {
            Norm::Sup => sup,
            Norm::L2 => (ss / RATE_GRID as f64).sqrt(),
        };
        if err < ERROR_FLOOR {
            excluded.push(j);
        } else {
            points.push((j, err));
        }
    }
    if points.len() < 3 {
        return Err(Error::InvalidData(format!(
            "only {} ladder dimensions have errors above the {ERROR_FLOOR:e} floor; need 3",
            points.len()
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(RateCheck { slope: sxy / sxx, points, excluded })
}
