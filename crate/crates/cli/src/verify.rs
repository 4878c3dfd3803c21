//! Cross-checks of the fast estimators against independent references.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use randseries::density::{fit_density, DensityModel};
use randseries::engine::Method;
use randseries::linmodel::{fit_gauss_regression, fit_whitenoise, GaussRegressionModel, SequenceModel};
use randseries::oracle::{brute_mixture, brute_posterior, naive_basis, quad_integrate, reference_periodogram, BruteModel};
use randseries::regression::{fit_binary, fit_poisson, BinaryModel, PoissonModel};
use randseries::spectral::{fit_inverse_spectral, periodogram, PeriodogramData, SpectralModel};
use randseries::{CoefFamily, DimensionPrior, SplineBasis};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type Outcome = randseries::Result<(bool, String)>;
type Job = (String, Box<dyn Fn() -> Outcome + Send + Sync>);

fn job(name: impl Into<String>, f: impl Fn() -> Outcome + Send + Sync + 'static) -> Job {
    (name.into(), Box::new(f))
}

fn run(jobs: Vec<Job>) -> Vec<Check> {
    jobs.into_par_iter()
        .map(|(name, f)| match f() {
            Ok((passed, detail)) => Check { name, passed, detail },
            Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
        })
        .collect()
}

/// Largest deviation, relative to `max(|want|, floor)`.
fn worst(pairs: impl IntoIterator<Item = (f64, f64)>, floor: f64) -> f64 {
    pairs.into_iter().map(|(g, w)| (g - w).abs() / w.abs().max(floor)).fold(0.0, f64::max)
}

fn within(err: f64, tol: f64) -> (bool, String) {
    (err <= tol, format!("max error {err:.3e} (tolerance {tol:.0e})"))
}

const ORACLE_TOL: f64 = 1e-3;
const POINTS: [f64; 3] = [0.05, 0.5, 0.93];

/// Fast basis evaluation against the textbook recursion, and the closed-form
/// integrals against quadrature.
pub fn basis_checks(points: usize, max_intervals: usize) -> Vec<Check> {
    let mut jobs = Vec::new();
    for q in 1..=4 {
        jobs.push(job(format!("basis q={q} against naive recursion"), move || {
            let mut err: f64 = 0.0;
            for k in 1..=max_intervals {
                let b = SplineBasis::new(q, k)?;
                for i in 0..points {
                    let x = i as f64 / (points - 1) as f64;
                    let fast = b.eval_dense(x)?;
                    let slow = naive_basis(q, k, x);
                    let sum: f64 = fast.iter().sum();
                    err = err.max((sum - 1.0).abs());
                    for (f, s) in fast.iter().zip(&slow) {
                        if *f < 0.0 {
                            return Ok((false, format!("negative value {f} at K={k}, x={x}")));
                        }
                        err = err.max((f - s).abs());
                    }
                }
            }
            Ok(within(err, 1e-12))
        }));
        jobs.push(job(format!("basis q={q} integrals against quadrature"), move || {
            let mut err: f64 = 0.0;
            for k in 1..=max_intervals {
                let b = SplineBasis::new(q, k)?;
                for (i, want) in b.integrals().iter().enumerate() {
                    // Integrate piecewise so each panel is polynomial.
                    let knots = b.knots();
                    let mut got = 0.0;
                    for w in knots.windows(2).filter(|w| w[1] > w[0]) {
                        got += quad_integrate(|x| b.eval_dense(x).map_or(f64::NAN, |v| v[i]), w[0], w[1], 1e-14)?;
                    }
                    err = err.max((got - want).abs());
                }
            }
            Ok(within(err, 1e-10))
        }));
    }
    run(jobs)
}

pub fn periodogram_check() -> Vec<Check> {
    run(vec![job("periodogram against direct definition", || {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let mut err: f64 = 0.0;
        for n in [2usize, 7, 64, 101] {
            let series: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let fast = periodogram(&series)?;
            err = err.max(worst(fast.ordinates.iter().copied().zip(reference_periodogram(&series)), 1.0));
        }
        Ok(within(err, 1e-10))
    })])
}

/// Degenerate configurations with textbook conjugate answers.
pub fn collapse_checks() -> Vec<Check> {
    let tol = 1e-10;
    run(vec![
        job("density histogram collapse", move || {
            let data = [0.05, 0.1, 0.4, 0.41, 0.9];
            let mut err: f64 = 0.0;
            for (j, alpha) in [(1usize, 1.0), (3, 1.0), (5, 0.5), (8, 2.0)] {
                let model = DensityModel::new(1, DimensionPrior::fixed(j)?, CoefFamily::Dirichlet { alpha })?;
                let grid = [0.01, 0.33, 0.45, 0.77, 0.99];
                let est = fit_density(&data, &model, &grid, Method::Exact)?;
                let bin = |v: f64| ((v * j as f64).floor() as usize).min(j - 1);
                for (&x, &got) in grid.iter().zip(&est.mean) {
                    let count = data.iter().filter(|&&d| bin(d) == bin(x)).count() as f64;
                    let want = j as f64 * (alpha + count) / (j as f64 * alpha + data.len() as f64);
                    err = err.max((got - want).abs());
                }
            }
            Ok(within(err, tol))
        }),
        job("spectral gamma collapse", move || {
            let mut err: f64 = 0.0;
            for (a, b, u) in [(1.0, 1.0, 0.3), (2.0, 0.5, 1.7), (0.7, 3.0, 4.2)] {
                let model = SpectralModel::new(1, DimensionPrior::fixed(1)?, CoefFamily::Gamma { shape: a, rate: b })?;
                let pgram = PeriodogramData { n: 2, mean: 0.0, frequencies: vec![1.0], ordinates: vec![u] };
                let est = fit_inverse_spectral(&pgram, &model, &POINTS, Method::Exact)?;
                err = err.max(worst(est.mean.iter().map(|&g| (g, (a + 1.0) / (b + u))), 1.0));
            }
            Ok(within(err, tol))
        }),
        job("binary beta collapse", move || {
            let mut err: f64 = 0.0;
            let z = [0.1, 0.3, 0.5, 0.8];
            for (a, b, x) in [(1.0, 1.0, [1u8, 0, 1, 1]), (2.0, 3.0, [0, 0, 0, 1]), (0.5, 0.5, [1, 1, 1, 1])] {
                let model = BinaryModel::new(1, DimensionPrior::fixed(1)?, CoefFamily::Beta { a, b })?;
                let est = fit_binary(&z, &x, &model, &POINTS, Method::Exact)?;
                let s = x.iter().map(|&v| f64::from(v)).sum::<f64>();
                err = err.max(worst(est.mean.iter().map(|&g| (g, (a + s) / (a + b + z.len() as f64))), 1.0));
            }
            Ok(within(err, tol))
        }),
        job("poisson gamma collapse", move || {
            let mut err: f64 = 0.0;
            let z = [0.2, 0.6, 0.9];
            for (a, b, x) in [(1.0, 1.0, [2u32, 0, 3]), (2.5, 0.5, [1, 1, 1]), (0.3, 2.0, [0, 0, 4])] {
                let model = PoissonModel::new(1, DimensionPrior::fixed(1)?, CoefFamily::Gamma { shape: a, rate: b })?;
                let est = fit_poisson(&z, &x, &model, &POINTS, Method::Exact)?;
                let s = x.iter().map(|&v| f64::from(v)).sum::<f64>();
                err = err.max(worst(est.mean.iter().map(|&g| (g, (a + s) / (b + z.len() as f64))), 1.0));
            }
            Ok(within(err, tol))
        }),
        job("white noise shrinkage", || {
            let mut err: f64 = 0.0;
            for (n, tau2) in [(10.0, 1.0), (100.0, 0.05), (3.0, 7.0)] {
                let x = vec![0.8, -0.3, 0.1, 1.2];
                let model = SequenceModel { observations: x.clone(), n, tau2, dim_prior: DimensionPrior::fixed(4)? };
                let fit = fit_whitenoise(&model)?;
                err = err.max(worst(fit.coefficients.iter().zip(&x).map(|(&g, &xi)| (g, n * tau2 * xi / (n * tau2 + 1.0))), 1.0));
            }
            Ok(within(err, 1e-12))
        }),
    ])
}

fn brute_job(name: String, brute: BruteModel, j: usize, fast: impl Fn() -> randseries::Result<Vec<f64>> + Send + Sync + 'static) -> Job {
    job(name, move || {
        let got = fast()?;
        let want = POINTS.iter().map(|&x| brute_posterior(&brute, j, x).map(|r| r.mean)).collect::<randseries::Result<Vec<_>>>()?;
        Ok(within(worst(got.into_iter().zip(want), 1e-12), ORACLE_TOL))
    })
}

/// Exact posterior means against brute-force quadrature over the coefficients.
pub fn oracle_checks() -> Vec<Check> {
    let mut jobs = Vec::new();
    let density: [(usize, usize, f64, &[f64]); 4] = [
        (1, 2, 1.0, &[0.2]),
        (2, 3, 1.0, &[0.1, 0.4, 0.45]),
        (3, 3, 0.7, &[0.8, 0.9]),
        (2, 2, 2.5, &[0.3, 0.35, 0.9]),
    ];
    for (q, j, alpha, data) in density {
        let data = data.to_vec();
        let brute = BruteModel::Density { order: q, alpha, data: data.clone() };
        jobs.push(brute_job(format!("density q={q} j={j} alpha={alpha}"), brute, j, move || {
            let model = DensityModel::new(q, DimensionPrior::fixed(j)?, CoefFamily::Dirichlet { alpha })?;
            Ok(fit_density(&data, &model, &POINTS, Method::Exact)?.mean)
        }));
    }
    let binary: [(usize, usize, f64, f64, &[f64], &[u8]); 3] = [
        (1, 1, 1.0, 1.0, &[0.1, 0.5, 0.9], &[1, 0, 1]),
        (2, 2, 1.0, 1.0, &[0.2, 0.5, 0.8], &[1, 0, 0]),
        (2, 3, 2.0, 1.5, &[0.1, 0.6, 0.7], &[0, 1, 1]),
    ];
    for (q, j, a, b, z, x) in binary {
        let (z, x) = (z.to_vec(), x.to_vec());
        let brute = BruteModel::Binary { order: q, a, b, z: z.clone(), x: x.clone() };
        jobs.push(brute_job(format!("binary q={q} j={j} beta({a},{b})"), brute, j, move || {
            let model = BinaryModel::new(q, DimensionPrior::fixed(j)?, CoefFamily::Beta { a, b })?;
            Ok(fit_binary(&z, &x, &model, &POINTS, Method::Exact)?.mean)
        }));
    }
    let poisson: [(usize, usize, f64, f64, &[f64], &[u32]); 3] = [
        (2, 3, 1.0, 1.0, &[0.3, 0.8], &[2, 1]),
        (1, 2, 2.0, 0.5, &[0.2, 0.7, 0.9], &[0, 3, 1]),
        (3, 3, 1.5, 1.0, &[0.5], &[2]),
    ];
    for (q, j, shape, rate, z, x) in poisson {
        let (z, x) = (z.to_vec(), x.to_vec());
        let brute = BruteModel::Poisson { order: q, shape, rate, z: z.clone(), x: x.clone() };
        jobs.push(brute_job(format!("poisson q={q} j={j} gamma({shape},{rate})"), brute, j, move || {
            let model = PoissonModel::new(q, DimensionPrior::fixed(j)?, CoefFamily::Gamma { shape, rate })?;
            Ok(fit_poisson(&z, &x, &model, &POINTS, Method::Exact)?.mean)
        }));
    }
    let spectral: [(usize, usize, f64, f64, &[f64], &[f64]); 3] = [
        (1, 1, 2.0, 1.0, &[1.0], &[0.7]),
        (2, 2, 1.0, 1.0, &[0.5, 1.0], &[0.3, 1.1]),
        (2, 3, 1.5, 0.5, &[1.0 / 3.0, 2.0 / 3.0, 1.0], &[0.2, 0.9, 0.4]),
    ];
    for (q, j, shape, rate, w, u) in spectral {
        let (w, u) = (w.to_vec(), u.to_vec());
        let brute = BruteModel::Spectral { order: q, shape, rate, frequencies: w.clone(), ordinates: u.clone() };
        jobs.push(brute_job(format!("spectral q={q} j={j} gamma({shape},{rate})"), brute, j, move || {
            let model = SpectralModel::new(q, DimensionPrior::fixed(j)?, CoefFamily::Gamma { shape, rate })?;
            let pgram = PeriodogramData { n: 2 * w.len(), mean: 0.0, frequencies: w.clone(), ordinates: u.clone() };
            Ok(fit_inverse_spectral(&pgram, &model, &POINTS, Method::Exact)?.mean)
        }));
    }
    let (gz, gx) = (vec![0.1, 0.55, 0.9], vec![0.4, 1.1, 0.2]);
    for (j, tau2, sigma_min) in [(2usize, 1.0, None), (2, 4.0, Some(0.3)), (3, 2.0, None)] {
        let (z, x) = (gz.clone(), gx.clone());
        let brute = BruteModel::Gauss { order: 2, tau2, alpha0: 2.0, beta0: 1.0, sigma_min, z: z.clone(), x: x.clone() };
        jobs.push(brute_job(format!("gauss regression j={j} tau2={tau2} sigma_min={sigma_min:?}"), brute, j, move || {
            let mut model = GaussRegressionModel::new(2, DimensionPrior::fixed(j)?, tau2, 2.0, 1.0)?;
            model.sigma_min = sigma_min;
            Ok(fit_gauss_regression(&model, &z, &x, &POINTS)?.mean)
        }));
    }
    jobs.push(job("density mixture over j in 2..=3", || {
        let data = [0.31, 0.33, 0.35, 0.36, 0.38, 0.4, 0.72, 0.75];
        let prior: DimensionPrior = "geom:0.3:2:3".parse()?;
        let model = DensityModel::new(2, prior.clone(), CoefFamily::Dirichlet { alpha: 1.0 })?;
        let est = fit_density(&data, &model, &[0.35], Method::Exact)?;
        let brute = BruteModel::Density { order: 2, alpha: 1.0, data: data.to_vec() };
        let support: Vec<(usize, f64)> = prior.support().collect();
        let (mean, weights) = brute_mixture(&brute, &support, 0.35)?;
        let err = worst(std::iter::once((est.mean[0], mean)), 1e-12);
        let werr = worst(est.dimension_posterior.iter().zip(&weights).map(|(a, b)| (a.1, b.1)), 1.0);
        Ok(within(err.max(werr), ORACLE_TOL))
    }));
    jobs.push(job("gauss regression mixture over j in 2..=3", move || {
        let prior: DimensionPrior = "uniform:2:3".parse()?;
        let model = GaussRegressionModel::new(2, prior.clone(), 1.0, 2.0, 1.0)?;
        let est = fit_gauss_regression(&model, &gz, &gx, &[0.5])?;
        let brute = BruteModel::Gauss { order: 2, tau2: 1.0, alpha0: 2.0, beta0: 1.0, sigma_min: None, z: gz.clone(), x: gx.clone() };
        let support: Vec<(usize, f64)> = prior.support().collect();
        let (mean, weights) = brute_mixture(&brute, &support, 0.5)?;
        let err = worst(std::iter::once((est.mean[0], mean)), 1e-12);
        let werr = worst(est.dimension_posterior.iter().zip(&weights).map(|(a, b)| (a.1, b.1)), 1.0);
        Ok(within(err.max(werr), ORACLE_TOL))
    }));
    run(jobs)
}

/// Everything the `verify` subcommand runs.
pub fn all_checks() -> Vec<Check> {
    let mut checks = basis_checks(201, 12);
    checks.extend(periodogram_check());
    checks.extend(collapse_checks());
    checks.extend(oracle_checks());
    checks
}
