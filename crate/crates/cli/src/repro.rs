//! Simulation study: density estimation for a truncated exponential/normal
//! mixture with 50 observations.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use randseries::density::{fit_density, DensityModel};
use randseries::engine::{Method, Proposal};
use randseries::oracle::quad_integrate;
use randseries::splinebasis::unit_grid;
use randseries::{CoefFamily, DimensionPrior, PosteriorEstimate};

const DATA_STREAM: u64 = 1 << 40;

/// Unnormalized mixture `0.75 · 3e^{-3x} + 0.25 · N(0.75, 1/64)`.
fn mixture_raw(x: f64) -> f64 {
    0.75 * 3.0 * (-3.0 * x).exp() + 0.25 * (32.0 / PI).sqrt() * (-32.0 * (x - 0.75).powi(2)).exp()
}

/// The mixture restricted to [0, 1] and renormalized.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedMixture {
    norm: f64,
}

impl TruncatedMixture {
    pub fn new() -> Self {
        let norm = quad_integrate(mixture_raw, 0.0, 1.0, 1e-13).expect("smooth integrand");
        Self { norm }
    }

    pub fn density(&self, x: f64) -> f64 {
        if (0.0..=1.0).contains(&x) {
            mixture_raw(x) / self.norm
        } else {
            0.0
        }
    }

    /// Rejection sampling from a uniform proposal.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        // Sum of the component maxima bounds the raw mixture.
        let envelope = 0.75 * 3.0 + 0.25 * (32.0 / PI).sqrt();
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let x: f64 = rng.random();
            if rng.random::<f64>() * envelope < mixture_raw(x) {
                out.push(x);
            }
        }
        out
    }
}

impl Default for TruncatedMixture {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproConfig {
    pub seed: u64,
    pub replicates: usize,
    pub sample_size: usize,
    pub order: usize,
    #[serde(serialize_with = "display")]
    pub dim_prior: DimensionPrior,
    #[serde(serialize_with = "display")]
    pub coef_prior: CoefFamily,
    pub samples: usize,
    pub proposal: Proposal,
    pub grid_size: usize,
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl Default for ReproConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            replicates: 10,
            sample_size: 50,
            order: 3,
            dim_prior: DimensionPrior::geometric(0.15, 5, 12).expect("valid prior"),
            coef_prior: CoefFamily::Dirichlet { alpha: 1.0 },
            samples: 1000,
            proposal: Proposal::Weighted,
            grid_size: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replicate {
    pub seed: u64,
    pub mse: f64,
    pub max_stderr: f64,
    pub map_dimension: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproReport {
    pub config: ReproConfig,
    pub replicates: Vec<Replicate>,
    pub median_mse: f64,
    pub max_stderr: f64,
    pub wall_time_seconds: f64,
}

pub struct ReproRun {
    pub report: ReproReport,
    pub grid: Vec<f64>,
    pub truth: Vec<f64>,
    /// Estimate from the first replicate.
    pub first: PosteriorEstimate,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn run_repro(config: &ReproConfig) -> randseries::Result<ReproRun> {
    if config.replicates == 0 {
        return Err(randseries::Error::InvalidData("at least one replicate is required".into()));
    }
    let start = Instant::now();
    let mixture = TruncatedMixture::new();
    let model = DensityModel::new(config.order, config.dim_prior.clone(), config.coef_prior)?;
    let grid = unit_grid(config.grid_size);
    let truth: Vec<f64> = grid.iter().map(|&x| mixture.density(x)).collect();
    let mut replicates = Vec::with_capacity(config.replicates);
    let mut first = None;
    for r in 0..config.replicates as u64 {
        let seed = config.seed.wrapping_add(r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(DATA_STREAM);
        let data = mixture.sample(config.sample_size, &mut rng);
        let method = Method::MonteCarlo { samples: config.samples, seed, proposal: config.proposal };
        let est = fit_density(&data, &model, &grid, method)?;
        let mse = est.mean.iter().zip(&truth).map(|(e, t)| (e - t).powi(2)).sum::<f64>() / grid.len() as f64;
        replicates.push(Replicate { seed, mse, max_stderr: est.max_stderr(), map_dimension: est.map_dimension() });
        first.get_or_insert(est);
    }
    let mses: Vec<f64> = replicates.iter().map(|r| r.mse).collect();
    let report = ReproReport {
        config: config.clone(),
        median_mse: median(&mses),
        max_stderr: replicates.iter().map(|r| r.max_stderr).fold(0.0, f64::max),
        replicates,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(ReproRun { report, grid, truth, first: first.expect("at least one replicate") })
}
