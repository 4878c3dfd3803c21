//! Command-line front end for the `randseries` estimators.
//!
//! Each estimation subcommand writes a grid CSV (to `--out` or stdout) and a
//! pretty-printed JSON diagnostics file (to `--diagnostics`, next to `--out`
//! with a `.json` extension, or stderr). Exit status is 0 on success, 2 for
//! configuration and input errors, 3 for numerical failures.

pub mod data;
pub mod output;
pub mod repro;
pub mod verify;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use randseries::density::{fit_density_unbounded, DensityFit, DensityModel, Link};
use randseries::engine::{Method, Proposal};
use randseries::linmodel::{fit_functional, fit_gauss_regression, fit_whitenoise, GaussRegressionModel, SequenceModel};
use randseries::regression::{fit_binary, fit_poisson, BinaryModel, PoissonModel};
use randseries::spectral::{fit_inverse_spectral, periodogram, spectral_density_estimate, SpectralModel};
use randseries::splinebasis::unit_grid;
use randseries::{CoefFamily, DimensionPrior, PosteriorEstimate};

use output::{dim_weights, ConfigEcho, Diagnostics, Grid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("malformed data in {}: {reason}", path.display())]
    Data { path: PathBuf, reason: String },

    #[error("cannot write output: {0}")]
    Output(String),

    #[error("{0}")]
    Model(#[from] randseries::Error),

    #[error("{failed} of {total} checks failed")]
    Verification { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Verification { .. } => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "randseries", version, about = "Posterior means under B-spline random series priors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Print a short summary to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density on [0, 1] (or on the real line through a logistic link).
    Density(DensityArgs),
    /// Inverse spectral density from a time series via the Whittle likelihood.
    Spectral(CommonArgs),
    /// Binary regression; data columns are covariate in [0, 1] and 0/1 response.
    Binary(CommonArgs),
    /// Poisson regression; data columns are covariate in [0, 1] and counts.
    Poisson(CommonArgs),
    /// Gaussian regression with conjugate normal/inverse-gamma priors.
    Linreg(GaussArgs),
    /// Functional linear regression; header row holds the time points.
    Funcreg(GaussArgs),
    /// Gaussian white noise sequence model.
    Whitenoise(WhiteNoiseArgs),
    /// Simulation study with the mixture density and 50 observations.
    #[command(name = "repro-section9")]
    Repro(ReproArgs),
    /// Run every cross-check against the reference implementations.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProposalArg {
    Weighted,
    Uniform,
}

impl From<ProposalArg> for Proposal {
    fn from(p: ProposalArg) -> Self {
        match p {
            ProposalArg::Weighted => Proposal::Weighted,
            ProposalArg::Uniform => Proposal::Uniform,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// B-spline order (degree + 1).
    #[arg(long, default_value_t = 3)]
    pub q: usize,
    /// Dimension prior, e.g. `geom:0.15:5:12`, `poisson:4:3:10`, `uniform:3:8`, `fixed:6`.
    #[arg(long)]
    pub dim_prior: Option<String>,
    /// Coefficient prior, e.g. `dirichlet:1`, `gamma:1:1`, `beta:1:1`, `normal:1`.
    #[arg(long)]
    pub coef_prior: Option<String>,
    /// Monte Carlo draws per dimension; exact enumeration when absent.
    #[arg(long)]
    pub mc: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ProposalArg::Weighted)]
    pub proposal: ProposalArg,
    /// Number of equally spaced evaluation points.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `identity` for data on [0, 1], or `logistic:location:scale`.
    #[arg(long, default_value = "identity")]
    pub transform: String,
    /// Lower end of the output grid with a logistic transform.
    #[arg(long)]
    pub grid_min: Option<f64>,
    #[arg(long)]
    pub grid_max: Option<f64>,
    /// Also report the pointwise posterior variance.
    #[arg(long)]
    pub variance: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GaussArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Inverse-gamma prior on the noise variance, `invgamma:shape:rate`.
    #[arg(long, default_value = "invgamma:1:1")]
    pub noise_prior: String,
    /// Lower bound on the noise standard deviation.
    #[arg(long)]
    pub sigma_min: Option<f64>,
    /// Covariate map onto [0, 1] for `linreg`: `identity` or `logistic:location:scale`.
    #[arg(long, default_value = "identity")]
    pub transform: String,
    #[arg(long)]
    pub grid_min: Option<f64>,
    #[arg(long)]
    pub grid_max: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct WhiteNoiseArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Sample size `n`; observation `i` has variance `1/n`.
    #[arg(long)]
    pub n_obs: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ReproArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub replicates: usize,
    #[arg(long, default_value_t = 50)]
    pub sample_size: usize,
    #[arg(long, default_value_t = 3)]
    pub q: usize,
    #[arg(long, default_value = "geom:0.15:5:12")]
    pub dim_prior: String,
    #[arg(long, default_value = "dirichlet:1")]
    pub coef_prior: String,
    #[arg(long, default_value_t = 1000)]
    pub mc: usize,
    #[arg(long, value_enum, default_value_t = ProposalArg::Weighted)]
    pub proposal: ProposalArg,
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Truth and first-replicate estimate on the grid.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report; stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Write the check results as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first), runs, and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let echo_args: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match configure_threads().and_then(|()| dispatch(&cli, echo_args)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("randseries: {e}");
            e.exit_code()
        }
    }
}

/// Applies `RANDSERIES_THREADS` to the global rayon pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("RANDSERIES_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Config(format!("RANDSERIES_THREADS: expected a positive integer, got `{value}`")))?;
    // A second call in the same process finds the pool already built; keep it.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn dispatch(cli: &Cli, args: Vec<String>) -> Result<(), CliError> {
    let start = Instant::now();
    let run = match &cli.command {
        Command::Density(a) => density(a, args)?,
        Command::Spectral(a) => spectral(a, args)?,
        Command::Binary(a) => binary(a, args)?,
        Command::Poisson(a) => poisson(a, args)?,
        Command::Linreg(a) => linreg(a, args)?,
        Command::Funcreg(a) => funcreg(a, args)?,
        Command::Whitenoise(a) => whitenoise(a, args)?,
        Command::Repro(a) => return repro(a, args, cli.verbose),
        Command::Verify(a) => return verify_cmd(a),
    };
    let diagnostics = Diagnostics {
        config: run.echo,
        dimension_posterior: dim_weights(&run.dimension_posterior),
        map_dimension: run
            .dimension_posterior
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|p| p.0),
        max_stderr: run.max_stderr,
        notes: run.notes,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    if cli.verbose {
        eprintln!(
            "randseries: {} grid points, MAP dimension {:?}, max stderr {:.3e}, {:.2}s",
            run.grid.columns.first().map_or(0, Vec::len),
            diagnostics.map_dimension,
            diagnostics.max_stderr,
            diagnostics.wall_time_seconds
        );
    }
    let common = run.common;
    output::emit(&run.grid, &output::to_json(&diagnostics)?, common.out.as_deref(), common.diagnostics.as_deref())
}

/// Result of one estimation subcommand before it is written out.
struct Run {
    common: CommonArgs,
    echo: ConfigEcho,
    grid: Grid,
    dimension_posterior: Vec<(usize, f64)>,
    max_stderr: f64,
    notes: Vec<String>,
}

fn parse_dim_prior(spec: &str) -> Result<DimensionPrior, CliError> {
    spec.parse().map_err(|e| CliError::Config(format!("--dim-prior: {e}")))
}

fn parse_coef_prior(spec: &str) -> Result<CoefFamily, CliError> {
    spec.parse().map_err(|e| CliError::Config(format!("--coef-prior: {e}")))
}

fn parse_link(flag: &str, spec: &str) -> Result<Link, CliError> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    match parts.as_slice() {
        ["identity"] | ["none"] => Ok(Link::Identity),
        ["logistic", loc, scale] => {
            let num = |s: &str, what: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| CliError::Config(format!("{flag}: {what} `{s}` is not a number")))
            };
            let scale = num(scale, "scale")?;
            if scale <= 0.0 {
                return Err(CliError::Config(format!("{flag}: logistic scale must be positive")));
            }
            Ok(Link::Logistic { location: num(loc, "location")?, scale })
        }
        _ => Err(CliError::Config(format!("{flag}: expected `identity` or `logistic:location:scale`, got `{spec}`"))),
    }
}

fn parse_noise_prior(spec: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let bad = || CliError::Config(format!("--noise-prior: expected `invgamma:shape:rate` with positive numbers, got `{spec}`"));
    match parts.as_slice() {
        ["invgamma" | "ig", a, b] => {
            let a: f64 = a.parse().map_err(|_| bad())?;
            let b: f64 = b.parse().map_err(|_| bad())?;
            if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
                Ok((a, b))
            } else {
                Err(bad())
            }
        }
        _ => Err(bad()),
    }
}

impl CommonArgs {
    fn method(&self) -> Result<Method, CliError> {
        match self.mc {
            None => Ok(Method::Exact),
            Some(n) if n < 2 => Err(CliError::Config(format!("--mc: at least 2 draws are required, got {n}"))),
            Some(n) => Ok(Method::MonteCarlo { samples: n, seed: self.seed, proposal: self.proposal.into() }),
        }
    }

    fn unit_grid(&self) -> Result<Vec<f64>, CliError> {
        if self.grid < 2 {
            return Err(CliError::Config(format!("--grid: at least 2 points are required, got {}", self.grid)));
        }
        Ok(unit_grid(self.grid))
    }

    fn priors(&self, dim_default: &str, coef_default: &str) -> Result<(DimensionPrior, CoefFamily), CliError> {
        let dim = parse_dim_prior(self.dim_prior.as_deref().unwrap_or(dim_default))?;
        let coef = parse_coef_prior(self.coef_prior.as_deref().unwrap_or(coef_default))?;
        Ok((dim, coef))
    }

    fn echo(&self, command: &str, args: Vec<String>, dim: &DimensionPrior, coef: &str) -> ConfigEcho {
        let mc = self.mc.filter(|&n| n >= 2);
        ConfigEcho {
            command: command.into(),
            args,
            q: self.q,
            dim_prior: dim.to_string(),
            dim_prior_convention: output::GEOMETRIC_CONVENTION,
            coef_prior: coef.into(),
            method: if mc.is_some() { "monte_carlo" } else { "exact" },
            samples: mc,
            seed: mc.map(|_| self.seed),
            proposal: mc.map(|_| format!("{:?}", self.proposal).to_lowercase()),
            grid: self.grid,
            data: self.data.as_ref().map(|p| p.display().to_string()),
            extra: Vec::new(),
        }
    }
}

/// Grid on the real line for models fitted through a logistic link.
fn real_grid(size: usize, lo: Option<f64>, hi: Option<f64>, sample: &[f64]) -> Result<Vec<f64>, CliError> {
    let (min, max) = sample.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let pad = if max > min { 0.1 * (max - min) } else { 1.0 };
    let lo = lo.unwrap_or(if min.is_finite() { min - pad } else { -1.0 });
    let hi = hi.unwrap_or(if max.is_finite() { max + pad } else { 1.0 });
    if !(lo < hi) {
        return Err(CliError::Config(format!("--grid-min/--grid-max: need min < max, got {lo} and {hi}")));
    }
    Ok(unit_grid(size).into_iter().map(|u| lo + u * (hi - lo)).collect())
}

fn estimate_run(common: &CommonArgs, echo: ConfigEcho, est: &PosteriorEstimate, x_name: &'static str) -> Run {
    Run {
        common: common.clone(),
        echo,
        grid: Grid { headers: vec![x_name, "mean", "stderr"], columns: vec![est.grid.clone(), est.mean.clone(), est.stderr.clone()] },
        dimension_posterior: est.dimension_posterior.clone(),
        max_stderr: est.max_stderr(),
        notes: Vec::new(),
    }
}

const DENSITY_DIM: &str = "geom:0.15:5:12";
const REGRESSION_DIM: &str = "geom:0.15:3:10";

fn density(a: &DensityArgs, args: Vec<String>) -> Result<Run, CliError> {
    let c = &a.common;
    let method = c.method()?;
    let (dim, coef) = c.priors(DENSITY_DIM, "dirichlet:1")?;
    let link = parse_link("--transform", &a.transform)?;
    let unit = c.unit_grid()?;
    let sample = data::read_sample(data::require(&c.data)?)?;
    let model = DensityModel::new(c.q, dim.clone(), coef)?;
    let mut echo = c.echo("density", args, &dim, &coef.to_string());
    echo.extra.push(("transform".into(), a.transform.clone()));
    if link == Link::Identity {
        if let Some(x) = sample.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(CliError::Config(format!(
                "--data: observation {x} lies outside [0, 1]; pass --transform logistic:location:scale"
            )));
        }
        let fit = DensityFit::new(&sample, &model, method, a.variance)?;
        let est = fit.estimate(&unit, a.variance)?;
        let mut run = estimate_run(c, echo, &est, "x");
        if let Some(v) = est.variance {
            run.grid.headers.push("variance");
            run.grid.columns.push(v);
        }
        Ok(run)
    } else {
        if a.variance {
            return Err(CliError::Config("--variance: only available with --transform identity".into()));
        }
        let grid = real_grid(c.grid, a.grid_min, a.grid_max, &sample)?;
        let est = fit_density_unbounded(&sample, &model, link, &grid, method)?;
        Ok(estimate_run(c, echo, &est, "y"))
    }
}

fn spectral(c: &CommonArgs, args: Vec<String>) -> Result<Run, CliError> {
    let method = c.method()?;
    let (dim, coef) = c.priors(REGRESSION_DIM, "gamma:1:1")?;
    let grid = c.unit_grid()?;
    let series = data::read_sample(data::require(&c.data)?)?;
    let model = SpectralModel::new(c.q, dim.clone(), coef)?;
    let pgram = periodogram(&series)?;
    let est = fit_inverse_spectral(&pgram, &model, &grid, method)?;
    let plugin = spectral_density_estimate(&est)?;
    let mut echo = c.echo("spectral", args, &dim, &coef.to_string());
    echo.extra.push(("frequency_scale".into(), "omega in [0, 1] is the angular frequency divided by pi".into()));
    let mut run = estimate_run(c, echo, &est, "omega");
    run.grid.headers = vec!["omega", "inverse_mean", "stderr", "plugin_spectral_density"];
    run.grid.columns.push(plugin);
    run.notes.push("plugin_spectral_density is 1 / E[1/f], not the posterior mean of f".into());
    Ok(run)
}

fn binary(c: &CommonArgs, args: Vec<String>) -> Result<Run, CliError> {
    let method = c.method()?;
    let (dim, coef) = c.priors(REGRESSION_DIM, "beta:1:1")?;
    let grid = c.unit_grid()?;
    let path = data::require(&c.data)?;
    let (z, x) = data::read_pairs(path)?;
    let x = data::to_binary(path, "response", &x)?;
    let model = BinaryModel::new(c.q, dim.clone(), coef)?;
    let est = fit_binary(&z, &x, &model, &grid, method)?;
    Ok(estimate_run(c, c.echo("binary", args, &dim, &coef.to_string()), &est, "z"))
}

fn poisson(c: &CommonArgs, args: Vec<String>) -> Result<Run, CliError> {
    let method = c.method()?;
    let (dim, coef) = c.priors(REGRESSION_DIM, "gamma:1:1")?;
    let grid = c.unit_grid()?;
    let path = data::require(&c.data)?;
    let (z, x) = data::read_pairs(path)?;
    let x = data::to_counts(path, "count", &x)?;
    let model = PoissonModel::new(c.q, dim.clone(), coef)?;
    let est = fit_poisson(&z, &x, &model, &grid, method)?;
    Ok(estimate_run(c, c.echo("poisson", args, &dim, &coef.to_string()), &est, "z"))
}

fn gauss_model(a: &GaussArgs, command: &str, args: Vec<String>) -> Result<(GaussRegressionModel, ConfigEcho), CliError> {
    let c = &a.common;
    if c.mc.is_some() {
        return Err(CliError::Config(format!("--mc: {command} is always evaluated exactly")));
    }
    let (dim, coef) = c.priors(REGRESSION_DIM, "normal:1")?;
    let CoefFamily::Normal { variance } = coef else {
        return Err(CliError::Config(format!("--coef-prior: {command} needs `normal:variance`, got `{coef}`")));
    };
    let (alpha0, beta0) = parse_noise_prior(&a.noise_prior)?;
    let mut model = GaussRegressionModel::new(c.q, dim.clone(), variance, alpha0, beta0)?;
    model.sigma_min = a.sigma_min;
    let mut echo = c.echo(command, args, &dim, &coef.to_string());
    echo.extra.push(("noise_prior".into(), a.noise_prior.clone()));
    if let Some(s) = a.sigma_min {
        echo.extra.push(("sigma_min".into(), output::fmt_f64(s)));
    }
    Ok((model, echo))
}

fn linreg(a: &GaussArgs, args: Vec<String>) -> Result<Run, CliError> {
    let (mut model, mut echo) = gauss_model(a, "linreg", args)?;
    model.covariate_link = parse_link("--transform", &a.transform)?;
    echo.extra.push(("transform".into(), a.transform.clone()));
    let (z, x) = data::read_pairs(data::require(&a.common.data)?)?;
    let grid = match model.covariate_link {
        Link::Identity => a.common.unit_grid()?,
        Link::Logistic { .. } => real_grid(a.common.grid, a.grid_min, a.grid_max, &z)?,
    };
    let est = fit_gauss_regression(&model, &z, &x, &grid)?;
    Ok(estimate_run(&a.common, echo, &est, "z"))
}

fn funcreg(a: &GaussArgs, args: Vec<String>) -> Result<Run, CliError> {
    if a.transform != "identity" {
        return Err(CliError::Config("--transform: funcreg works on the time scale [0, 1] only".into()));
    }
    let (model, echo) = gauss_model(a, "funcreg", args)?;
    let grid = a.common.unit_grid()?;
    let f = data::read_functional(data::require(&a.common.data)?)?;
    let fit = fit_functional(&f.time_grid, &f.trajectories, &f.responses, &model, &grid)?;
    let mut run = estimate_run(&a.common, echo, &fit.estimate, "t");
    run.grid.headers[1] = "beta_mean";
    if fit.coarse_grid {
        run.notes.push("time grid has fewer than 4J points for some dimension J; trapezoid integrals may be inaccurate".into());
    }
    Ok(run)
}

fn whitenoise(a: &WhiteNoiseArgs, args: Vec<String>) -> Result<Run, CliError> {
    let c = &a.common;
    if c.mc.is_some() {
        return Err(CliError::Config("--mc: whitenoise is always evaluated exactly".into()));
    }
    let observations = data::read_sample(data::require(&c.data)?)?;
    let default_dim = format!("uniform:1:{}", observations.len().max(1));
    let (dim, coef) = c.priors(&default_dim, "normal:1")?;
    let CoefFamily::Normal { variance } = coef else {
        return Err(CliError::Config(format!("--coef-prior: whitenoise needs `normal:variance`, got `{coef}`")));
    };
    let model = SequenceModel { observations, n: a.n_obs, tau2: variance, dim_prior: dim.clone() };
    let fit = fit_whitenoise(&model)?;
    let mut echo = c.echo("whitenoise", args, &dim, &coef.to_string());
    echo.extra.push(("n_obs".into(), output::fmt_f64(a.n_obs)));
    let index: Vec<f64> = (1..=fit.coefficients.len()).map(|i| i as f64).collect();
    Ok(Run {
        common: c.clone(),
        echo,
        grid: Grid { headers: vec!["index", "coefficient_mean"], columns: vec![index, fit.coefficients] },
        dimension_posterior: fit.dimension_posterior,
        max_stderr: 0.0,
        notes: Vec::new(),
    })
}

fn repro(a: &ReproArgs, _args: Vec<String>, verbose: bool) -> Result<(), CliError> {
    if a.mc < 2 {
        return Err(CliError::Config(format!("--mc: at least 2 draws are required, got {}", a.mc)));
    }
    if a.grid < 2 {
        return Err(CliError::Config(format!("--grid: at least 2 points are required, got {}", a.grid)));
    }
    if a.replicates == 0 {
        return Err(CliError::Config("--replicates: at least one replicate is required".into()));
    }
    let config = repro::ReproConfig {
        seed: a.seed,
        replicates: a.replicates,
        sample_size: a.sample_size,
        order: a.q,
        dim_prior: parse_dim_prior(&a.dim_prior)?,
        coef_prior: parse_coef_prior(&a.coef_prior)?,
        samples: a.mc,
        proposal: a.proposal.into(),
        grid_size: a.grid,
    };
    let run = repro::run_repro(&config)?;
    if verbose {
        for r in &run.report.replicates {
            eprintln!("replicate seed {}: mse {:.4}, max stderr {:.4}", r.seed, r.mse, r.max_stderr);
        }
    }
    eprintln!(
        "median MSE {:.4} over {} replicates, max stderr {:.4}, {:.1}s",
        run.report.median_mse,
        run.report.replicates.len(),
        run.report.max_stderr,
        run.report.wall_time_seconds
    );
    if let Some(out) = &a.out {
        let grid = Grid {
            headers: vec!["x", "truth", "estimate", "stderr"],
            columns: vec![run.grid.clone(), run.truth.clone(), run.first.mean.clone(), run.first.stderr.clone()],
        };
        output::write_file(out, &grid.to_csv()?)?;
    }
    let report = output::to_json(&run.report)?;
    match &a.report {
        Some(p) => output::write_file(p, format!("{report}\n").as_bytes()),
        None => {
            println!("{report}");
            Ok(())
        }
    }
}

fn verify_cmd(a: &VerifyArgs) -> Result<(), CliError> {
    let checks = verify::all_checks();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if let Some(p) = &a.out {
        write_json(p, &checks)?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Verification { failed, total: checks.len() })
    }
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    output::write_file(path, format!("{}\n", output::to_json(value)?).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn links_parse() {
        assert_eq!(parse_link("--transform", "identity").unwrap(), Link::Identity);
        assert_eq!(
            parse_link("--transform", "logistic:0.5:2").unwrap(),
            Link::Logistic { location: 0.5, scale: 2.0 }
        );
        for bad in ["logistic:0:0", "logistic:a:1", "probit"] {
            let e = parse_link("--transform", bad).unwrap_err();
            assert!(e.to_string().contains("--transform"), "{e}");
        }
    }

    #[test]
    fn noise_prior_parses() {
        assert_eq!(parse_noise_prior("invgamma:2:0.5").unwrap(), (2.0, 0.5));
        assert!(parse_noise_prior("invgamma:0:1").is_err());
        assert!(parse_noise_prior("gamma:1:1").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), EXIT_CONFIG);
        assert_eq!(CliError::Model(randseries::Error::DegenerateDenominator).exit_code(), EXIT_NUMERICAL);
        assert_eq!(CliError::Model(randseries::Error::InvalidData("x".into())).exit_code(), EXIT_CONFIG);
        assert_eq!(CliError::Verification { failed: 1, total: 2 }.exit_code(), EXIT_NUMERICAL);
    }

    #[test]
    fn real_grid_pads_the_sample_range() {
        let g = real_grid(3, None, None, &[0.0, 10.0]).unwrap();
        assert_eq!(g, vec![-1.0, 5.0, 11.0]);
        assert!(real_grid(3, Some(2.0), Some(1.0), &[]).is_err());
    }
}
