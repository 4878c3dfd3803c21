//! Grid CSV and JSON diagnostics.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Shortest round-trip text; scientific notation only for very small or large magnitudes.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub headers: Vec<&'static str>,
    pub columns: Vec<Vec<f64>>,
}

impl Grid {
    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(&self.headers).map_err(csv_err)?;
        let rows = self.columns.first().map_or(0, Vec::len);
        for i in 0..rows {
            w.write_record(self.columns.iter().map(|c| fmt_f64(c[i]))).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DimWeight {
    pub dim: usize,
    pub probability: f64,
}

pub fn dim_weights(post: &[(usize, f64)]) -> Vec<DimWeight> {
    post.iter().map(|&(dim, probability)| DimWeight { dim, probability }).collect()
}

/// Everything needed to replay a run.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub command: String,
    pub args: Vec<String>,
    pub q: usize,
    pub dim_prior: String,
    /// Geometric dimension priors use `p (1-p)^(j-1)`, truncated and renormalized.
    pub dim_prior_convention: &'static str,
    pub coef_prior: String,
    pub method: &'static str,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub proposal: Option<String>,
    pub grid: usize,
    pub data: Option<String>,
    pub extra: Vec<(String, String)>,
}

pub const GEOMETRIC_CONVENTION: &str = "geom:p:lo:hi has mass p(1-p)^(j-1) on lo..=hi, renormalized";

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub config: ConfigEcho,
    pub dimension_posterior: Vec<DimWeight>,
    pub map_dimension: Option<usize>,
    pub max_stderr: f64,
    pub notes: Vec<String>,
    pub wall_time_seconds: f64,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// CSV to `out` or stdout; diagnostics to `diag`, next to `out`, or stderr.
pub fn emit(grid: &Grid, diagnostics: &str, out: Option<&Path>, diag: Option<&Path>) -> Result<(), CliError> {
    let csv = grid.to_csv()?;
    match out {
        Some(p) => write_file(p, &csv)?,
        None => std::io::stdout().write_all(&csv).map_err(|e| CliError::Output(e.to_string()))?,
    }
    let diag_path: Option<PathBuf> = diag.map(Path::to_path_buf).or_else(|| out.map(|p| p.with_extension("json")));
    match diag_path {
        Some(p) => write_file(&p, format!("{diagnostics}\n").as_bytes()),
        None => {
            eprintln!("{diagnostics}");
            Ok(())
        }
    }
}
