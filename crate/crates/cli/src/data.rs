//! CSV ingestion. Every file needs a header row; values are parsed as `f64`.

use std::path::{Path, PathBuf};

use crate::CliError;

/// A numeric table read column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

fn data_err(path: &Path, reason: impl Into<String>) -> CliError {
    CliError::Data { path: path.to_path_buf(), reason: reason.into() }
}

pub fn read_table(path: &Path, min_columns: usize) -> Result<Table, CliError> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| data_err(path, format!("cannot read header row: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.len() < min_columns {
        return Err(data_err(path, format!("expected at least {min_columns} columns, found {}", headers.len())));
    }
    let mut columns = vec![Vec::new(); headers.len()];
    for (i, record) in reader.records().enumerate() {
        // Line 1 is the header.
        let line = i + 2;
        let record = record.map_err(|e| data_err(path, format!("line {line}: {e}")))?;
        for (c, (field, name)) in record.iter().zip(&headers).enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| data_err(path, format!("line {line}, column `{name}`: `{field}` is not a number")))?;
            if !v.is_finite() {
                return Err(data_err(path, format!("line {line}, column `{name}`: value is not finite")));
            }
            columns[c].push(v);
        }
    }
    Ok(Table { headers, columns })
}

/// Single column of observations.
pub fn read_sample(path: &Path) -> Result<Vec<f64>, CliError> {
    Ok(read_table(path, 1)?.columns.swap_remove(0))
}

/// Two columns: covariate then response.
pub fn read_pairs(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut t = read_table(path, 2)?;
    let x = t.columns.swap_remove(1);
    let z = t.columns.swap_remove(0);
    Ok((z, x))
}

pub fn to_binary(path: &Path, column: &str, x: &[f64]) -> Result<Vec<u8>, CliError> {
    x.iter()
        .enumerate()
        .map(|(i, &v)| match v {
            0.0 => Ok(0),
            1.0 => Ok(1),
            _ => Err(data_err(path, format!("line {}, column `{column}`: binary response must be 0 or 1, got {v}", i + 2))),
        })
        .collect()
}

pub fn to_counts(path: &Path, column: &str, x: &[f64]) -> Result<Vec<u32>, CliError> {
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            if v >= 0.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX) {
                Ok(v as u32)
            } else {
                Err(data_err(path, format!("line {}, column `{column}`: count must be a nonnegative integer, got {v}", i + 2)))
            }
        })
        .collect()
}

/// Functional data: first column is the response, the remaining headers are
/// the time points at which each trajectory was recorded.
pub struct Functional {
    pub time_grid: Vec<f64>,
    pub trajectories: Vec<Vec<f64>>,
    pub responses: Vec<f64>,
}

pub fn read_functional(path: &Path) -> Result<Functional, CliError> {
    let t = read_table(path, 3)?;
    let time_grid = t.headers[1..]
        .iter()
        .map(|h| h.parse::<f64>().map_err(|_| data_err(path, format!("header `{h}` is not a time point"))))
        .collect::<Result<Vec<_>, _>>()?;
    let trajectories = (0..t.rows()).map(|i| t.columns[1..].iter().map(|c| c[i]).collect()).collect();
    Ok(Functional { time_grid, trajectories, responses: t.columns[0].clone() })
}

pub fn require(path: &Option<PathBuf>) -> Result<&Path, CliError> {
    path.as_deref().ok_or_else(|| CliError::Config("--data: an input file is required".into()))
}
