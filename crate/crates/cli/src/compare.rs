//! Column-wise comparison of two runs on identical grids.

use std::path::Path;

use serde::Serialize;

use crate::artifacts::{read_csv, CsvData, Manifest};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnDiff {
    pub artifact: String,
    /// Column name, or `a_name~b_name` for paired primary columns.
    pub column: String,
    pub max_abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub tolerance: f64,
    pub passed: bool,
    pub max_abs_diff: f64,
    pub columns: Vec<ColumnDiff>,
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn column<'a>(data: &'a CsvData, name: &str) -> Option<&'a [f64]> {
    data.header.iter().position(|h| h == name).map(|i| data.columns[i].as_slice())
}

/// Compares every CSV artifact present in both runs. Key columns (the first
/// column) must match exactly; no interpolation is attempted.
pub fn compare_runs(a: &Path, b: &Path, tolerance: f64) -> CliResult<CompareReport> {
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(CliError::Config(format!("tolerance must be finite and non-negative, got {tolerance}")));
    }
    let (ma, dir_a) = Manifest::load(a)?;
    let (mb, dir_b) = Manifest::load(b)?;
    let mut columns = Vec::new();
    for ra in ma.artifacts.iter().filter(|r| r.kind == "csv") {
        let Some(rb) = mb.artifacts.iter().find(|r| r.kind == "csv" && r.path == ra.path) else { continue };
        let da = read_csv(&dir_a.join(&ra.path))?;
        let db = read_csv(&dir_b.join(&rb.path))?;
        let (key_a, key_b) = match (da.header.first(), db.header.first()) {
            (Some(ka), Some(kb)) if ka == kb => (&da.columns[0], &db.columns[0]),
            _ => return Err(CliError::Incomparable(format!("{}: key columns differ", ra.path))),
        };
        if key_a.len() != key_b.len() || key_a.iter().zip(key_b).any(|(x, y)| x.to_bits() != y.to_bits()) {
            return Err(CliError::Incomparable(format!(
                "{}: grids differ ({} vs {} rows); interpolation is not performed",
                ra.path,
                key_a.len(),
                key_b.len()
            )));
        }
        for (name, values) in da.header.iter().zip(&da.columns).skip(1) {
            if let Some(other) = column(&db, name) {
                columns.push(ColumnDiff { artifact: ra.path.clone(), column: name.clone(), max_abs_diff: max_diff(values, other) });
            }
        }
        if let (Some(va), Some(vb)) = (&ra.value_column, &rb.value_column) {
            if va != vb {
                if let (Some(x), Some(y)) = (column(&da, va), column(&db, vb)) {
                    columns.push(ColumnDiff { artifact: ra.path.clone(), column: format!("{va}~{vb}"), max_abs_diff: max_diff(x, y) });
                }
            }
        }
    }
    if columns.is_empty() {
        return Err(CliError::Incomparable("the runs share no CSV columns".into()));
    }
    let max_abs_diff = columns.iter().map(|c| c.max_abs_diff).fold(0.0, f64::max);
    Ok(CompareReport { tolerance, passed: max_abs_diff <= tolerance, max_abs_diff, columns })
}
