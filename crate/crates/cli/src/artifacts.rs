//! Writing run directories to disk and checking them afterwards.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Index(Vec<u64>),
    Real(Vec<f64>),
}

impl ColumnData {
    fn len(&self) -> usize {
        match self {
            ColumnData::Index(v) => v.len(),
            ColumnData::Real(v) => v.len(),
        }
    }

    fn cell(&self, row: usize) -> String {
        match self {
            ColumnData::Index(v) => v[row].to_string(),
            // Debug formatting is the shortest string that round-trips.
            ColumnData::Real(v) => format!("{:?}", v[row]),
        }
    }
}

/// A CSV artifact. The first column is the key (time, N, frequency or index).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub columns: Vec<(String, ColumnData)>,
    /// Column holding the experiment's main result, used by `compare` to
    /// pair differently named columns (for example F_analytic and F_oracle).
    pub value_column: Option<String>,
}

impl Table {
    pub fn new(file: impl Into<String>, key: &str, key_data: ColumnData) -> Self {
        Self { file: file.into(), columns: vec![(key.to_string(), key_data)], value_column: None }
    }

    pub fn real(mut self, name: &str, values: Vec<f64>) -> Self {
        self.columns.push((name.to_string(), ColumnData::Real(values)));
        self
    }

    pub fn primary(mut self, name: &str) -> Self {
        self.value_column = Some(name.to_string());
        self
    }

    fn rows(&self) -> usize {
        self.columns[0].1.len()
    }
}

/// Everything an experiment produced, before it touches the filesystem.
#[derive(Debug, Clone, Default)]
pub struct ArtifactSet {
    pub tables: Vec<Table>,
    pub reports: Vec<(String, Value)>,
}

impl ArtifactSet {
    pub fn table(&mut self, table: Table) {
        self.tables.push(table);
    }

    pub fn report(&mut self, file: impl Into<String>, value: impl Serialize) -> CliResult<()> {
        let value = serde_json::to_value(value).map_err(|e| CliError::Config(e.to_string()))?;
        self.reports.push((file.into(), value));
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub path: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_column: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub started_unix_seconds: u64,
    pub wall_time_seconds: f64,
    pub threads: usize,
    pub artifacts: Vec<ArtifactRecord>,
}

impl Manifest {
    /// Reads a manifest given its path or the run directory containing it.
    pub fn load(path: &Path) -> CliResult<(Self, PathBuf)> {
        let file = if path.is_dir() { path.join(MANIFEST) } else { path.to_path_buf() };
        let text = fs::read_to_string(&file).map_err(|e| CliError::io(&file, e))?;
        let manifest = serde_json::from_str(&text)
            .map_err(|e| CliError::Artifact { path: file.clone(), reason: e.to_string() })?;
        let dir = file.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((manifest, dir))
    }
}

fn write_table(dir: &Path, table: &Table) -> CliResult<ArtifactRecord> {
    let rows = table.rows();
    if let Some((name, _)) = table.columns.iter().find(|(_, c)| c.len() != rows) {
        return Err(CliError::Artifact { path: dir.join(&table.file), reason: format!("column {name} has a different length") });
    }
    let path = dir.join(&table.file);
    let mut writer = csv::Writer::from_path(&path).map_err(|e| csv_error(&path, e))?;
    writer.write_record(table.columns.iter().map(|(n, _)| n.as_str())).map_err(|e| csv_error(&path, e))?;
    for row in 0..rows {
        writer.write_record(table.columns.iter().map(|(_, c)| c.cell(row))).map_err(|e| csv_error(&path, e))?;
    }
    writer.flush().map_err(|e| CliError::io(&path, e))?;
    Ok(ArtifactRecord {
        path: table.file.clone(),
        kind: "csv".into(),
        columns: Some(table.columns.iter().map(|(n, _)| n.clone()).collect()),
        value_column: table.value_column.clone(),
        rows: Some(rows),
    })
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::Artifact { path: path.to_path_buf(), reason: e.to_string() }
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes all artifacts, then the manifest, into `dir`.
pub fn write_run(
    dir: &Path,
    config: &ExperimentConfig,
    set: &ArtifactSet,
    started_unix_seconds: u64,
    wall_time_seconds: f64,
) -> CliResult<Manifest> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut artifacts = Vec::new();
    for table in &set.tables {
        artifacts.push(write_table(dir, table)?);
    }
    for (file, value) in &set.reports {
        write_json(&dir.join(file), value)?;
        artifacts.push(ArtifactRecord { path: file.clone(), kind: "json".into(), columns: None, value_column: None, rows: None });
    }
    let manifest = Manifest {
        tool: "fidelab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        started_unix_seconds,
        wall_time_seconds,
        threads: rayon::current_num_threads(),
        artifacts,
    };
    write_json(&dir.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

/// Parsed numeric CSV: header and columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvData {
    pub header: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

pub fn read_csv(path: &Path) -> CliResult<CsvData> {
    let bad = |reason: String| CliError::Artifact { path: path.to_path_buf(), reason };
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader.headers().map_err(|e| csv_error(path, e))?.iter().map(String::from).collect();
    let mut columns = vec![Vec::new(); header.len()];
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        if record.len() != header.len() {
            return Err(bad(format!("row {} has {} fields, expected {}", line + 1, record.len(), header.len())));
        }
        for (col, field) in columns.iter_mut().zip(record.iter()) {
            let v: f64 = field.parse().map_err(|_| bad(format!("row {}: '{field}' is not a number", line + 1)))?;
            if !v.is_finite() {
                return Err(bad(format!("row {}: non-finite value", line + 1)));
            }
            col.push(v);
        }
    }
    Ok(CsvData { header, columns })
}

/// Checks every artifact listed in the manifest against its declared schema.
/// CSV files must match the recorded header and row count with a strictly
/// ascending key column. JSON files only have to parse.
pub fn validate_run(path: &Path) -> CliResult<usize> {
    let (manifest, dir) = Manifest::load(path)?;
    for record in &manifest.artifacts {
        let file = dir.join(&record.path);
        let bad = |reason: String| CliError::Artifact { path: file.clone(), reason };
        match record.kind.as_str() {
            "csv" => {
                let data = read_csv(&file)?;
                if Some(&data.header) != record.columns.as_ref() {
                    return Err(bad(format!("header {:?} does not match manifest", data.header)));
                }
                let rows = data.columns.first().map_or(0, Vec::len);
                if Some(rows) != record.rows {
                    return Err(bad(format!("{rows} rows, manifest declares {:?}", record.rows)));
                }
                if data.columns.first().is_some_and(|key| key.windows(2).any(|w| w[1] <= w[0])) {
                    return Err(bad("key column is not strictly ascending".into()));
                }
                if let Some(v) = &record.value_column {
                    if !data.header.contains(v) {
                        return Err(bad(format!("value column {v} missing")));
                    }
                }
            }
            "json" => {
                let text = fs::read_to_string(&file).map_err(|e| CliError::io(&file, e))?;
                serde_json::from_str::<Value>(&text).map_err(|e| bad(e.to_string()))?;
            }
            other => return Err(bad(format!("unknown artifact kind {other}"))),
        }
    }
    Ok(manifest.artifacts.len())
}
