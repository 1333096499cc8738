//! Run configuration: one JSON document per run, with `--set` overrides.

use std::path::{Path, PathBuf};

use fidelab_core::curve::linspace;
use fidelab_core::{RadiationState, C64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SpinFidelity,
    HmhCheck,
    DickeAnalytic,
    DickeOracle,
    Scaling,
    Periodogram,
    RngDemo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "empty_object")]
    pub parameters: Value,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Reserved; every pipeline is deterministic.
    #[serde(default)]
    pub seed: u64,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads `path`, applies `key=value` overrides and deserializes.
    pub fn load(path: &Path, overrides: &[String]) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut doc: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for item in overrides {
            apply_override(&mut doc, item)?;
        }
        serde_json::from_value(doc).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Parameters for this experiment, rejecting unknown keys.
    pub fn parameters<T: DeserializeOwned>(&self) -> CliResult<T> {
        serde_json::from_value(self.parameters.clone())
            .map_err(|e| CliError::Config(format!("parameters for {:?}: {e}", self.experiment)))
    }
}

const TOP_LEVEL: [&str; 4] = ["experiment", "parameters", "output_dir", "seed"];

/// `key=value` with a dotted key. Keys that are not top-level fields address
/// `parameters`. Values are parsed as JSON, falling back to a plain string.
pub fn apply_override(doc: &mut Value, item: &str) -> CliResult<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{item}' is not key=value")))?;
    let mut path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("override key '{key}' is malformed")));
    }
    if !TOP_LEVEL.contains(&path[0]) {
        path.insert(0, "parameters");
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = doc;
    for (depth, part) in path.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("override '{key}' descends into a non-object")))?;
        if depth + 1 == path.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj.entry(part.to_string()).or_insert_with(empty_object);
    }
    Ok(())
}

/// A time grid: explicit `values`, or `points` samples from `start` to either
/// `stop` or `horizon / sigma` where sigma is the experiment's energy width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub start: f64,
    #[serde(default)]
    pub stop: Option<f64>,
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub points: Option<usize>,
}

impl TimeGrid {
    pub fn resolve(&self, sigma: Option<f64>) -> CliResult<Vec<f64>> {
        let grid = match (&self.values, self.stop, self.horizon, self.points) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(stop), None, Some(points)) => range(self.start, stop, points)?,
            (None, None, Some(horizon), Some(points)) => {
                let sigma = sigma.filter(|s| *s > 0.0 && s.is_finite()).ok_or_else(|| {
                    CliError::Config("time grid horizon needs a positive energy width; give `stop` instead".into())
                })?;
                range(self.start, horizon / sigma, points)?
            }
            _ => {
                return Err(CliError::Config(
                    "time grid needs either `values`, or `points` with exactly one of `stop` / `horizon`".into(),
                ))
            }
        };
        if grid.is_empty() {
            return Err(CliError::Config("time grid is empty".into()));
        }
        if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config("time grid must be finite and strictly ascending".into()));
        }
        Ok(grid)
    }
}

fn range(start: f64, stop: f64, points: usize) -> CliResult<Vec<f64>> {
    if points == 0 {
        return Err(CliError::Config("time grid is empty (points = 0)".into()));
    }
    if !(start.is_finite() && stop.is_finite()) || (points > 1 && stop <= start) {
        return Err(CliError::Config(format!("time grid [{start}, {stop}] is not an ascending range")));
    }
    Ok(if points == 1 { vec![start] } else { linspace(start, stop, points) })
}

/// Radiation state in a config: `{"fock": n}`, `{"adjacent_superposition": n}`
/// or `{"amplitudes": [[re, im], ...]}` (normalized on load).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiationSpec {
    Fock(usize),
    AdjacentSuperposition(usize),
    Amplitudes(Vec<[f64; 2]>),
}

impl Default for RadiationSpec {
    fn default() -> Self {
        RadiationSpec::Fock(0)
    }
}

impl RadiationSpec {
    pub fn build(&self) -> CliResult<RadiationState> {
        Ok(match self {
            RadiationSpec::Fock(n) => RadiationState::fock(*n),
            RadiationSpec::AdjacentSuperposition(n) => RadiationState::adjacent_superposition(*n)?,
            RadiationSpec::Amplitudes(c) => RadiationState::normalized(c.iter().map(|[r, i]| C64::new(*r, *i)).collect())?,
        })
    }
}
