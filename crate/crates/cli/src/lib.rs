//! Command-line front end for `fidelab-core`. Each run reads one JSON config
//! and writes a directory of CSV and JSON artifacts.

pub mod artifacts;
pub mod compare;
pub mod config;
pub mod error;
pub mod experiments;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub use artifacts::{validate_run, Manifest};
pub use compare::{compare_runs, CompareReport};
pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};

/// Runs one experiment and writes its artifacts. `out` takes precedence over
/// the config's `output_dir`.
pub fn run(config: &ExperimentConfig, out: Option<&Path>) -> CliResult<(PathBuf, Manifest)> {
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .ok_or_else(|| CliError::Config("no output directory: pass --out or set output_dir".into()))?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let set = experiments::execute(config)?;
    let manifest = artifacts::write_run(&dir, config, &set, started, clock.elapsed().as_secs_f64())?;
    Ok((dir, manifest))
}
