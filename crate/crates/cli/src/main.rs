use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fidelab_cli::{compare_runs, run, validate_run, CliError, CliResult, ExperimentConfig};

const ARTIFACTS_HELP: &str = "\
Artifacts (first column is the key; every run also writes manifest.json):
  spin-fidelity   fidelity_N{n}.csv: t, F                      spin_fidelity.json
  hmh-check       sigma_sq.csv: N, sigma_sq                    hmh_report.json
  dicke-analytic  dicke_fidelity.csv: t, F_analytic, F_gaussian[, F_oracle]
                                                               dicke_analytic.json
  dicke-oracle    dicke_fidelity.csv: t, F_oracle              dicke_oracle.json
  scaling         scaling.csv: N, sigma_exact, sigma_fit, fit_rmse, t_max
                                                               scaling.json
  periodogram     samples.csv: index, sample
                  periodogram.csv: freq_hz, power              periodogram.json
  rng-demo        uniform.csv: index, u                        uniformity.json

Exit codes: 0 ok, 1 other failure or compare over tolerance, 2 invalid input,
3 capacity exceeded, 4 numerical non-convergence.
Set FIDELAB_THREADS to fix the worker pool size.";

#[derive(Debug, Parser)]
#[command(name = "fidelab", version, about = "Fidelity decay experiments", after_help = ARTIFACTS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a config value, e.g. `--set n_values=[4,6,8]`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two runs column by column on identical grids.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Check a run directory against its manifest.
    Validate { dir: PathBuf },
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("FIDELAB_THREADS") else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("FIDELAB_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

fn dispatch(cli: Cli) -> CliResult<ExitCode> {
    configure_threads()?;
    match cli.command {
        Command::Run { config, overrides, out } => {
            let config = ExperimentConfig::load(&config, &overrides)?;
            let (dir, manifest) = run(&config, out.as_deref())?;
            print_json(&serde_json::json!({
                "output_dir": dir,
                "artifacts": manifest.artifacts.iter().map(|a| &a.path).collect::<Vec<_>>(),
                "wall_time_seconds": manifest.wall_time_seconds,
            }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { a, b, tol } => {
            let report = compare_runs(&a, &b, tol)?;
            print_json(&report);
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Validate { dir } => {
            let count = validate_run(&dir)?;
            print_json(&serde_json::json!({ "valid": true, "artifacts": count }));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
