//! Experiment pipelines: typed parameters in, artifact sets out.

use fidelab_core::curve::linspace;
use fidelab_core::dicke::{
    propagated_amplitudes, propagated_amplitudes_full, survival_amplitude, variance_comparison,
};
use fidelab_core::quantum::{build_effective_radiation_hamiltonian, build_spin_hamiltonian};
use fidelab_core::sampling::{
    chi_square_uniformity, periodogram, sample_sine, sample_sine_naive, undersampled_uniform, ExactFrequency,
    SineSamplingSpec, Window,
};
use fidelab_core::scaling::{fit_gaussian, fwhm, recurrence_peaks};
use fidelab_core::spin_fidelity::{fidelity_curve, gaussian_convergence, hmh_condition_check, ConvergenceRow};
use fidelab_core::{
    variance, CurveSource, DickeParams, FidelityCurve, HmhReport, Peak, ProductStateRule, RadiationState,
    ScalingReport, SpinChainSpec,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::artifacts::{ArtifactSet, ColumnData, Table};
use crate::config::{ExperimentConfig, ExperimentKind, RadiationSpec, TimeGrid};
use crate::error::{CliError, CliResult};

fn default_tol() -> f64 {
    1e-10
}

fn default_state() -> ProductStateRule {
    ProductStateRule::all_up_z()
}

fn default_points() -> usize {
    200
}

pub fn execute(config: &ExperimentConfig) -> CliResult<ArtifactSet> {
    match config.experiment {
        ExperimentKind::SpinFidelity => spin_fidelity(config.parameters()?),
        ExperimentKind::HmhCheck => hmh_check(config.parameters()?),
        ExperimentKind::DickeAnalytic => dicke_analytic(config.parameters()?),
        ExperimentKind::DickeOracle => dicke_oracle(config.parameters()?),
        ExperimentKind::Scaling => scaling(config.parameters()?),
        ExperimentKind::Periodogram => periodogram_run(config.parameters()?),
        ExperimentKind::RngDemo => rng_demo(config.parameters()?),
    }
}

fn key_times(times: &[f64]) -> ColumnData {
    ColumnData::Real(times.to_vec())
}

fn n_column(n_values: &[usize]) -> ColumnData {
    ColumnData::Index(n_values.iter().map(|&n| n as u64).collect())
}

fn ascending(n_values: &[usize]) -> CliResult<()> {
    if n_values.is_empty() || n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config("n_values must be non-empty and strictly ascending".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinFidelityParams {
    pub chain: SpinChainSpec,
    #[serde(default = "default_state")]
    pub state: ProductStateRule,
    /// Sweep over chain lengths; defaults to the chain's own `n_sites`.
    #[serde(default)]
    pub n_values: Option<Vec<usize>>,
    pub times: TimeGrid,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// When set, also report sup_{τ ≤ tau_max} |F(τ/σ) − e^{−τ²}|.
    #[serde(default)]
    pub tau_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct SpinRow {
    n_sites: usize,
    sigma: f64,
    points: usize,
    file: String,
}

fn spin_fidelity(p: SpinFidelityParams) -> CliResult<ArtifactSet> {
    let n_values = p.n_values.clone().unwrap_or_else(|| vec![p.chain.n_sites]);
    ascending(&n_values)?;
    let runs: Vec<(usize, f64, FidelityCurve)> = n_values
        .par_iter()
        .map(|&n| -> CliResult<_> {
            let spec = p.chain.with_sites(n);
            let h = build_spin_hamiltonian(&spec)?;
            let phi = p.state.state(n)?;
            let sigma = variance(&h, &phi)?.sqrt();
            let times = p.times.resolve(Some(sigma))?;
            Ok((n, sigma, fidelity_curve(&h, &phi, &times, p.tol)?))
        })
        .collect::<CliResult<_>>()?;

    let mut set = ArtifactSet::default();
    let mut rows = Vec::new();
    for (n, sigma, curve) in &runs {
        let file = format!("fidelity_N{n}.csv");
        set.table(Table::new(&file, "t", key_times(&curve.times)).real("F", curve.values.clone()).primary("F"));
        rows.push(SpinRow { n_sites: *n, sigma: *sigma, points: curve.len(), file });
    }
    let convergence: Option<Vec<ConvergenceRow>> = match p.tau_max {
        Some(tau) => Some(gaussian_convergence(&runs.iter().map(|(_, s, c)| (c.clone(), *s)).collect::<Vec<_>>(), tau)?),
        None => None,
    };
    set.report("spin_fidelity.json", json!({ "chain": p.chain, "state": p.state, "runs": rows, "tau_max": p.tau_max, "convergence": convergence }))?;
    Ok(set)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HmhParams {
    pub chain: SpinChainSpec,
    #[serde(default = "default_state")]
    pub state: ProductStateRule,
    pub n_values: Vec<usize>,
}

fn hmh_check(p: HmhParams) -> CliResult<ArtifactSet> {
    ascending(&p.n_values)?;
    let report: HmhReport = hmh_condition_check(|n| p.chain.with_sites(n), &p.state, &p.n_values)?;
    let mut set = ArtifactSet::default();
    set.table(Table::new("sigma_sq.csv", "N", n_column(&report.n_values)).real("sigma_sq", report.sigma_sq.clone()).primary("sigma_sq"));
    set.report("hmh_report.json", &report)?;
    Ok(set)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DickeAnalyticParams {
    pub n_atoms: usize,
    pub coupling: f64,
    pub mode_freq: f64,
    #[serde(default)]
    pub state: RadiationSpec,
    pub times: TimeGrid,
    /// Adds an F_oracle column from direct propagation.
    #[serde(default)]
    pub include_oracle: bool,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

/// σ of χ under the effective radiation Hamiltonian.
fn radiation_sigma(chi: &RadiationState, params: &DickeParams) -> CliResult<f64> {
    let n_max = chi.highest_occupied() + 2;
    let h = build_effective_radiation_hamiltonian(&params.with_n_max(n_max))?;
    Ok(variance(&h, &chi.to_quantum_state(n_max)?)?.sqrt())
}

#[derive(Debug, Clone, Serialize)]
struct DickeAnalyticReport {
    params: DickeParams,
    state: RadiationSpec,
    sigma: f64,
    max_truncation_error_bound: f64,
    fwhm: Option<f64>,
    peaks: Vec<Peak>,
    oracle_n_max: Option<usize>,
}

fn dicke_analytic(p: DickeAnalyticParams) -> CliResult<ArtifactSet> {
    let params = DickeParams::new(p.n_atoms, p.coupling, p.mode_freq);
    params.validate()?;
    let chi = p.state.build()?;
    let sigma = radiation_sigma(&chi, &params)?;
    let times = p.times.resolve(Some(sigma))?;
    let amps = times.par_iter().map(|&t| survival_amplitude(&chi, t, &params)).collect::<Result<Vec<_>, _>>()?;
    let analytic: Vec<f64> = amps.iter().map(|a| a.fidelity()).collect();
    let gaussian: Vec<f64> = times.iter().map(|t| (-(sigma * t).powi(2)).exp()).collect();
    let mut table = Table::new("dicke_fidelity.csv", "t", key_times(&times))
        .real("F_analytic", analytic.clone())
        .real("F_gaussian", gaussian)
        .primary("F_analytic");
    let mut oracle_n_max = None;
    if p.include_oracle {
        let (oracle, n_max) = propagated_amplitudes(&chi, &times, &params, p.tol)?;
        table = table.real("F_oracle", oracle.iter().map(|a| a.norm_sqr()).collect());
        oracle_n_max = Some(n_max);
    }
    let curve = FidelityCurve::new(times, analytic, CurveSource::AnalyticFormula, "dicke")?;
    let report = DickeAnalyticReport {
        params,
        state: p.state,
        sigma,
        max_truncation_error_bound: amps.iter().map(|a| a.truncation_error_bound).fold(0.0, f64::max),
        fwhm: fwhm(&curve).ok(),
        peaks: recurrence_peaks(&curve, p.mode_freq)?,
        oracle_n_max,
    };
    let mut set = ArtifactSet::default();
    set.table(table);
    set.report("dicke_analytic.json", &report)?;
    Ok(set)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DickeOracleParams {
    pub n_atoms: usize,
    pub coupling: f64,
    pub mode_freq: f64,
    #[serde(default)]
    pub level_split: f64,
    #[serde(default)]
    pub state: RadiationSpec,
    pub times: TimeGrid,
    /// Propagate atoms and field together instead of the effective model.
    #[serde(default)]
    pub full_model: bool,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn dicke_oracle(p: DickeOracleParams) -> CliResult<ArtifactSet> {
    let params = DickeParams::new(p.n_atoms, p.coupling, p.mode_freq).with_level_split(p.level_split);
    params.validate()?;
    if p.level_split != 0.0 && !p.full_model {
        return Err(CliError::Config("level_split only enters the full model; set full_model = true".into()));
    }
    let chi = p.state.build()?;
    let times = p.times.resolve(Some(radiation_sigma(&chi, &params)?))?;
    let (amps, n_max) = if p.full_model {
        propagated_amplitudes_full(&chi, &times, &params, p.tol)?
    } else {
        propagated_amplitudes(&chi, &times, &params, p.tol)?
    };
    let mut set = ArtifactSet::default();
    set.table(
        Table::new("dicke_fidelity.csv", "t", key_times(&times))
            .real("F_oracle", amps.iter().map(|a| a.norm_sqr()).collect())
            .primary("F_oracle"),
    );
    set.report(
        "dicke_oracle.json",
        json!({
            "params": params,
            "state": p.state,
            "model": if p.full_model { "full" } else { "effective" },
            "n_max": n_max,
            "variance": variance_comparison(&chi, &params)?,
        }),
    )?;
    Ok(set)
}

fn default_dicke_horizon() -> f64 {
    3.0
}

fn default_spin_horizon() -> f64 {
    1.0
}

fn default_max_omega_t() -> f64 {
    0.2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScalingParams {
    /// Analytic Dicke curves; fit window min(horizon/σ, max_omega_t/ω).
    Dicke {
        coupling: f64,
        mode_freq: f64,
        #[serde(default)]
        state: RadiationSpec,
        n_values: Vec<usize>,
        #[serde(default = "default_dicke_horizon")]
        horizon: f64,
        #[serde(default = "default_max_omega_t")]
        max_omega_t: f64,
        #[serde(default = "default_points")]
        points: usize,
    },
    /// Exact spin-chain propagation over [0, horizon/σ].
    Spin {
        chain: SpinChainSpec,
        #[serde(default = "default_state")]
        state: ProductStateRule,
        n_values: Vec<usize>,
        #[serde(default = "default_spin_horizon")]
        horizon: f64,
        #[serde(default = "default_points")]
        points: usize,
        #[serde(default = "default_tol")]
        tol: f64,
    },
}

fn window_points(points: usize) -> CliResult<usize> {
    if points < 10 {
        return Err(CliError::Config(format!("scaling fits need at least 10 points per curve, got {points}")));
    }
    Ok(points)
}

fn scaling(p: ScalingParams) -> CliResult<ArtifactSet> {
    let (n_values, rows): (Vec<usize>, Vec<(f64, f64, f64, f64)>) = match &p {
        ScalingParams::Dicke { coupling, mode_freq, state, n_values, horizon, max_omega_t, points } => {
            ascending(n_values)?;
            let points = window_points(*points)?;
            let chi = state.build()?;
            let rows = n_values
                .par_iter()
                .map(|&n| -> CliResult<_> {
                    let params = DickeParams::new(n, *coupling, *mode_freq);
                    params.validate()?;
                    let sigma = radiation_sigma(&chi, &params)?;
                    let t_max = (horizon / sigma).min(max_omega_t / mode_freq);
                    let times = linspace(0.0, t_max, points);
                    let values = times
                        .iter()
                        .map(|&t| survival_amplitude(&chi, t, &params).map(|a| a.fidelity()))
                        .collect::<Result<Vec<_>, _>>()?;
                    let fit = fit_gaussian(&FidelityCurve::new(times, values, CurveSource::AnalyticFormula, "dicke")?)?;
                    Ok((sigma, fit.sigma, fit.rmse, t_max))
                })
                .collect::<CliResult<_>>()?;
            (n_values.clone(), rows)
        }
        ScalingParams::Spin { chain, state, n_values, horizon, points, tol } => {
            ascending(n_values)?;
            let points = window_points(*points)?;
            let rows = n_values
                .par_iter()
                .map(|&n| -> CliResult<_> {
                    let h = build_spin_hamiltonian(&chain.with_sites(n))?;
                    let phi = state.state(n)?;
                    let sigma = variance(&h, &phi)?.sqrt();
                    if sigma <= 0.0 {
                        return Err(CliError::Config(format!("state has zero energy width at N = {n}")));
                    }
                    let t_max = horizon / sigma;
                    let curve = fidelity_curve(&h, &phi, &linspace(0.0, t_max, points), *tol)?;
                    let fit = fit_gaussian(&curve)?;
                    Ok((sigma, fit.sigma, fit.rmse, t_max))
                })
                .collect::<CliResult<_>>()?;
            (n_values.clone(), rows)
        }
    };
    let sigma_fit: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let report = ScalingReport::from_sigmas(&n_values, &sigma_fit)?;
    let mut set = ArtifactSet::default();
    set.table(
        Table::new("scaling.csv", "N", n_column(&n_values))
            .real("sigma_exact", rows.iter().map(|r| r.0).collect())
            .real("sigma_fit", sigma_fit)
            .real("fit_rmse", rows.iter().map(|r| r.2).collect())
            .real("t_max", rows.iter().map(|r| r.3).collect())
            .primary("sigma_fit"),
    );
    let model = match p {
        ScalingParams::Dicke { .. } => "dicke",
        ScalingParams::Spin { .. } => "spin",
    };
    set.report("scaling.json", json!({ "model": model, "report": report, "fit_floor": fidelab_core::scaling::FIT_FLOOR }))?;
    Ok(set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    #[default]
    Exact,
    Naive,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SineParams {
    pub frequency: ExactFrequency,
    pub sample_rate: u64,
    pub count: usize,
    #[serde(default)]
    pub phase0: Option<[u64; 2]>,
}

impl SineParams {
    fn spec(&self) -> SineSamplingSpec {
        let spec = SineSamplingSpec::new(self.frequency.clone(), self.sample_rate, self.count);
        match self.phase0 {
            Some([num, den]) => spec.with_phase0(num, den),
            None => spec,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodogramParams {
    #[serde(flatten)]
    pub sine: SineParams,
    #[serde(default)]
    pub window: Window,
    #[serde(default)]
    pub pipeline: Pipeline,
}

fn index_column(count: usize) -> ColumnData {
    ColumnData::Index((0..count as u64).collect())
}

fn periodogram_run(p: PeriodogramParams) -> CliResult<ArtifactSet> {
    let spec = p.sine.spec();
    let samples = match p.pipeline {
        Pipeline::Exact => sample_sine(&spec)?,
        Pipeline::Naive => sample_sine_naive(&spec)?,
    };
    let pg = periodogram(&samples, spec.sample_rate as f64, p.window)?;
    let (bin, peak_hz, peak_power) = pg.peak();
    let mut set = ArtifactSet::default();
    set.table(Table::new("samples.csv", "index", index_column(samples.len())).real("sample", samples).primary("sample"));
    set.table(Table::new("periodogram.csv", "freq_hz", ColumnData::Real(pg.freqs.clone())).real("power", pg.power.clone()).primary("power"));
    set.report(
        "periodogram.json",
        json!({
            "frequency": spec.frequency,
            "sample_rate": spec.sample_rate,
            "count": spec.count,
            "pipeline": if p.pipeline == Pipeline::Exact { "exact" } else { "naive" },
            "window": pg.window,
            "bin_width_hz": pg.bin_width(),
            "peak_bin": bin,
            "peak_hz": peak_hz,
            "peak_power": peak_power,
            "peak_to_median_db": pg.peak_to_median_db(),
        }),
    )?;
    Ok(set)
}

fn default_bins() -> usize {
    64
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RngParams {
    #[serde(flatten)]
    pub sine: SineParams,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

fn rng_demo(p: RngParams) -> CliResult<ArtifactSet> {
    let spec = p.sine.spec();
    let u = undersampled_uniform(&spec)?;
    let report = chi_square_uniformity(&u, p.bins)?;
    let (step_num, step_den) = spec.step_turns();
    let mut set = ArtifactSet::default();
    set.table(Table::new("uniform.csv", "index", index_column(u.len())).real("u", u).primary("u"));
    set.report(
        "uniformity.json",
        json!({
            "chi2": report.chi2,
            "dof": report.dof,
            "p_value": report.p_value,
            "bins": p.bins,
            "counts": report.counts,
            "mean": report.mean,
            "variance": report.variance,
            "phase_step": format!("{step_num}/{step_den}"),
        }),
    )?;
    Ok(set)
}
