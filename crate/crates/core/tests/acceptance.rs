//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p fidelab-core --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fidelab_core::curve::linspace;
use fidelab_core::dicke::{
    displaced_element, fidelity_fock_smalltime, fidelity_ground_exact, fock_gaussian_comparator,
    propagated_amplitudes, sigma_fock, sigma_superposition, survival_amplitude,
};
use fidelab_core::quantum::{build_effective_radiation_hamiltonian, build_full_dicke_hamiltonian, build_spin_hamiltonian};
use fidelab_core::sampling::{
    chi_square_uniformity, periodogram, sample_sine, undersampled_uniform, ExactFrequency, SineSamplingSpec, Window,
};
use fidelab_core::scaling::{fit_gaussian, fwhm, loglog_slope, recurrence_peaks};
use fidelab_core::spin_fidelity::{default_time_grid, fidelity_curve, gaussian_convergence, hmh_condition_check};
use fidelab_core::{
    evolve, variance, CurveSource, DickeParams, FidelityCurve, OperatorHandle, ProductStateRule, QuantumState,
    RadiationState, Result, SpinChainSpec, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PROPAGATION_TOL: f64 = 1e-12;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn check(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

fn dicke_states() -> Vec<(&'static str, RadiationState)> {
    vec![
        ("|0>", RadiationState::fock(0)),
        ("|1>", RadiationState::fock(1)),
        ("|3>", RadiationState::fock(3)),
        ("(|1>+|0>)/sqrt2", RadiationState::adjacent_superposition(1).unwrap()),
    ]
}

fn dicke_oracle_equivalence() -> Result<Outcome> {
    let times = linspace(0.0, 4.0 * PI, 400);
    let mut worst = (0.0, String::new());
    for n_atoms in [1, 2, 4, 8] {
        let p = DickeParams::new(n_atoms, 0.1, 1.0);
        for (label, chi) in dicke_states() {
            let (oracle, _) = propagated_amplitudes(&chi, &times, &p, PROPAGATION_TOL)?;
            for (&t, o) in times.iter().zip(&oracle) {
                let err = (survival_amplitude(&chi, t, &p)?.value - o).norm();
                if err > worst.0 {
                    worst = (err, format!("N={n_atoms}, chi={label}, t={t:.4}"));
                }
            }
        }
    }
    Ok(Outcome::check(worst.0 <= 1e-8, format!("max |A - A_oracle| = {:.3e} at {} (tol 1e-8)", worst.0, worst.1)))
}

fn ground_state_exactness() -> Result<Outcome> {
    let times = linspace(0.0, 4.0 * PI, 400);
    let chi = RadiationState::fock(0);
    let mut worst: f64 = 0.0;
    for n_atoms in [1, 2, 4, 8] {
        let p = DickeParams::new(n_atoms, 0.1, 1.0);
        for &t in &times {
            worst = worst.max((survival_amplitude(&chi, t, &p)?.fidelity() - fidelity_ground_exact(t, &p)).abs());
        }
    }
    Ok(Outcome::check(worst <= 1e-10, format!("max |F - F_closed| = {worst:.3e} (tol 1e-10)")))
}

fn sigma_formulas() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n_atoms in [1, 3, 10] {
        for g in [0.05, 0.5] {
            let p = DickeParams::new(n_atoms, g, 1.0);
            let h = build_effective_radiation_hamiltonian(&p.with_n_max(8))?;
            for n in 0..=5 {
                let fock = RadiationState::fock(n).to_quantum_state(8)?;
                let exact = variance(&h, &fock)?.sqrt();
                worst = worst.max((sigma_fock(n, &p) - exact).abs() / exact);
                if n >= 1 {
                    let sup = RadiationState::adjacent_superposition(n)?.to_quantum_state(8)?;
                    let exact = variance(&h, &sup)?.sqrt();
                    worst = worst.max((sigma_superposition(n, &p)? - exact).abs() / exact);
                }
            }
        }
    }
    Ok(Outcome::check(worst <= 1e-9, format!("max relative sigma error = {worst:.3e} (tol 1e-9)")))
}

fn small_time_window() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (n_atoms, g) in [(1, 0.1), (4, 0.25), (10, 0.1), (20, 0.5)] {
        let p = DickeParams::new(n_atoms, g, 1.0);
        let t_max = (0.05 / p.collective_coupling()).min(0.1 / p.mode_freq);
        for n in 0..=3 {
            for t in linspace(0.0, t_max, 200) {
                let f = fidelity_fock_smalltime(n, t, &p)?;
                worst = worst.max((f - fock_gaussian_comparator(n, t, &p)).abs());
            }
        }
    }
    Ok(Outcome::check(worst <= 0.01, format!("max |F_n - exp(-(2n+1)(Ngt)^2)| = {worst:.3e} (tol 0.01)")))
}

fn ground_curve(p: &DickeParams, times: Vec<f64>) -> Result<FidelityCurve> {
    FidelityCurve::from_fn(times, CurveSource::AnalyticFormula, "ground", |t| fidelity_ground_exact(t, p))
}

fn recurrence_law() -> Result<Outcome> {
    let p = DickeParams::new(100, 0.1, 1.0);
    let mut worst_height: f64 = 0.0;
    for k in 0..=3 {
        worst_height = worst_height.max((fidelity_ground_exact(2.0 * PI * k as f64, &p) - 1.0).abs());
    }
    let curve = ground_curve(&p, linspace(0.0, 6.0 * PI, 60_001))?;
    let peaks = recurrence_peaks(&curve, 1.0)?;
    let step = curve.times[1];
    let located = peaks.iter().map(|pk| pk.revival_index).eq(0..=3) && peaks.iter().all(|pk| pk.offset.abs() <= step);

    let width = |ng: f64| -> Result<f64> {
        let q = DickeParams::new(100, ng / 100.0, 1.0);
        fwhm(&ground_curve(&q, linspace(0.0, 0.5, 50_001))?)
    };
    let mut ratios = Vec::new();
    for ng in [10.0, 20.0] {
        ratios.push(width(ng)? / width(2.0 * ng)?);
    }
    let ratios_ok = ratios.iter().all(|r| (r - 2.0).abs() <= 0.02);
    Ok(Outcome::check(
        worst_height <= 1e-9 && located && ratios_ok,
        format!(
            "peak height error {worst_height:.1e}, revivals at k={:?}, FWHM ratios {:.5} / {:.5} (target 2 +- 1%)",
            peaks.iter().map(|pk| pk.revival_index).collect::<Vec<_>>(),
            ratios[0],
            ratios[1]
        ),
    ))
}

fn dicke_scaling_exponent() -> Result<Outcome> {
    let chi = RadiationState::fock(0);
    let n_values = [5usize, 10, 20, 40];
    let mut sigmas = Vec::new();
    for &n in &n_values {
        let p = DickeParams::new(n, 0.1, 1.0);
        let t_max = (3.0 / sigma_fock(0, &p)).min(0.2 / p.mode_freq);
        let mut values = Vec::new();
        let times = linspace(0.0, t_max, 200);
        for &t in &times {
            values.push(survival_amplitude(&chi, t, &p)?.fidelity());
        }
        let curve = FidelityCurve::new(times, values, CurveSource::AnalyticFormula, format!("N={n}"))?;
        sigmas.push(fit_gaussian(&curve)?.sigma);
    }
    let fit = loglog_slope(&n_values.map(|n| n as f64), &sigmas)?;
    Ok(Outcome::check(
        (fit.exponent - 1.0).abs() <= 0.02,
        format!("exponent = {:.5} (target 1.00 +- 0.02), sigma_fit = {sigmas:.4?}", fit.exponent),
    ))
}

fn spin_hmh_and_trend() -> Result<Outcome> {
    let family = |n| SpinChainSpec::transverse_ising(n, 1.0, 1.0);
    let rule = ProductStateRule::all_up_z();

    let sweep: Vec<usize> = (4..=12).collect();
    let report = hmh_condition_check(family, &rule, &sweep)?;
    let num: f64 = report.n_values.iter().zip(&report.sigma_sq).map(|(&n, s)| n as f64 * s).sum();
    let den: f64 = report.n_values.iter().map(|&n| (n * n) as f64).sum();
    let slope = num / den;
    let part_a = (slope - 1.0).abs() <= 1e-6 && report.passed;

    let curve_for = |n: usize, horizon: Option<f64>| -> Result<(FidelityCurve, f64)> {
        let h = build_spin_hamiltonian(&family(n))?;
        let phi = rule.state(n)?;
        let sigma = variance(&h, &phi)?.sqrt();
        let times = match horizon {
            Some(tau) => linspace(0.0, tau / sigma, 200),
            None => default_time_grid(sigma)?,
        };
        Ok((fidelity_curve(&h, &phi, &times, 1e-10)?, sigma))
    };

    let trend: Vec<(FidelityCurve, f64)> = [6, 10, 14].into_iter().map(|n| curve_for(n, None)).collect::<Result<_>>()?;
    let deviations: Vec<f64> = gaussian_convergence(&trend, 1.5)?.iter().map(|r| r.deviation).collect();
    let part_b = deviations.windows(2).all(|w| w[1] < w[0]);

    let fit_n = [6usize, 8, 10, 12];
    let mut fitted = Vec::new();
    for &n in &fit_n {
        fitted.push(fit_gaussian(&curve_for(n, Some(1.0))?.0)?.sigma);
    }
    let exponent = loglog_slope(&fit_n.map(|n| n as f64), &fitted)?.exponent;
    let part_c = (exponent - 0.5).abs() <= 0.05;

    Ok(Outcome::check(
        part_a && part_b && part_c,
        format!(
            "(a) slope {slope:.9} [{}]; (b) sup dev N=6,10,14 = {deviations:.4?} [{}]; (c) exponent {exponent:.4} [{}]",
            verdict(part_a),
            verdict(part_b),
            verdict(part_c)
        ),
    ))
}

/// Single spin under h_x X + h_z Z from Bloch angles (θ, φ):
/// F_1 = cos²(Bt) + sin²(Bt)(b̂·r)².
fn single_spin_fidelity(hx: f64, hz: f64, theta: f64, phi: f64, t: f64) -> f64 {
    let b = hx.hypot(hz);
    let proj = (hx * theta.sin() * phi.cos() + hz * theta.cos()) / b;
    let (s, c) = (b * t).sin_cos();
    c * c + s * s * proj * proj
}

fn factorization() -> Result<Outcome> {
    let (hx, hz, theta, phi) = (0.8, 0.35, 0.9, 0.4);
    let rule = ProductStateRule::uniform(theta, phi);
    let times = linspace(0.0, 4.0, 41);
    let mut worst: f64 = 0.0;
    for n in 2..=10 {
        let spec = SpinChainSpec { field_z: hz, ..SpinChainSpec::transverse_ising(n, 0.0, hx) };
        let curve = fidelity_curve(&build_spin_hamiltonian(&spec)?, &rule.state(n)?, &times, 1e-12)?;
        for (&t, f) in times.iter().zip(&curve.values) {
            worst = worst.max((f - single_spin_fidelity(hx, hz, theta, phi, t).powi(n as i32)).abs());
        }
    }
    Ok(Outcome::check(worst <= 1e-10, format!("max |F_N - F_1^N| over N=2..10 = {worst:.3e} (tol 1e-10)")))
}

fn displacement_unitarity() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for r in [0.1, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0] {
        for angle in [0.0, 0.7, 2.4, -1.3] {
            let alpha = C64::from_polar(r, angle);
            for n in 0..=50 {
                let edge = (n as f64).sqrt() + r;
                let m_max = (edge * edge + 10.0 * edge + 30.0) as usize;
                let total: f64 = (0..=m_max).map(|m| displaced_element(m, n, alpha).norm_sqr()).sum();
                worst = worst.max((total - 1.0).abs());
            }
        }
    }
    Ok(Outcome::check(worst <= 1e-8, format!("max |sum_m |D_mn|^2 - 1| = {worst:.3e} (tol 1e-8)")))
}

fn sampling_reproduction() -> Result<Outcome> {
    let spec = SineSamplingSpec::new(ExactFrequency::hz(100_000), 1_000_000, 4096);
    let pg = periodogram(&sample_sine(&spec)?, 1e6, Window::None)?;
    let (_, f_peak, _) = pg.peak();
    let db = pg.peak_to_median_db();
    let part_a = (f_peak - 1e5).abs() <= pg.bin_width() && db >= 40.0;

    let fast: ExactFrequency = "1e43+7919".parse()?;
    let spec = SineSamplingSpec::new(fast.clone(), 1_000_000, 100_000);
    let report = chi_square_uniformity(&undersampled_uniform(&spec)?, 64)?;
    let aliased = SineSamplingSpec::new(fast.plus_hz(&1_000_000u64.into()), 1_000_000, 100_000);
    let identical = sample_sine(&spec)?.iter().zip(&sample_sine(&aliased)?).all(|(a, b)| a.to_bits() == b.to_bits());
    let part_b = report.p_value >= 0.001 && identical;

    Ok(Outcome::check(
        part_a && part_b,
        format!(
            "(a) peak {f_peak:.1} Hz, {db:.1} dB over median [{}]; (b) chi2 = {:.2}, p = {:.4}, f vs f+fs identical = {identical} [{}]",
            verdict(part_a),
            report.chi2,
            report.p_value,
            verdict(part_b)
        ),
    ))
}

fn random_state(rng: &mut ChaCha8Rng, basis_dim: usize, template: &QuantumState) -> Result<QuantumState> {
    let amps: Vec<C64> = (0..basis_dim).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    QuantumState::normalized(amps, template.basis())
}

fn propagator_contracts() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_norm: f64 = 0.0;
    let mut worst_comp: f64 = 0.0;
    let mut trial = |h: &OperatorHandle, template: &QuantumState, rng: &mut ChaCha8Rng| -> Result<()> {
        let psi = random_state(rng, h.dim(), template)?;
        let t1 = rng.random_range(0.05..2.0);
        let t2 = rng.random_range(0.05..2.0);
        let once = evolve(h, &psi, t1 + t2, PROPAGATION_TOL)?;
        let twice = evolve(h, &evolve(h, &psi, t1, PROPAGATION_TOL)?, t2, PROPAGATION_TOL)?;
        worst_norm = worst_norm.max((once.norm() - 1.0).abs()).max((twice.norm() - 1.0).abs());
        let diff = once.amplitudes().iter().zip(twice.amplitudes()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
        worst_comp = worst_comp.max(diff.sqrt());
        Ok(())
    };
    for _ in 0..20 {
        let n = rng.random_range(3..=11);
        let spec = SpinChainSpec {
            coupling_xx: rng.random_range(-1.0..1.0),
            field_z: rng.random_range(-1.0..1.0),
            ..SpinChainSpec::transverse_ising(n, rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5))
        };
        let template = ProductStateRule::all_up_z().state(n)?;
        trial(&build_spin_hamiltonian(&spec)?, &template, &mut rng)?;
    }
    for _ in 0..20 {
        let p = DickeParams::new(rng.random_range(1..=8), rng.random_range(0.01..0.3), rng.random_range(0.5..2.0));
        let p = p.with_n_max(p.initial_truncation(0));
        let template = RadiationState::fock(0).to_quantum_state(p.n_max)?;
        trial(&build_effective_radiation_hamiltonian(&p)?, &template, &mut rng)?;
    }
    for _ in 0..20 {
        let p = DickeParams::new(rng.random_range(1..=3), rng.random_range(0.01..0.3), 1.0)
            .with_level_split(rng.random_range(0.0..1.0))
            .with_n_max(rng.random_range(8..=24));
        let atoms = ProductStateRule::all_up_z().state(p.n_atoms)?;
        let template = QuantumState::spin_fock_product(&atoms, &RadiationState::fock(0).to_quantum_state(p.n_max)?)?;
        trial(&build_full_dicke_hamiltonian(&p)?, &template, &mut rng)?;
    }
    Ok(Outcome::check(
        worst_norm <= 1e-10 && worst_comp <= 1e-9,
        format!("60 trials over spin/effective/full Dicke: norm drift {worst_norm:.2e} (tol 1e-10), composition {worst_comp:.2e} (tol 1e-9)"),
    ))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, Option<Duration>, fn() -> Result<Outcome>);
    let criteria: [Criterion; 11] = [
        (1, "Dicke oracle equivalence", Some(Duration::from_secs(60)), dicke_oracle_equivalence),
        (2, "vacuum fidelity closed form", None, ground_state_exactness),
        (3, "sigma formulas vs variance", None, sigma_formulas),
        (4, "small-time Gaussian window", None, small_time_window),
        (5, "recurrence law and 1/N width", None, recurrence_law),
        (6, "Dicke scaling exponent", None, dicke_scaling_exponent),
        (7, "spin variance growth and Gaussian trend", Some(Duration::from_secs(600)), spin_hmh_and_trend),
        (8, "J=0 factorization", None, factorization),
        (9, "displacement unitarity", None, displacement_unitarity),
        (10, "undersampled sine reproduction", None, sampling_reproduction),
        (11, "propagator contracts", None, propagator_contracts),
    ];
    let mut failures = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome::check(false, format!("error: {e}")));
        let elapsed = start.elapsed();
        let in_budget = budget.map_or(true, |b| elapsed <= b);
        let passed = outcome.passed && in_budget;
        if !passed {
            failures += 1;
        }
        let budget_note = budget.map(|b| format!(" / budget {}s", b.as_secs())).unwrap_or_default();
        println!(
            "{} criterion {id:>2} {name}: {} [{:.2}s{budget_note}]",
            if passed { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
