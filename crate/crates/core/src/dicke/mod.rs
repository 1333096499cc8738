//! Closed-form fidelity of radiation states in the integrable limit of the
//! Dicke model.
//!
//! With every atom frozen in the Σσ_x = N sector the propagator factorizes as
//! `U(t) = e^{iξ(t)} e^{−iωa†a t} D(α(t))` with
//!
//! * `ξ(t) = (Ng/ω)² (ωt − sin ωt)`
//! * `α(t) = (Ng/ω)(1 − e^{iωt})`
//!
//! so the survival amplitude of `|χ⟩ = Σ c_n |n⟩` is a finite double sum over
//! displaced Fock matrix elements.

mod displacement;
mod laguerre;
mod oracle;

pub use displacement::displaced_element;
pub use laguerre::{laguerre, laguerre_assoc, laguerre_assoc_scaled, Scaled};
pub use oracle::{propagated_amplitudes, propagated_amplitudes_full, settle_truncation, variance_comparison, VarianceComparison};

use serde::{Deserialize, Serialize};

pub use crate::quantum::DickeParams;
use crate::error::{Error, Result};
use crate::quantum::{Basis, QuantumState};
use crate::C64;

/// Coefficients below this magnitude are left out of the series.
const COEFF_CUTOFF: f64 = 1e-14;
/// Accepted remainder bound for the truncated series.
const SERIES_TOLERANCE: f64 = 1e-10;
const MAX_WINDOW_DOUBLINGS: usize = 6;

/// Radiation-mode state `Σ_{n ≤ n_max} c_n |n⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiationState {
    coeffs: Vec<C64>,
}

impl RadiationState {
    /// Requires Σ|c_n|² = 1 within 1e-12.
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        let weight: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if coeffs.is_empty() || (weight - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("radiation state weight is {weight}, expected 1")));
        }
        Ok(Self { coeffs })
    }

    pub fn normalized(coeffs: Vec<C64>) -> Result<Self> {
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid("cannot normalize an empty or zero radiation state"));
        }
        Ok(Self { coeffs: coeffs.into_iter().map(|c| c / norm).collect() })
    }

    /// Fock state |n⟩.
    pub fn fock(n: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        coeffs[n] = C64::new(1.0, 0.0);
        Self { coeffs }
    }

    /// (|n⟩ + |n−1⟩)/√2 for n ≥ 1.
    pub fn adjacent_superposition(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("adjacent superposition needs n >= 1"));
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        coeffs[n] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        coeffs[n - 1] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Highest Fock level with a non-negligible coefficient.
    pub fn highest_occupied(&self) -> usize {
        self.coeffs.iter().rposition(|c| c.norm() > COEFF_CUTOFF).unwrap_or(0)
    }

    /// Embeds the state in the Fock basis truncated at `n_max`.
    pub fn to_quantum_state(&self, n_max: usize) -> Result<QuantumState> {
        if self.highest_occupied() > n_max {
            return Err(Error::Range(format!(
                "state occupies level {} above truncation {n_max}",
                self.highest_occupied()
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); n_max + 1];
        for (a, c) in amps.iter_mut().zip(&self.coeffs) {
            *a = *c;
        }
        QuantumState::normalized(amps, Basis::Fock { n_max })
    }
}

/// Value of ⟨χ|U(t)|χ⟩ together with a bound on the omitted series terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalAmplitude {
    pub value: C64,
    pub truncation_error_bound: f64,
}

impl SurvivalAmplitude {
    pub fn fidelity(&self) -> f64 {
        self.value.norm_sqr()
    }
}

/// ξ(t) = (Ng/ω)² (ωt − sin ωt). A Taylor series replaces the difference
/// for |ωt| < 0.1 to avoid cancellation.
pub fn xi(t: f64, p: &DickeParams) -> f64 {
    let lambda = p.collective_coupling() / p.mode_freq;
    let x = p.mode_freq * t;
    let core = if x.abs() < 0.1 {
        let x2 = x * x;
        x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))))
    } else {
        x - x.sin()
    };
    lambda * lambda * core
}

/// α(t) = (Ng/ω)(1 − e^{iωt}); |α|² = 2(Ng/ω)²(1 − cos ωt).
pub fn alpha(t: f64, p: &DickeParams) -> C64 {
    let lambda = p.collective_coupling() / p.mode_freq;
    let x = p.mode_freq * t;
    let half = (0.5 * x).sin();
    C64::new(2.0 * lambda * half * half, -lambda * x.sin())
}

/// ⟨χ|U(t)|χ⟩ without the global phase e^{iξ(t)}.
pub fn survival_series(chi: &RadiationState, t: f64, p: &DickeParams) -> Result<SurvivalAmplitude> {
    p.validate()?;
    if !t.is_finite() {
        return Err(Error::invalid("time must be finite"));
    }
    let a = alpha(t, p);
    let omega_t = p.mode_freq * t;
    let support: Vec<(usize, C64)> = chi
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > COEFF_CUTOFF)
        .map(|(n, &c)| (n, c))
        .collect();
    let dropped: f64 = chi.coeffs().iter().filter(|c| c.norm() <= COEFF_CUTOFF).map(|c| c.norm_sqr()).sum();
    let dropped_bound = 2.0 * dropped.sqrt();

    let mut window = (10.0 * a.norm() + 20.0).ceil() as usize;
    for _ in 0..=MAX_WINDOW_DOUBLINGS {
        let mut sum = C64::new(0.0, 0.0);
        let mut bound = dropped_bound;
        for &(n, cn) in &support {
            let mut omitted = 0.0;
            for &(m, cm) in &support {
                if m.abs_diff(n) > window {
                    omitted += cm.norm_sqr();
                    continue;
                }
                let rotation = C64::from_polar(1.0, -(m as f64) * omega_t);
                sum += cm.conj() * cn * rotation * displaced_element(m, n, a);
            }
            // Cauchy–Schwarz with ‖D(α)|n⟩‖ = 1
            bound += cn.norm() * omitted.sqrt();
        }
        if bound <= SERIES_TOLERANCE {
            return Ok(SurvivalAmplitude { value: sum, truncation_error_bound: bound });
        }
        window *= 2;
    }
    Err(Error::NonConvergence(format!(
        "survival series remainder above {SERIES_TOLERANCE} after {MAX_WINDOW_DOUBLINGS} window doublings"
    )))
}

/// ⟨χ|U(t)|χ⟩ = e^{iξ(t)} Σ_{m,n} c_m* c_n e^{−imωt} ⟨m|D(α(t))|n⟩.
pub fn survival_amplitude(chi: &RadiationState, t: f64, p: &DickeParams) -> Result<SurvivalAmplitude> {
    let series = survival_series(chi, t, p)?;
    Ok(SurvivalAmplitude { value: series.value * C64::from_polar(1.0, xi(t, p)), ..series })
}

/// Exact vacuum fidelity F_0(t) = exp(−2(Ng/ω)²(1 − cos ωt)).
pub fn fidelity_ground_exact(t: f64, p: &DickeParams) -> f64 {
    let lambda = p.collective_coupling() / p.mode_freq;
    let half = (0.5 * p.mode_freq * t).sin();
    (-4.0 * lambda * lambda * half * half).exp()
}

/// Small-time Fock fidelity F_n ≈ e^{−x} L_n(x)² with x = (Ngt)².
pub fn fidelity_fock_smalltime(n: usize, t: f64, p: &DickeParams) -> Result<f64> {
    let x = (p.collective_coupling() * t).powi(2);
    let l = laguerre(n, x)?;
    Ok((-x).exp() * l * l)
}

/// Gaussian comparator e^{−(2n+1)(Ngt)²} for the small-time Fock fidelity.
pub fn fock_gaussian_comparator(n: usize, t: f64, p: &DickeParams) -> f64 {
    let x = (p.collective_coupling() * t).powi(2);
    (-((2 * n + 1) as f64) * x).exp()
}

/// σ for the Fock state |n⟩: √(2n+1)·|Ng|.
pub fn sigma_fock(n: usize, p: &DickeParams) -> f64 {
    ((2 * n + 1) as f64).sqrt() * p.collective_coupling().abs()
}

/// σ for (|n⟩ + |n−1⟩)/√2: √(n(Ng)² + ω²/4).
pub fn sigma_superposition(n: usize, p: &DickeParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("superposition sigma needs n >= 1"));
    }
    Ok((n as f64 * p.collective_coupling().powi(2) + 0.25 * p.mode_freq * p.mode_freq).sqrt())
}

/// e^{−σ²t²}
pub fn gaussian_limit_fidelity(sigma: f64, t: f64) -> f64 {
    (-(sigma * t).powi(2)).exp()
}
