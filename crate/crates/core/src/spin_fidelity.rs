//! Fidelity decay of product states under nearest-neighbour spin chains.
//!
//! For a chain `H = Σ_i H_i` with bounded local terms and a product state
//! whose energy variance grows at least linearly in N, the survival
//! probability approaches `e^{−σ²t²}` as N grows. This module samples the
//! exact curves, checks the variance-growth hypothesis over a sweep of N, and
//! measures how far finite chains are from the Gaussian.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{linspace, CurveSource, FidelityCurve};
use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::quantum::{build_spin_hamiltonian, propagate_grid, variance, OperatorHandle, QuantumState, SpinChainSpec};
use crate::C64;

/// Direction on the Bloch sphere: `cos(θ/2)|↑⟩ + e^{iφ} sin(θ/2)|↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bloch {
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
}

impl Bloch {
    pub fn spinor(&self) -> [C64; 2] {
        [
            C64::new((0.5 * self.theta).cos(), 0.0),
            C64::from_polar((0.5 * self.theta).sin(), self.phi),
        ]
    }
}

/// Per-site rule for building product states of any length. With `odd_sites`
/// set, odd sites use that direction instead (site-alternating pattern).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductStateRule {
    pub site: Bloch,
    #[serde(default)]
    pub odd_sites: Option<Bloch>,
}

impl ProductStateRule {
    /// Every spin along +z.
    pub fn all_up_z() -> Self {
        Self::uniform(0.0, 0.0)
    }

    pub fn uniform(theta: f64, phi: f64) -> Self {
        Self { site: Bloch { theta, phi }, odd_sites: None }
    }

    pub fn alternating(even: Bloch, odd: Bloch) -> Self {
        Self { site: even, odd_sites: Some(odd) }
    }

    pub fn state(&self, n_sites: usize) -> Result<QuantumState> {
        let spinors: Vec<_> = (0..n_sites)
            .map(|i| match (i % 2, self.odd_sites) {
                (1, Some(odd)) => odd.spinor(),
                _ => self.site.spinor(),
            })
            .collect();
        QuantumState::spin_product(&spinors)
    }
}

/// 200 points over [0, 3/σ_est].
pub fn default_time_grid(sigma_est: f64) -> Result<Vec<f64>> {
    if !(sigma_est.is_finite() && sigma_est > 0.0) {
        return Err(Error::invalid(format!("time grid needs a positive sigma estimate, got {sigma_est}")));
    }
    Ok(linspace(0.0, 3.0 / sigma_est, 200))
}

/// |⟨φ|e^{−iHt}|φ⟩|² on `times`, which must start at 0 and ascend.
pub fn fidelity_curve(h: &OperatorHandle, phi: &QuantumState, times: &[f64], tol: f64) -> Result<FidelityCurve> {
    if times.first() != Some(&0.0) {
        return Err(Error::invalid("fidelity grid must start at t = 0"));
    }
    let mut values = vec![0.0; times.len()];
    propagate_grid(h, phi, times, tol, |k, amps| {
        let overlap: C64 = phi.amplitudes().iter().zip(amps).map(|(a, b)| a.conj() * b).sum();
        values[k] = overlap.norm_sqr();
    })?;
    FidelityCurve::new(times.to_vec(), values, CurveSource::ExactPropagation, h.description())
}

/// Outcome of checking σ_φ² ≥ N·C and boundedness of the local terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmhReport {
    pub n_values: Vec<usize>,
    pub sigma_sq: Vec<f64>,
    /// Largest C with σ² ≥ N·C for every N in the sweep.
    pub c_lower: f64,
    /// Largest operator norm among the local terms H_i.
    pub local_bound: f64,
    pub passed: bool,
}

pub fn hmh_condition_check(
    family: impl Fn(usize) -> SpinChainSpec + Sync,
    rule: &ProductStateRule,
    n_values: &[usize],
) -> Result<HmhReport> {
    if n_values.is_empty() {
        return Err(Error::invalid("n_values must not be empty"));
    }
    if n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("n_values must be strictly ascending"));
    }
    let rows: Vec<(f64, f64)> = n_values
        .par_iter()
        .map(|&n| {
            let spec = family(n);
            if spec.n_sites != n {
                return Err(Error::invalid(format!("family returned {} sites for N = {n}", spec.n_sites)));
            }
            let h = build_spin_hamiltonian(&spec)?;
            Ok((variance(&h, &rule.state(n)?)?, spec.local_term_bound()))
        })
        .collect::<Result<_>>()?;
    let sigma_sq: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let local_bound = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let c_lower = sigma_sq
        .iter()
        .zip(n_values)
        .map(|(s, &n)| s / n as f64)
        .fold(f64::INFINITY, f64::min);
    let passed = c_lower > 0.0 && local_bound.is_finite();
    Ok(HmhReport { n_values: n_values.to_vec(), sigma_sq, c_lower, local_bound, passed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub label: String,
    pub sigma: f64,
    /// sup over τ ∈ [0, τ_max] of |F(τ/σ) − e^{−τ²}|.
    pub deviation: f64,
}

/// Distance of each curve from the Gaussian law in the rescaled time τ = σt.
/// Curves are interpolated with a monotone cubic and compared on a grid ten
/// times finer than their own sampling of [0, τ_max].
pub fn gaussian_convergence(curves: &[(FidelityCurve, f64)], tau_max: f64) -> Result<Vec<ConvergenceRow>> {
    if !(tau_max.is_finite() && tau_max > 0.0) {
        return Err(Error::invalid("tau_max must be positive"));
    }
    curves
        .iter()
        .map(|(curve, sigma)| {
            if !(*sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::invalid(format!("curve '{}' needs sigma > 0", curve.params_label)));
            }
            let t_max = tau_max / sigma;
            let last = *curve.times.last().expect("curves are nonempty");
            if curve.times[0] > 0.0 || last < t_max * (1.0 - 1e-12) {
                return Err(Error::Range(format!(
                    "curve '{}' covers t ∈ [{}, {last}] but τ_max needs [0, {t_max}]",
                    curve.params_label, curve.times[0]
                )));
            }
            let interp = MonotoneCubic::new(&curve.times, &curve.values)?;
            let covered = curve.times.iter().filter(|&&t| t <= t_max).count().max(2);
            let deviation = linspace(0.0, tau_max, 10 * covered)
                .into_iter()
                .map(|tau| {
                    let f = interp.eval((tau / sigma).min(last)).expect("inside sampled domain");
                    (f - (-tau * tau).exp()).abs()
                })
                .fold(0.0, f64::max);
            Ok(ConvergenceRow { label: curve.params_label.clone(), sigma: *sigma, deviation })
        })
        .collect()
}
