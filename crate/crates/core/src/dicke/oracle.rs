//! Brute-force propagation references for the analytic Dicke results.

use serde::{Deserialize, Serialize};

use super::{alpha, RadiationState};
use crate::error::{Error, Result};
use crate::quantum::{
    build_effective_radiation_hamiltonian, build_full_dicke_hamiltonian, evolve, propagate_grid, variance,
    DickeParams, QuantumState,
};
use crate::C64;

/// Truncation is accepted once doubling changes the amplitude by less than this.
const TRUNCATION_CHANGE: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 6;

fn amplitude_at(chi: &RadiationState, p: &DickeParams, t: f64, tol: f64) -> Result<C64> {
    let h = build_effective_radiation_hamiltonian(p)?;
    let psi = chi.to_quantum_state(p.n_max)?;
    psi.inner(&evolve(&h, &psi, t, tol)?)
}

/// Fock cutoff for propagating `chi` over `times`: starts from
/// `n_state + ceil(10·|α|_max + 20)` and doubles until the amplitude at the
/// sampled time with the largest displacement moves by less than 1e-10.
pub fn settle_truncation(chi: &RadiationState, p: &DickeParams, times: &[f64], tol: f64) -> Result<usize> {
    p.with_n_max(1).validate()?;
    let worst_t = times
        .iter()
        .copied()
        .max_by(|a, b| alpha(*a, p).norm().total_cmp(&alpha(*b, p).norm()))
        .ok_or_else(|| Error::invalid("empty time grid"))?;
    let mut n_max = p.initial_truncation(chi.highest_occupied());
    let mut previous = amplitude_at(chi, &p.with_n_max(n_max), worst_t, tol)?;
    for _ in 0..MAX_DOUBLINGS {
        n_max *= 2;
        let current = amplitude_at(chi, &p.with_n_max(n_max), worst_t, tol)?;
        if (current - previous).norm() < TRUNCATION_CHANGE {
            return Ok(n_max);
        }
        previous = current;
    }
    Err(Error::NonConvergence(format!("Fock truncation did not settle below n_max = {n_max}")))
}

/// ⟨χ|e^{−iH_F t}|χ⟩ on `times` by direct propagation of the effective
/// radiation Hamiltonian. Returns the amplitudes and the cutoff used.
pub fn propagated_amplitudes(
    chi: &RadiationState,
    times: &[f64],
    p: &DickeParams,
    tol: f64,
) -> Result<(Vec<C64>, usize)> {
    let n_max = settle_truncation(chi, p, times, tol)?;
    let params = p.with_n_max(n_max);
    let h = build_effective_radiation_hamiltonian(&params)?;
    let psi = chi.to_quantum_state(n_max)?;
    let mut out = vec![C64::new(0.0, 0.0); times.len()];
    propagate_grid(&h, &psi, times, tol, |k, amps| {
        out[k] = psi.amplitudes().iter().zip(amps).map(|(a, b)| a.conj() * b).sum();
    })?;
    Ok((out, n_max))
}

/// Atoms in the σ_x = +1 product state (Σσ_x = N).
fn polarized_atoms(n_atoms: usize) -> Result<QuantumState> {
    let plus = std::f64::consts::FRAC_1_SQRT_2;
    let spinor = [C64::new(plus, 0.0), C64::new(plus, 0.0)];
    QuantumState::spin_product(&vec![spinor; n_atoms])
}

/// Survival amplitude of `|+⟩^N ⊗ |χ⟩` under the full Dicke Hamiltonian
/// (including the level splitting Δ). Only feasible for small N.
pub fn propagated_amplitudes_full(
    chi: &RadiationState,
    times: &[f64],
    p: &DickeParams,
    tol: f64,
) -> Result<(Vec<C64>, usize)> {
    let n_max = settle_truncation(chi, p, times, tol)?;
    let params = p.with_n_max(n_max);
    let h = build_full_dicke_hamiltonian(&params)?;
    let psi = QuantumState::spin_fock_product(&polarized_atoms(p.n_atoms)?, &chi.to_quantum_state(n_max)?)?;
    let mut out = vec![C64::new(0.0, 0.0); times.len()];
    propagate_grid(&h, &psi, times, tol, |k, amps| {
        out[k] = psi.amplitudes().iter().zip(amps).map(|(a, b)| a.conj() * b).sum();
    })?;
    Ok((out, n_max))
}

/// Energy variance of a radiation state under the effective Hamiltonian and
/// under the full Dicke Hamiltonian with atoms in `|+⟩^N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceComparison {
    pub effective: f64,
    pub full: f64,
    pub difference: f64,
}

pub fn variance_comparison(chi: &RadiationState, p: &DickeParams) -> Result<VarianceComparison> {
    let n_max = chi.highest_occupied() + 2;
    let params = p.with_n_max(n_max);
    let radiation = chi.to_quantum_state(n_max)?;
    let effective = variance(&build_effective_radiation_hamiltonian(&params)?, &radiation)?;
    let joint = QuantumState::spin_fock_product(&polarized_atoms(p.n_atoms)?, &radiation)?;
    let full = variance(&build_full_dicke_hamiltonian(&params)?, &joint)?;
    Ok(VarianceComparison { effective, full, difference: full - effective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::linspace;
    use crate::dicke::survival_amplitude;

    #[test]
    fn truncation_grows_with_displacement() {
        let chi = RadiationState::fock(2);
        let times = linspace(0.0, 6.0, 30);
        let small = settle_truncation(&chi, &DickeParams::new(1, 0.1, 1.0), &times, 1e-12).unwrap();
        let large = settle_truncation(&chi, &DickeParams::new(8, 0.5, 1.0), &times, 1e-12).unwrap();
        assert!(large > small);
    }

    #[test]
    fn superposition_against_propagation() {
        let chi = RadiationState::adjacent_superposition(1).unwrap();
        let p = DickeParams::new(4, 0.1, 1.0);
        let times = [0.0, 0.2, 1.0, std::f64::consts::PI];
        let (amps, _) = propagated_amplitudes(&chi, &times, &p, 1e-12).unwrap();
        for (&t, oracle) in times.iter().zip(&amps) {
            let analytic = survival_amplitude(&chi, t, &p).unwrap().value;
            assert!((analytic - oracle).norm() < 1e-8, "t={t}: {analytic} vs {oracle}");
        }
    }

    #[test]
    fn full_model_without_splitting_matches_effective() {
        let chi = RadiationState::adjacent_superposition(2).unwrap();
        let p = DickeParams::new(2, 0.05, 1.0);
        let times = linspace(0.0, 3.0, 7);
        let (eff, _) = propagated_amplitudes(&chi, &times, &p, 1e-12).unwrap();
        let (full, _) = propagated_amplitudes_full(&chi, &times, &p, 1e-12).unwrap();
        for (a, b) in eff.iter().zip(&full) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn splitting_adds_atomic_variance() {
        // (Δ/2)Σσ_z on |+⟩^N contributes N(Δ/2)² and no covariance
        let chi = RadiationState::fock(1);
        let p = DickeParams::new(3, 0.2, 1.0).with_level_split(0.5);
        let cmp = variance_comparison(&chi, &p).unwrap();
        assert!((cmp.effective - 3.0 * 0.36).abs() < 1e-12);
        assert!((cmp.difference - 3.0 * 0.0625).abs() < 1e-12);
    }
}
