//! Fock-basis matrix elements of the displacement operator D(α) = exp(αa† − α*a).

use super::laguerre::laguerre_assoc_scaled;
use crate::C64;

/// ln(m!/n!) for m ≥ n, as an explicit sum of logarithms.
fn ln_factorial_ratio(m: usize, n: usize) -> f64 {
    debug_assert!(m >= n);
    ((n + 1)..=m).map(|j| (j as f64).ln()).sum()
}

/// ⟨m|D(α)|n⟩ for m ≥ n:
/// √(n!/m!) e^{−|α|²/2} α^{m−n} L_n^{m−n}(|α|²), assembled in log space.
fn lower_element(m: usize, n: usize, alpha: C64) -> C64 {
    let d = m - n;
    let x = alpha.norm_sqr();
    if alpha.norm() == 0.0 {
        return if d == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
    }
    let lag = laguerre_assoc_scaled(n, d as i64, x).expect("domain holds for m >= n and x >= 0");
    if lag.signum() == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let ln_mag = -0.5 * ln_factorial_ratio(m, n) - 0.5 * x + d as f64 * alpha.norm().ln() + lag.ln_abs();
    C64::from_polar(lag.signum() * ln_mag.exp(), d as f64 * alpha.arg())
}

/// ⟨m|D(α)|n⟩ in the unitary normalization. The `m < n` half comes from
/// ⟨m|D(α)|n⟩ = conj(⟨n|D(−α)|m⟩).
pub fn displaced_element(m: usize, n: usize, alpha: C64) -> C64 {
    if m >= n {
        lower_element(m, n, alpha)
    } else {
        lower_element(n, m, -alpha).conj()
    }
}
