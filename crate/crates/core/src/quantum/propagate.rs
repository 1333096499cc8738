//! Unitary propagation `|ψ(t)⟩ = e^{−iHt}|ψ⟩`.
//!
//! Small operators are exponentiated densely (Padé scaling and squaring).
//! Everything else goes through a Lanczos–Krylov integrator with adaptive
//! substeps, each accepted only when the a posteriori residual estimate
//! `β_m |[e^{−iτT_m} e_1]_m|` is below its share of the tolerance.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::operator::OperatorHandle;
use super::state::{inner, l2_norm, QuantumState};
use crate::error::{Error, Result};
use crate::C64;

/// Largest dimension handled by the dense exponential.
pub const DENSE_PROPAGATION_MAX_DIM: usize = 256;

/// Largest phase |t|·‖H‖ accepted before results lose meaning.
pub const MAX_PHASE: f64 = 1e9;

const MIN_TOL: f64 = 1e-15;
const MAX_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Dense exponential for small operators, Krylov otherwise.
    Auto,
    Dense,
    Krylov,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConfig {
    pub method: Method,
    /// Maximum Krylov subspace dimension per substep.
    pub krylov_dim: usize,
    /// Iteration budget: maximum number of attempted substeps per call.
    pub max_substeps: usize,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self { method: Method::Auto, krylov_dim: 30, max_substeps: 200_000 }
    }
}

/// `e^{−iHt}|state⟩` with error at most `tol` in norm. The input is untouched.
pub fn evolve(h: &OperatorHandle, state: &QuantumState, t: f64, tol: f64) -> Result<QuantumState> {
    evolve_with(h, state, t, tol, &PropagatorConfig::default())
}

pub fn evolve_with(
    h: &OperatorHandle,
    state: &QuantumState,
    t: f64,
    tol: f64,
    config: &PropagatorConfig,
) -> Result<QuantumState> {
    h.check_dim(state.dim())?;
    check_request(h, t, tol)?;
    if t == 0.0 {
        return Ok(state.clone());
    }
    let amps = match resolve(config.method, h.dim()) {
        Method::Dense => dense_propagate(h, state.amplitudes(), t),
        _ => krylov_propagate(h, state.amplitudes(), t, tol, config)?,
    };
    Ok(QuantumState::from_propagated(amps, state.basis()))
}

fn resolve(method: Method, dim: usize) -> Method {
    match method {
        Method::Auto if dim <= DENSE_PROPAGATION_MAX_DIM => Method::Dense,
        Method::Auto => Method::Krylov,
        m => m,
    }
}

fn check_request(h: &OperatorHandle, t: f64, tol: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::invalid(format!("evolution time must be finite, got {t}")));
    }
    if !(tol > MIN_TOL && tol < MAX_TOL) {
        return Err(Error::invalid(format!("tolerance {tol} outside ({MIN_TOL}, {MAX_TOL})")));
    }
    if !h.is_hermitian() {
        return Err(Error::invalid("unitary propagation requires a Hermitian operator"));
    }
    let phase = t.abs() * h.norm_estimate();
    if phase > MAX_PHASE {
        return Err(Error::Range(format!("|t|·‖H‖ = {phase:e} exceeds {MAX_PHASE:e}")));
    }
    Ok(())
}

fn dense_propagate(h: &OperatorHandle, psi: &[C64], t: f64) -> Vec<C64> {
    let u = (h.to_dense() * C64::new(0.0, -t)).exp();
    (u * DVector::from_column_slice(psi)).as_slice().to_vec()
}

struct LanczosBasis {
    vectors: Vec<Vec<C64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

/// Small-space propagation `e^{−iτT}e_1` for the real symmetric tridiagonal `T`.
fn tridiagonal_exp_e1(alpha: &[f64], beta: &[f64], tau: f64) -> Vec<C64> {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    (0..m)
        .map(|r| {
            (0..m)
                .map(|k| {
                    let q = eig.eigenvectors[(r, k)] * eig.eigenvectors[(0, k)];
                    C64::from_polar(q, -tau * eig.eigenvalues[k])
                })
                .sum()
        })
        .collect()
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

/// Builds the Lanczos basis for `v` (unit norm), stopping early once the
/// residual estimate for step `tau` drops below `step_tol`.
fn lanczos(h: &OperatorHandle, v: &[C64], m_max: usize, tau: f64, step_tol: f64) -> LanczosBasis {
    let breakdown = 1e-13 * h.norm_estimate().max(1.0);
    let mut basis = LanczosBasis { vectors: vec![v.to_vec()], alpha: Vec::new(), beta: Vec::new() };
    let mut w = vec![C64::new(0.0, 0.0); v.len()];
    for j in 0..m_max {
        h.apply_into(&basis.vectors[j], &mut w);
        let a = inner(&basis.vectors[j], &w).re;
        basis.alpha.push(a);
        // full reorthogonalization, applied twice
        for _ in 0..2 {
            for q in &basis.vectors {
                let c = inner(q, &w);
                axpy(&mut w, -c, q);
            }
        }
        let b = l2_norm(&w);
        basis.beta.push(b);
        if b < breakdown {
            break;
        }
        if j >= 3 && j + 1 < m_max {
            let y = tridiagonal_exp_e1(&basis.alpha, &basis.beta[..j], tau);
            if b * y[j].norm() < 0.1 * step_tol {
                break;
            }
        }
        if j + 1 < m_max {
            let next: Vec<C64> = w.iter().map(|x| x / b).collect();
            basis.vectors.push(next);
        }
    }
    basis
}

fn krylov_propagate(
    h: &OperatorHandle,
    psi: &[C64],
    t: f64,
    tol: f64,
    config: &PropagatorConfig,
) -> Result<Vec<C64>> {
    let total = t.abs();
    let sign = t.signum();
    let m_max = config.krylov_dim.clamp(2, h.dim().max(2));
    let breakdown = 1e-13 * h.norm_estimate().max(1.0);
    let mut current = psi.to_vec();
    let mut elapsed = 0.0;
    let mut tau = total.min(0.5 * m_max as f64 / h.norm_estimate().max(f64::MIN_POSITIVE));
    let mut attempts = 0;

    while elapsed < total {
        attempts += 1;
        if attempts > config.max_substeps {
            return Err(Error::NonConvergence(format!(
                "Krylov propagation exceeded {} substeps at t = {} of {}",
                config.max_substeps,
                elapsed * sign,
                t
            )));
        }
        tau = tau.min(total - elapsed);
        let beta0 = l2_norm(&current);
        let unit: Vec<C64> = current.iter().map(|x| x / beta0).collect();
        let step_tol = tol * tau / total;
        let basis = lanczos(h, &unit, m_max, sign * tau, step_tol);
        let m = basis.alpha.len();
        let last_beta = basis.beta[m - 1];
        let y = tridiagonal_exp_e1(&basis.alpha, &basis.beta[..m - 1], sign * tau);
        let err = if last_beta < breakdown { 0.0 } else { beta0 * last_beta * y[m - 1].norm() };

        if err <= step_tol {
            let mut next = vec![C64::new(0.0, 0.0); current.len()];
            for (coef, q) in y.iter().zip(&basis.vectors) {
                axpy(&mut next, coef * beta0, q);
            }
            current = next;
            elapsed += tau;
            if err < 0.01 * step_tol {
                tau *= 2.0;
            }
        } else {
            let shrink = 0.9 * (step_tol / err).powf(1.0 / m as f64);
            tau *= shrink.clamp(0.1, 0.9);
            if tau <= total * f64::EPSILON {
                return Err(Error::NonConvergence(format!("Krylov step size underflow at t = {}", elapsed * sign)));
            }
        }
    }
    Ok(current)
}

/// Propagates `state` across an ascending time grid, invoking `visit` with
/// each grid index and the evolved amplitudes. Dense operators use one
/// eigendecomposition; larger ones step with Krylov between grid points.
pub fn propagate_grid(
    h: &OperatorHandle,
    state: &QuantumState,
    times: &[f64],
    tol: f64,
    mut visit: impl FnMut(usize, &[C64]),
) -> Result<()> {
    h.check_dim(state.dim())?;
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::invalid("time grid must be ascending"));
    }
    let Some(&t_last) = times.last() else { return Ok(()) };
    check_request(h, times[0].abs().max(t_last.abs()), tol)?;

    if h.dim() <= DENSE_PROPAGATION_MAX_DIM {
        let eig = SymmetricEigen::new(h.to_dense());
        let v = &eig.eigenvectors;
        let coeffs = v.adjoint() * DVector::from_column_slice(state.amplitudes());
        let mut phased = DVector::<C64>::zeros(h.dim());
        for (k, &t) in times.iter().enumerate() {
            for i in 0..h.dim() {
                phased[i] = coeffs[i] * C64::from_polar(1.0, -eig.eigenvalues[i] * t);
            }
            visit(k, (v * &phased).as_slice());
        }
        return Ok(());
    }

    let config = PropagatorConfig { method: Method::Krylov, ..PropagatorConfig::default() };
    // Per-step tolerance is split so the accumulated error stays below `tol`.
    let steps = times.len().max(1) as f64;
    let step_tol = (tol / steps).max(MIN_TOL * 2.0);
    let mut current = state.amplitudes().to_vec();
    let mut t_prev = 0.0;
    for (k, &t) in times.iter().enumerate() {
        let dt = t - t_prev;
        if dt != 0.0 {
            current = krylov_propagate(h, &current, dt, step_tol, &config)?;
        }
        t_prev = t;
        visit(k, &current);
    }
    Ok(())
}
