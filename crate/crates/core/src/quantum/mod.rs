//! Hamiltonian builders plus the unitary propagator that serves as the
//! brute-force reference for analytic results.

mod hamiltonian;
mod operator;
mod propagate;
mod state;

pub use hamiltonian::{
    build_effective_radiation_hamiltonian, build_full_dicke_hamiltonian, build_full_dicke_hamiltonian_with,
    build_spin_hamiltonian, build_spin_hamiltonian_with, Boundary, Capacity, DickeParams, SpinChainSpec,
    DENSE_SPIN_MAX_SITES,
};
pub use operator::{expectation, variance, CsrMatrix, OperatorHandle};
pub use propagate::{
    evolve, evolve_with, propagate_grid, Method, PropagatorConfig, DENSE_PROPAGATION_MAX_DIM, MAX_PHASE,
};
pub use state::{Basis, QuantumState};
