//! Numerical laboratory for Gaussian fidelity decay in large quantum systems.
//!
//! The crate is organised around a small set of modules:
//!
//! * [`quantum`]: Hamiltonian builders and the unitary propagator used as a
//!   brute-force reference for everything else.
//! * [`spin_fidelity`]: fidelity curves for nearest-neighbour spin chains and
//!   their convergence toward the Gaussian law.
//! * [`dicke`]: closed-form survival amplitudes for the integrable limit of
//!   the Dicke model, built on associated Laguerre kernels.
//! * [`scaling`]: Gaussian fits and log-log exponents, plus recurrence widths.
//! * [`sampling`]: exact-phase sampling of very fast sines and the statistics
//!   of the resulting sample streams.
//!
//! Spin operators use bare Pauli matrices (eigenvalues ±1) everywhere. Units
//! have ħ = 1, so times are inverse energies.

pub mod curve;
pub mod dicke;
pub mod error;
pub mod interp;
pub mod quantum;
pub mod sampling;
pub mod scaling;
pub mod spin_fidelity;

pub use curve::{CurveSource, FidelityCurve};
pub use dicke::{RadiationState, SurvivalAmplitude};
pub use error::{Error, Result};
pub use quantum::{
    evolve, expectation, variance, Basis, Boundary, Capacity, DickeParams, OperatorHandle, QuantumState,
    SpinChainSpec,
};
pub use scaling::{GaussianFit, Peak, PowerLawFit, ScalingReport};
pub use spin_fidelity::{HmhReport, ProductStateRule};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
