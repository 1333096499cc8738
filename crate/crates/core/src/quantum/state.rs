use crate::error::{Error, Result};
use crate::C64;

const NORM_TOLERANCE: f64 = 1e-12;

/// Hilbert space layout of a [`QuantumState`].
///
/// Spin configurations are stored with site `i` on bit `i` of the basis index;
/// a cleared bit is spin up (σ_z = +1). In the spin ⊗ Fock product the spin
/// index is the major one: `index = spin_index * (n_max + 1) + n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Basis {
    Spin { n_sites: usize },
    Fock { n_max: usize },
    SpinFock { n_sites: usize, n_max: usize },
}

impl Basis {
    pub fn dim(&self) -> usize {
        match *self {
            Basis::Spin { n_sites } => 1usize << n_sites,
            Basis::Fock { n_max } => n_max + 1,
            Basis::SpinFock { n_sites, n_max } => (1usize << n_sites) * (n_max + 1),
        }
    }
}

/// Normalized complex amplitude vector over a declared basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<C64>,
    basis: Basis,
}

impl QuantumState {
    /// Wraps amplitudes that must already have unit norm.
    pub fn new(amplitudes: Vec<C64>, basis: Basis) -> Result<Self> {
        check_dim(&amplitudes, basis)?;
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self { amplitudes, basis })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>, basis: Basis) -> Result<Self> {
        check_dim(&amplitudes, basis)?;
        let norm = l2_norm(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid("cannot normalize a zero or non-finite vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { amplitudes, basis })
    }

    /// Builds a state from propagated amplitudes whose norm is only controlled
    /// to the propagation tolerance.
    pub(crate) fn from_propagated(amplitudes: Vec<C64>, basis: Basis) -> Self {
        debug_assert_eq!(amplitudes.len(), basis.dim());
        Self { amplitudes, basis }
    }

    pub fn basis_state(basis: Basis, index: usize) -> Result<Self> {
        let dim = basis.dim();
        if index >= dim {
            return Err(Error::Range(format!("basis index {index} outside dimension {dim}")));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes, basis })
    }

    /// Product of single-site spinors `a|↑⟩ + b|↓⟩`, one per site.
    pub fn spin_product(spinors: &[[C64; 2]]) -> Result<Self> {
        if spinors.is_empty() {
            return Err(Error::invalid("product state needs at least one site"));
        }
        let mut amps = vec![C64::new(1.0, 0.0)];
        // site 0 ends up on the least significant bit
        for spinor in spinors.iter().rev() {
            let mut next = Vec::with_capacity(amps.len() * 2);
            for &a in &amps {
                next.push(a * spinor[0]);
                next.push(a * spinor[1]);
            }
            amps = next;
        }
        Self::normalized(amps, Basis::Spin { n_sites: spinors.len() })
    }

    /// Tensor product of a spin state and a Fock state.
    pub fn spin_fock_product(spin: &QuantumState, fock: &QuantumState) -> Result<Self> {
        let (n_sites, n_max) = match (spin.basis, fock.basis) {
            (Basis::Spin { n_sites }, Basis::Fock { n_max }) => (n_sites, n_max),
            _ => return Err(Error::invalid("expected a spin state and a Fock state")),
        };
        let mut amps = Vec::with_capacity(spin.dim() * fock.dim());
        for &s in &spin.amplitudes {
            amps.extend(fock.amplitudes.iter().map(|&f| s * f));
        }
        Ok(Self::from_propagated(amps, Basis::SpinFock { n_sites, n_max }))
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &QuantumState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    pub fn with_global_phase(&self, phase: f64) -> Self {
        let factor = C64::from_polar(1.0, phase);
        Self {
            amplitudes: self.amplitudes.iter().map(|&a| a * factor).collect(),
            basis: self.basis,
        }
    }
}

fn check_dim(amplitudes: &[C64], basis: Basis) -> Result<()> {
    if amplitudes.len() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), actual: amplitudes.len() });
    }
    Ok(())
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn l2_norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
