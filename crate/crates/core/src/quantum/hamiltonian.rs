//! Hamiltonian builders.
//!
//! All spin terms use bare Pauli matrices, so a single σ_z has eigenvalues ±1
//! and the Dicke level splitting enters as (Δ/2)·Σσ_z.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::operator::{CsrMatrix, OperatorHandle, Repr};
use crate::error::{Error, Result};
use crate::C64;

/// Spin chains up to this many sites are stored densely.
pub const DENSE_SPIN_MAX_SITES: usize = 8;

/// Size limits for the builders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capacity {
    pub max_spin_sites: usize,
    pub max_dicke_atoms: usize,
    /// Largest total dimension of the atom ⊗ mode product space.
    pub max_dicke_dim: usize,
}

impl Default for Capacity {
    fn default() -> Self {
        Self { max_spin_sites: 20, max_dicke_atoms: 8, max_dicke_dim: 1 << 22 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// Nearest-neighbour chain
/// `H = Σ_bonds (J_zz Z Z + J_xx X X + J_yy Y Y) + Σ_sites (h_x X + h_z Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinChainSpec {
    pub n_sites: usize,
    #[serde(default)]
    pub coupling_zz: f64,
    #[serde(default)]
    pub coupling_xx: f64,
    #[serde(default)]
    pub coupling_yy: f64,
    #[serde(default)]
    pub field_x: f64,
    #[serde(default)]
    pub field_z: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl SpinChainSpec {
    /// Transverse-field Ising chain `J Σ ZZ + h Σ X` with open ends.
    pub fn transverse_ising(n_sites: usize, coupling: f64, field: f64) -> Self {
        Self {
            n_sites,
            coupling_zz: coupling,
            coupling_xx: 0.0,
            coupling_yy: 0.0,
            field_x: field,
            field_z: 0.0,
            boundary: Boundary::Open,
        }
    }

    pub fn with_sites(self, n_sites: usize) -> Self {
        Self { n_sites, ..self }
    }

    /// Multiplies every coupling and field by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            coupling_zz: self.coupling_zz * factor,
            coupling_xx: self.coupling_xx * factor,
            coupling_yy: self.coupling_yy * factor,
            field_x: self.field_x * factor,
            field_z: self.field_z * factor,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::invalid(format!("spin chain needs n_sites >= 2, got {}", self.n_sites)));
        }
        let all = [self.coupling_zz, self.coupling_xx, self.coupling_yy, self.field_x, self.field_z];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("spin chain couplings must be finite"));
        }
        Ok(())
    }

    /// Bond list; a periodic chain of two sites keeps a single bond.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut bonds: Vec<_> = (0..self.n_sites.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic && self.n_sites > 2 {
            bonds.push((self.n_sites - 1, 0));
        }
        bonds
    }

    /// Largest operator norm among the local terms `H_i`, where `H_i` is one
    /// bond plus the fields on its first site (or a lone field term for the
    /// last site of an open chain).
    pub fn local_term_bound(&self) -> f64 {
        let x = [[0.0, 1.0], [1.0, 0.0]].map(|r| r.map(|v| C64::new(v, 0.0)));
        let y = [[C64::new(0.0, 0.0), C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), C64::new(0.0, 0.0)]];
        let z = [[1.0, 0.0], [0.0, -1.0]].map(|r| r.map(|v| C64::new(v, 0.0)));
        let id = [[1.0, 0.0], [0.0, 1.0]].map(|r| r.map(|v| C64::new(v, 0.0)));
        let kron = |a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]| {
            DMatrix::from_fn(4, 4, |r, c| a[r / 2][c / 2] * b[r % 2][c % 2])
        };
        let field = |p: &[[C64; 2]; 2]| kron(p, &id);
        let bond = kron(&z, &z) * C64::from(self.coupling_zz)
            + kron(&x, &x) * C64::from(self.coupling_xx)
            + kron(&y, &y) * C64::from(self.coupling_yy);
        let single = field(&x) * C64::from(self.field_x) + field(&z) * C64::from(self.field_z);
        let spectral_norm = |m: DMatrix<C64>| {
            m.symmetric_eigenvalues().iter().map(|v| v.abs()).fold(0.0, f64::max)
        };
        let with_bond = spectral_norm(bond + &single);
        let field_only = spectral_norm(single);
        with_bond.max(field_only)
    }
}

/// Matrix-free action of a [`SpinChainSpec`] Hamiltonian.
#[derive(Debug, Clone)]
pub(crate) struct SpinKernel {
    n_sites: usize,
    bonds: Vec<(usize, usize)>,
    jzz: f64,
    jxx: f64,
    jyy: f64,
    hx: f64,
    hz: f64,
}

impl SpinKernel {
    fn new(spec: &SpinChainSpec) -> Self {
        Self {
            n_sites: spec.n_sites,
            bonds: spec.bonds(),
            jzz: spec.coupling_zz,
            jxx: spec.coupling_xx,
            jyy: spec.coupling_yy,
            hx: spec.field_x,
            hz: spec.field_z,
        }
    }

    pub(crate) fn dim(&self) -> usize {
        1 << self.n_sites
    }

    pub(crate) fn norm_bound(&self) -> f64 {
        let nb = self.bonds.len() as f64;
        let ns = self.n_sites as f64;
        nb * (self.jzz.abs() + self.jxx.abs() + self.jyy.abs()) + ns * (self.hx.abs() + self.hz.abs())
    }

    #[inline]
    fn z(s: usize, site: usize) -> f64 {
        if s >> site & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// All nonzero entries `(col, value)` of row `s`. The matrix is real
    /// symmetric: X and Y pairs flip both bits, and Y_iY_j contributes
    /// −z_i z_j, which is unchanged by that flip.
    fn row_entries(&self, s: usize, mut emit: impl FnMut(usize, f64)) {
        let mut diag = 0.0;
        for &(i, j) in &self.bonds {
            let zz = Self::z(s, i) * Self::z(s, j);
            diag += self.jzz * zz;
            let off = self.jxx - self.jyy * zz;
            if off != 0.0 {
                emit(s ^ (1 << i) ^ (1 << j), off);
            }
        }
        for i in 0..self.n_sites {
            diag += self.hz * Self::z(s, i);
            if self.hx != 0.0 {
                emit(s ^ (1 << i), self.hx);
            }
        }
        emit(s, diag);
    }

    pub(crate) fn apply_into(&self, x: &[C64], y: &mut [C64], parallel: bool) {
        let row = |(s, out): (usize, &mut C64)| {
            let mut acc = C64::new(0.0, 0.0);
            self.row_entries(s, |col, v| acc += x[col] * v);
            *out = acc;
        };
        if parallel {
            y.par_iter_mut().enumerate().for_each(row);
        } else {
            y.iter_mut().enumerate().for_each(row);
        }
    }

    fn to_dense(&self) -> DMatrix<C64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for s in 0..dim {
            self.row_entries(s, |col, v| m[(s, col)] += C64::new(v, 0.0));
        }
        m
    }
}

pub fn build_spin_hamiltonian(spec: &SpinChainSpec) -> Result<OperatorHandle> {
    build_spin_hamiltonian_with(spec, &Capacity::default())
}

/// Dense realization up to [`DENSE_SPIN_MAX_SITES`], matrix-free beyond.
pub fn build_spin_hamiltonian_with(spec: &SpinChainSpec, capacity: &Capacity) -> Result<OperatorHandle> {
    spec.validate()?;
    if spec.n_sites > capacity.max_spin_sites {
        return Err(Error::Capacity {
            what: "n_sites",
            requested: spec.n_sites,
            maximum: capacity.max_spin_sites,
        });
    }
    let kernel = SpinKernel::new(spec);
    let label = format!(
        "spin chain N={} Jzz={} Jxx={} Jyy={} hx={} hz={} {:?}",
        spec.n_sites,
        spec.coupling_zz,
        spec.coupling_xx,
        spec.coupling_yy,
        spec.field_x,
        spec.field_z,
        spec.boundary
    );
    let repr = if spec.n_sites <= DENSE_SPIN_MAX_SITES {
        Repr::Dense(kernel.to_dense())
    } else {
        Repr::Spin(kernel)
    };
    Ok(OperatorHandle::from_repr(repr, true, label))
}

/// Parameters of the Dicke model and its Fock-space truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DickeParams {
    /// Number of two-level atoms, N.
    pub n_atoms: usize,
    /// Atom-mode coupling g.
    pub coupling: f64,
    /// Mode frequency ω (> 0).
    pub mode_freq: f64,
    /// Level splitting Δ.
    #[serde(default)]
    pub level_split: f64,
    /// Highest retained photon number.
    #[serde(default = "DickeParams::default_n_max")]
    pub n_max: usize,
}

impl DickeParams {
    fn default_n_max() -> usize {
        1
    }

    /// Integrable-limit parameters (Δ = 0) with the truncation sized for the
    /// vacuum.
    pub fn new(n_atoms: usize, coupling: f64, mode_freq: f64) -> Self {
        let mut p = Self { n_atoms, coupling, mode_freq, level_split: 0.0, n_max: 1 };
        p.n_max = p.initial_truncation(0);
        p
    }

    pub fn with_level_split(self, level_split: f64) -> Self {
        Self { level_split, ..self }
    }

    pub fn with_n_max(self, n_max: usize) -> Self {
        Self { n_max, ..self }
    }

    /// N·g
    pub fn collective_coupling(&self) -> f64 {
        self.n_atoms as f64 * self.coupling
    }

    /// Largest displacement |α(t)| = 2|Ng/ω| reached over a period.
    pub fn max_displacement(&self) -> f64 {
        2.0 * (self.collective_coupling() / self.mode_freq).abs()
    }

    /// Starting cutoff `n_state + ceil(10·|α|_max + 20)` for a state whose
    /// highest occupied Fock level is `n_state`.
    pub fn initial_truncation(&self, n_state: usize) -> usize {
        n_state + (10.0 * self.max_displacement() + 20.0).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_atoms == 0 {
            return Err(Error::invalid("n_atoms must be positive"));
        }
        if !(self.mode_freq.is_finite() && self.mode_freq > 0.0) {
            return Err(Error::invalid(format!("mode_freq must be positive, got {}", self.mode_freq)));
        }
        if !self.coupling.is_finite() || !self.level_split.is_finite() {
            return Err(Error::invalid("coupling and level_split must be finite"));
        }
        if self.n_max < 1 {
            return Err(Error::invalid("n_max must be at least 1"));
        }
        Ok(())
    }
}

/// `ω a†a + N g (a† + a)` on Fock levels `0..=n_max`: the integrable limit
/// with every atom frozen in the Σσ_x = N sector.
pub fn build_effective_radiation_hamiltonian(params: &DickeParams) -> Result<OperatorHandle> {
    params.validate()?;
    let dim = params.n_max + 1;
    let ng = params.collective_coupling();
    let rows = (0..dim)
        .map(|n| {
            let mut row = vec![(n, C64::new(params.mode_freq * n as f64, 0.0))];
            if n > 0 {
                row.push((n - 1, C64::new(ng * (n as f64).sqrt(), 0.0)));
            }
            if n + 1 < dim {
                row.push((n + 1, C64::new(ng * ((n + 1) as f64).sqrt(), 0.0)));
            }
            row
        })
        .collect();
    let label = format!(
        "effective radiation N={} g={} w={} n_max={}",
        params.n_atoms, params.coupling, params.mode_freq, params.n_max
    );
    Ok(OperatorHandle::from_sparse(CsrMatrix::from_rows(dim, rows), true, label))
}

pub fn build_full_dicke_hamiltonian(params: &DickeParams) -> Result<OperatorHandle> {
    build_full_dicke_hamiltonian_with(params, &Capacity::default())
}

/// `(Δ/2)Σσ_z + ω a†a + g Σσ_x (a† + a)` on the atom ⊗ mode product space.
pub fn build_full_dicke_hamiltonian_with(params: &DickeParams, capacity: &Capacity) -> Result<OperatorHandle> {
    params.validate()?;
    if params.n_atoms > capacity.max_dicke_atoms {
        return Err(Error::Capacity {
            what: "n_atoms",
            requested: params.n_atoms,
            maximum: capacity.max_dicke_atoms,
        });
    }
    let fock = params.n_max + 1;
    let dim = (1usize << params.n_atoms) * fock;
    if dim > capacity.max_dicke_dim {
        return Err(Error::Capacity { what: "dicke dimension", requested: dim, maximum: capacity.max_dicke_dim });
    }
    let g = params.coupling;
    let rows = (0..dim)
        .map(|idx| {
            let (s, n) = (idx / fock, idx % fock);
            let zsum: f64 = (0..params.n_atoms).map(|i| SpinKernel::z(s, i)).sum();
            let mut row = vec![(idx, C64::new(0.5 * params.level_split * zsum + params.mode_freq * n as f64, 0.0))];
            for i in 0..params.n_atoms {
                let flipped = (s ^ (1 << i)) * fock;
                if n > 0 {
                    row.push((flipped + n - 1, C64::new(g * (n as f64).sqrt(), 0.0)));
                }
                if n + 1 < fock {
                    row.push((flipped + n + 1, C64::new(g * ((n + 1) as f64).sqrt(), 0.0)));
                }
            }
            row
        })
        .collect();
    let label = format!(
        "dicke N={} g={} w={} delta={} n_max={}",
        params.n_atoms, params.coupling, params.mode_freq, params.level_split, params.n_max
    );
    Ok(OperatorHandle::from_sparse(CsrMatrix::from_rows(dim, rows), true, label))
}
