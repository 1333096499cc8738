use nalgebra::DMatrix;
use rayon::prelude::*;

use super::hamiltonian::SpinKernel;
use super::state::{inner, QuantumState};
use crate::error::{Error, Result};
use crate::C64;

/// Sizes above which `apply` fans out over threads.
const PARALLEL_APPLY_MIN_DIM: usize = 1 << 13;

/// Compressed sparse row matrix with complex entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    /// Assembles a square matrix from per-row `(col, value)` lists. Duplicate
    /// columns within a row are summed and exact zeros dropped.
    pub fn from_rows(dim: usize, rows: Vec<Vec<(usize, C64)>>) -> Self {
        assert_eq!(rows.len(), dim);
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let mut iter = row.into_iter().peekable();
            while let Some((c, mut v)) = iter.next() {
                while let Some(&(c2, v2)) = iter.peek() {
                    if c2 != c {
                        break;
                    }
                    v += v2;
                    iter.next();
                }
                if v != C64::new(0.0, 0.0) {
                    cols.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { dim, row_ptr, cols, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn row_dot(&self, row: usize, x: &[C64]) -> C64 {
        let (lo, hi) = (self.row_ptr[row], self.row_ptr[row + 1]);
        self.cols[lo..hi]
            .iter()
            .zip(&self.values[lo..hi])
            .map(|(&c, &v)| v * x[c])
            .sum()
    }

    fn max_abs_row_sum(&self) -> f64 {
        (0..self.dim)
            .map(|r| {
                self.values[self.row_ptr[r]..self.row_ptr[r + 1]]
                    .iter()
                    .map(|v| v.norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Repr {
    Dense(DMatrix<C64>),
    Sparse(CsrMatrix),
    /// Matrix-free nearest-neighbour spin chain.
    Spin(SpinKernel),
}

/// A linear operator exposed through its action on state vectors.
#[derive(Debug, Clone)]
pub struct OperatorHandle {
    repr: Repr,
    dim: usize,
    hermitian: bool,
    description: String,
    norm_estimate: f64,
}

impl OperatorHandle {
    pub(crate) fn from_repr(repr: Repr, hermitian: bool, description: impl Into<String>) -> Self {
        let (dim, norm_estimate) = match &repr {
            Repr::Dense(m) => {
                let norm = m
                    .row_iter()
                    .map(|r| r.iter().map(|v| v.norm()).sum::<f64>())
                    .fold(0.0, f64::max);
                (m.nrows(), norm)
            }
            Repr::Sparse(m) => (m.dim(), m.max_abs_row_sum()),
            Repr::Spin(k) => (k.dim(), k.norm_bound()),
        };
        Self { repr, dim, hermitian, description: description.into(), norm_estimate }
    }

    /// Wraps a dense square matrix. The Hermitian flag is set only when the
    /// matrix is Hermitian to 1e-12.
    pub fn from_dense(matrix: DMatrix<C64>, description: impl Into<String>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::invalid("operator matrix must be square and nonempty"));
        }
        let hermitian = (&matrix - matrix.adjoint()).camax() <= 1e-12;
        Ok(Self::from_repr(Repr::Dense(matrix), hermitian, description))
    }

    pub fn from_sparse(matrix: CsrMatrix, hermitian: bool, description: impl Into<String>) -> Self {
        Self::from_repr(Repr::Sparse(matrix), hermitian, description)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Upper bound on the spectral norm (maximum absolute row sum).
    pub fn norm_estimate(&self) -> f64 {
        self.norm_estimate
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim];
        self.apply_into(x, &mut y);
        y
    }

    /// `y = H x`; panics if either slice has the wrong length.
    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.dim, "operator/vector dimension mismatch");
        assert_eq!(y.len(), self.dim, "operator/vector dimension mismatch");
        match &self.repr {
            Repr::Dense(m) => {
                let parallel = self.dim >= PARALLEL_APPLY_MIN_DIM / 16;
                let row = |(r, out): (usize, &mut C64)| {
                    *out = m.row(r).iter().zip(x).map(|(a, b)| a * b).sum();
                };
                if parallel {
                    y.par_iter_mut().enumerate().for_each(row);
                } else {
                    y.iter_mut().enumerate().for_each(row);
                }
            }
            Repr::Sparse(m) => {
                if self.dim >= PARALLEL_APPLY_MIN_DIM {
                    y.par_iter_mut().enumerate().for_each(|(r, out)| *out = m.row_dot(r, x));
                } else {
                    y.iter_mut().enumerate().for_each(|(r, out)| *out = m.row_dot(r, x));
                }
            }
            Repr::Spin(k) => k.apply_into(x, y, self.dim >= PARALLEL_APPLY_MIN_DIM),
        }
    }

    pub fn apply_state(&self, state: &QuantumState) -> Result<Vec<C64>> {
        self.check_dim(state.dim())?;
        Ok(self.apply(state.amplitudes()))
    }

    /// Materializes the operator as a dense matrix, column by column for
    /// matrix-free realizations.
    pub fn to_dense(&self) -> DMatrix<C64> {
        match &self.repr {
            Repr::Dense(m) => m.clone(),
            _ => {
                let mut out = DMatrix::zeros(self.dim, self.dim);
                let mut e = vec![C64::new(0.0, 0.0); self.dim];
                for j in 0..self.dim {
                    e[j] = C64::new(1.0, 0.0);
                    let col = self.apply(&e);
                    e[j] = C64::new(0.0, 0.0);
                    for (i, v) in col.into_iter().enumerate() {
                        out[(i, j)] = v;
                    }
                }
                out
            }
        }
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: dim });
        }
        Ok(())
    }

    /// Largest value of |⟨a|H b⟩ − conj(⟨b|H a⟩)| over the given probe pairs.
    pub fn hermiticity_defect(&self, probes: &[(Vec<C64>, Vec<C64>)]) -> f64 {
        probes
            .iter()
            .map(|(a, b)| {
                let hab = inner(a, &self.apply(b));
                let hba = inner(b, &self.apply(a));
                (hab - hba.conj()).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// ⟨ψ|H|ψ⟩, real part (the imaginary part vanishes for Hermitian H).
pub fn expectation(h: &OperatorHandle, state: &QuantumState) -> Result<f64> {
    let hpsi = h.apply_state(state)?;
    Ok(inner(state.amplitudes(), &hpsi).re)
}

/// σ² = ⟨H²⟩ − ⟨H⟩², evaluated as ‖Hψ‖² − ⟨ψ|H|ψ⟩². Round-off negatives and
/// values below 1e-12 relative to ‖Hψ‖² are clamped to zero.
pub fn variance(h: &OperatorHandle, state: &QuantumState) -> Result<f64> {
    let hpsi = h.apply_state(state)?;
    let mean = inner(state.amplitudes(), &hpsi).re;
    let second = hpsi.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let var = second - mean * mean;
    if var <= 1e-12 * second.max(1.0) {
        return Ok(0.0);
    }
    Ok(var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::Basis;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn csr_sums_duplicates_and_drops_zeros() {
        let rows = vec![
            vec![(1, c(1.0, 0.0)), (1, c(2.0, 0.0)), (0, c(0.0, 0.0))],
            vec![(0, c(3.0, 0.0))],
        ];
        let m = CsrMatrix::from_rows(2, rows);
        assert_eq!(m.nnz(), 2);
        let op = OperatorHandle::from_sparse(m, true, "test");
        assert_eq!(op.apply(&[c(1.0, 0.0), c(1.0, 0.0)]), vec![c(3.0, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn dense_hermitian_flag() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        assert!(OperatorHandle::from_dense(m, "h").unwrap().is_hermitian());
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(2.0, 0.0)]);
        assert!(!OperatorHandle::from_dense(m, "nh").unwrap().is_hermitian());
    }

    #[test]
    fn variance_of_eigenstate_is_zero() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.5, 0.0), c(-2.0, 0.0)]));
        let h = OperatorHandle::from_dense(m, "diag").unwrap();
        let s = QuantumState::basis_state(Basis::Fock { n_max: 1 }, 1).unwrap();
        assert_eq!(variance(&h, &s).unwrap(), 0.0);
        assert_eq!(expectation(&h, &s).unwrap(), -2.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let h = OperatorHandle::from_dense(DMatrix::identity(3, 3), "id").unwrap();
        let s = QuantumState::basis_state(Basis::Fock { n_max: 1 }, 0).unwrap();
        assert!(matches!(variance(&h, &s), Err(Error::DimensionMismatch { .. })));
    }
}
