use super::{column_basis, hermitian_eigensystem, ComplexMatrix, StateVector, C64};
use crate::error::{Error, Result};

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates `m` as a density matrix to within `tol`.
    pub fn new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Contract("density matrix must be square".into()));
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::Contract(format!("trace {tr} differs from 1")));
        }
        let es = hermitian_eigensystem(&m, tol)?;
        if let Some(&lo) = es.values.first() {
            if lo < -tol {
                return Err(Error::Contract(format!("negative eigenvalue {lo:.3e}")));
            }
        }
        Ok(Self(m))
    }

    /// Wraps a matrix already known to be a valid state.
    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn pure(psi: &StateVector) -> Self {
        Self(psi.outer())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        Ok(Self(super::kron(&self.0, &other.0)?))
    }
}

/// `½ Σ |λ_i(ρ − σ)|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let diff = rho.matrix() - sigma.matrix();
    let es = hermitian_eigensystem(&diff, 1e-8)?;
    Ok(0.5 * es.values.iter().map(|l| l.abs()).sum::<f64>())
}

/// Trace distance between `|a⟩⟨a|` and `|b⟩⟨b|` for unit vectors, computed by
/// compressing `|a⟩⟨a| − |b⟩⟨b|` onto span{a, b} and diagonalizing there.
/// Works for dimensions where the dense matrices would not fit in memory.
pub fn pure_state_trace_distance(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let basis = column_basis(&ComplexMatrix::from_columns(&[a.clone(), b.clone()]), 1e-12);
    let k = basis.len();
    let coords = |v: &StateVector| -> Vec<C64> { basis.iter().map(|e| e.inner(v)).collect() };
    let (ca, cb) = (coords(a), coords(b));
    let mut compressed = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            compressed[(i, j)] = ca[i] * ca[j].conj() - cb[i] * cb[j].conj();
        }
    }
    let es = hermitian_eigensystem(&compressed, 1e-8)?;
    Ok(0.5 * es.values.iter().map(|l| l.abs()).sum::<f64>())
}
