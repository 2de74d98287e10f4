use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use super::hermitian_eigenvalues;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest |A_ij - conj(A_ji)| and where it occurs.
pub fn max_asymmetry(m: &CMatrix) -> (f64, usize, usize) {
    let n = m.nrows();
    let mut worst = (0.0, 0, 0);
    for j in 0..n {
        for i in 0..=j {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            if dev > worst.0 {
                worst = (dev, i, j);
            }
        }
    }
    worst
}

/// tr(AB) without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Replaces `m` by (m + m†)/2 in place, making it exactly Hermitian.
pub(crate) fn hermitize(m: &mut CMatrix) {
    let n = m.nrows();
    for j in 0..n {
        m[(j, j)].im = 0.0;
        for i in 0..j {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::EmptyDimension);
    }
    Ok(m.nrows())
}

fn check_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    let (dev, row, col) = max_asymmetry(m);
    if dev > tol {
        return Err(Error::NotHermitian {
            row,
            col,
            asymmetry: dev,
        });
    }
    Ok(())
}

/// A dense complex Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::new_with(matrix, &Tolerances::DEFAULT)
    }

    pub fn new_with(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        check_square(&matrix)?;
        check_hermitian(&matrix, tol.hermitian)?;
        Ok(Self { matrix })
    }

    /// Symmetrizes `matrix`; for operators that are Hermitian by construction
    /// up to rounding.
    pub(crate) fn from_trusted(mut matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        hermitize(&mut matrix);
        Self { matrix }
    }

    pub fn from_real_diagonal(diagonal: &[f64]) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(Error::EmptyDimension);
        }
        let d = DVector::from_iterator(diagonal.len(), diagonal.iter().map(|&x| C64::new(x, 0.0)));
        Ok(Self {
            matrix: CMatrix::from_diagonal(&d),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    /// |v⟩⟨v| for the given (not necessarily normalized) vector.
    pub fn outer(v: &CVector) -> Self {
        Self::from_trusted(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: &self.matrix * C64::new(factor, 0.0),
        }
    }

    /// Re tr(self · other); the imaginary part vanishes for Hermitian pairs.
    pub fn hs_inner(&self, other: &CMatrix) -> f64 {
        trace_product(&self.matrix, other).re
    }
}

/// A positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (one eigensolve).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::new_with(matrix, &Tolerances::DEFAULT)
    }

    pub fn new_with(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        check_square(&matrix)?;
        check_hermitian(&matrix, tol.hermitian)?;
        let tr: f64 = matrix.diagonal().iter().map(|z| z.re).sum();
        if (tr - 1.0).abs() > tol.trace {
            return Err(Error::InvalidTrace(tr));
        }
        let min = hermitian_eigenvalues(&matrix)[0];
        if min < -tol.psd {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { matrix })
    }

    /// For matrices that are density matrices by construction (mixtures,
    /// conjugations, partial traces of valid states).
    pub(crate) fn from_trusted(mut matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        hermitize(&mut matrix);
        Self { matrix }
    }

    /// |ψ⟩⟨ψ| after normalizing ψ.
    pub fn pure(psi: &CVector) -> Result<Self> {
        if psi.is_empty() {
            return Err(Error::EmptyDimension);
        }
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("state vector has zero norm".into()));
        }
        let v = psi.unscale(norm);
        Ok(Self::from_trusted(&v * v.adjoint()))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        Ok(Self {
            matrix: CMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0),
        })
    }

    /// diag(weights) in the computational basis.
    pub fn from_diagonal(weights: &[f64]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&DVector::from_iterator(
            weights.len(),
            weights.iter().map(|&w| C64::new(w, 0.0)),
        ));
        Self::new(m)
    }

    /// Σ q_i ρ_i for a probability vector q.
    pub fn mixture(terms: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidParameter("empty mixture".into()));
        };
        let dim = first.dim();
        let mut total = 0.0;
        let mut acc = CMatrix::zeros(dim, dim);
        for (q, rho) in terms {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch(dim, rho.dim()));
            }
            if *q < 0.0 {
                return Err(Error::InvalidParameter(format!("negative mixture weight {q}")));
            }
            total += q;
            acc += rho.matrix() * C64::new(*q, 0.0);
        }
        if (total - 1.0).abs() > Tolerances::DEFAULT.trace {
            return Err(Error::InvalidTrace(total));
        }
        Ok(Self::from_trusted(acc))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// tr(ρ²).
    pub fn purity(&self) -> f64 {
        trace_product(&self.matrix, &self.matrix).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Re tr(A ρ).
    pub fn expectation(&self, op: &HermitianOperator) -> f64 {
        trace_product(op.matrix(), &self.matrix).re
    }

    /// Re-runs the validating constructor's checks.
    pub fn check_invariants(&self, tol: &Tolerances) -> Result<()> {
        Self::new_with(self.matrix.clone(), tol).map(|_| ())
    }
}
