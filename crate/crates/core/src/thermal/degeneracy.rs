use std::ops::Range;

use crate::error::{Error, Result};
use crate::qcore::{CMatrix, DensityMatrix, HermitianOperator, SpectralSystem};

use super::TimeAveragedState;

/// The eigenspaces Π_m of a Hamiltonian and the largest degeneracy g.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyStructure {
    classes: Vec<Range<usize>>,
    eigenvectors: CMatrix,
    g: usize,
}

impl DegeneracyStructure {
    pub fn from_system(sys: &SpectralSystem) -> Self {
        Self {
            classes: sys.degeneracy_classes().to_vec(),
            eigenvectors: sys.eigenvectors().clone(),
            g: sys.max_degeneracy(),
        }
    }

    /// Maximum eigenspace dimension.
    pub fn g(&self) -> usize {
        self.g
    }

    pub fn classes(&self) -> &[Range<usize>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.eigenvectors.nrows()
    }

    /// Π_m as a dense operator.
    pub fn projector(&self, m: usize) -> HermitianOperator {
        let r = self.classes[m].clone();
        let v = self.eigenvectors.columns(r.start, r.len());
        HermitianOperator::from_trusted(v * v.adjoint())
    }

    /// tr(Π_m ω) for every class m.
    pub fn class_weights(&self, omega: &TimeAveragedState) -> Result<Vec<f64>> {
        if omega.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), omega.dim()));
        }
        let p = omega.weights();
        Ok(self.classes.iter().map(|r| p[r.clone()].iter().sum()).collect())
    }

    /// tr(Π_m ρ) for an arbitrary state.
    pub fn class_weights_of(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), rho.dim()));
        }
        Ok(self
            .classes
            .iter()
            .map(|r| {
                let v = self.eigenvectors.columns(r.start, r.len());
                (v.adjoint() * rho.matrix() * v).trace().re
            })
            .collect())
    }
}

/// 1/Σ_n p_n², or 1/Σ_m tr(Π_m ω)² when a degeneracy structure is given.
pub fn effective_dimension(omega: &TimeAveragedState, degeneracy: Option<&DegeneracyStructure>) -> Result<f64> {
    let sum_sq: f64 = match degeneracy {
        None => omega.purity(),
        Some(deg) => deg.class_weights(omega)?.iter().map(|q| q * q).sum(),
    };
    Ok(1.0 / sum_sq)
}

/// (1/(g Σp²), 1/Σp²), which brackets the degenerate effective dimension.
pub fn deff_sandwich(omega: &TimeAveragedState, degeneracy: &DegeneracyStructure) -> (f64, f64) {
    let upper = 1.0 / omega.purity();
    (upper / degeneracy.g() as f64, upper)
}
