//! Foundation types: Hermitian operators, density matrices, POVMs and the
//! exact dense linear algebra behind them.

mod basis;
mod operator;
mod partition;
mod povm;
mod spectral;

pub use basis::{expand_in_basis, hermitian_operator_basis, resum_from_basis};
pub use operator::{
    max_asymmetry, trace_product, CMatrix, CVector, DensityMatrix, HermitianOperator, C64,
};
pub(crate) use partition::{partial_trace_cross, trace_distance_raw};
pub use partition::{partial_trace, partial_trace_pure, trace_distance, SubsystemOrder, SubsystemPartition};
pub use povm::{Effect, MeasurementSet, Povm};
pub use spectral::{eig_hermitian, eig_hermitian_with, SpectralSystem};

/// Eigenvalues (ascending) of a Hermitian matrix given as raw storage.
pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Spectral norm of a Hermitian matrix.
pub(crate) fn hermitian_spectral_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)
        .into_iter()
        .fold(0.0, |acc, x| acc.max(x.abs()))
}
