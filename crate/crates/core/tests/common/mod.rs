#![allow(dead_code)]

use ethavg::models::{haar_unitary, haar_vector};
use ethavg::qcore::{CMatrix, CVector, DensityMatrix, HermitianOperator, SpectralSystem, C64};
use ethavg::rng::seeded;
use ethavg::Tolerances;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn diag_system(energies: &[f64]) -> SpectralSystem {
    let n = energies.len();
    SpectralSystem::from_eigenpairs(energies.to_vec(), CMatrix::identity(n, n), &Tolerances::DEFAULT).unwrap()
}

/// Given spectrum in a Haar-random eigenbasis.
pub fn rotated_system(energies: &[f64], seed: u64) -> SpectralSystem {
    let u = haar_unitary(energies.len(), &mut seeded(seed));
    SpectralSystem::from_eigenpairs(energies.to_vec(), u, &Tolerances::DEFAULT).unwrap()
}

pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> HermitianOperator {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    HermitianOperator::new((&g + g.adjoint()) * C64::new(0.5, 0.0)).unwrap()
}

/// G G† / tr(G G†) for a Ginibre matrix G with `rank` columns.
pub fn random_density<R: Rng>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = CMatrix::from_fn(dim, rank, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.unscale(tr)).unwrap()
}

pub fn random_pure<R: Rng>(dim: usize, rng: &mut R) -> (CVector, DensityMatrix) {
    let v = haar_vector(dim, rng);
    let rho = DensityMatrix::pure(&v).unwrap();
    (v, rho)
}

/// ½ Σ|λ| from a fresh eigendecomposition, independent of the library's
/// trace-distance path.
pub fn trace_norm_half(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = a - b;
    let eig = diff.clone().symmetric_eigen();
    0.5 * eig.eigenvalues.iter().map(|x| x.abs()).sum::<f64>()
}
