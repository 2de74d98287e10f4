use std::ops::Range;

use super::operator::{CMatrix, CVector, HermitianOperator, C64};
use super::hermitian_spectral_norm;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// A Hamiltonian together with its full eigendecomposition.
///
/// Energies are ascending and the eigenvector columns are orthonormal.
/// Eigenvalues within the degeneracy threshold of their neighbour form one
/// class; classes are contiguous index ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSystem {
    hamiltonian: HermitianOperator,
    energies: Vec<f64>,
    eigenvectors: CMatrix,
    degeneracy_classes: Vec<Range<usize>>,
    degeneracy_threshold: f64,
}

/// Diagonalizes `op` with the default tolerances.
///
/// The result is deterministic: eigenvalues are sorted ascending, each
/// nondegenerate eigenvector has its largest-magnitude component made real
/// and positive, and inside a degenerate class the basis is rebuilt by
/// Gram–Schmidt on the projections of e_0, e_1, … onto the eigenspace.
pub fn eig_hermitian(op: &HermitianOperator) -> Result<SpectralSystem> {
    eig_hermitian_with(op, &Tolerances::DEFAULT)
}

pub fn eig_hermitian_with(op: &HermitianOperator, tol: &Tolerances) -> Result<SpectralSystem> {
    let decomposition = op.matrix().clone().symmetric_eigen();
    let n = op.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        decomposition.eigenvalues[a]
            .total_cmp(&decomposition.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let energies: Vec<f64> = order.iter().map(|&i| decomposition.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &decomposition.eigenvectors.column(src));
    }
    SpectralSystem::assemble(op.clone(), energies, vectors, tol)
}

impl SpectralSystem {
    /// Builds a system from eigenpairs, forming H = V·diag(E)·V†.
    ///
    /// Pairs are sorted by energy. The columns of `eigenvectors` must be
    /// orthonormal within `tol.orthonormal`.
    pub fn from_eigenpairs(energies: Vec<f64>, eigenvectors: CMatrix, tol: &Tolerances) -> Result<Self> {
        let n = energies.len();
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        if eigenvectors.nrows() != n || eigenvectors.ncols() != n {
            return Err(Error::DimensionMismatch(n, eigenvectors.ncols()));
        }
        let gram_dev = gram_deviation(&eigenvectors);
        if gram_dev > tol.orthonormal {
            return Err(Error::NotOrthonormal(gram_dev));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)));
        let sorted: Vec<f64> = order.iter().map(|&i| energies[i]).collect();
        let mut vectors = CMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eigenvectors.column(src));
        }
        let h = reconstruct(&sorted, &vectors);
        Self::assemble(HermitianOperator::from_trusted(h), sorted, vectors, tol)
    }

    fn assemble(
        hamiltonian: HermitianOperator,
        mut energies: Vec<f64>,
        mut vectors: CMatrix,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = energies.len();
        let range = energies[n - 1] - energies[0];
        let threshold = tol.degeneracy_threshold(range);
        let classes = group_classes(&energies, threshold);
        for class in &classes {
            if class.len() > 1 {
                canonical_class_basis(&mut vectors, class.clone());
                let mean = energies[class.clone()].iter().sum::<f64>() / class.len() as f64;
                energies[class.clone()].iter_mut().for_each(|e| *e = mean);
            }
        }
        for j in 0..n {
            fix_phase(&mut vectors, j);
        }
        Ok(Self {
            hamiltonian,
            energies,
            eigenvectors: vectors,
            degeneracy_classes: classes,
            degeneracy_threshold: threshold,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, n: usize) -> CVector {
        self.eigenvectors.column(n).into_owned()
    }

    pub fn degeneracy_classes(&self) -> &[Range<usize>] {
        &self.degeneracy_classes
    }

    pub fn degeneracy_threshold(&self) -> f64 {
        self.degeneracy_threshold
    }

    /// Size of the largest degenerate class (g).
    pub fn max_degeneracy(&self) -> usize {
        self.degeneracy_classes.iter().map(|c| c.len()).max().unwrap_or(1)
    }

    pub fn is_degenerate(&self) -> bool {
        self.max_degeneracy() > 1
    }

    /// Smallest gap between distinct consecutive energy levels.
    pub fn min_level_gap(&self) -> Option<f64> {
        self.degeneracy_classes
            .windows(2)
            .map(|w| self.energies[w[1].start] - self.energies[w[0].start])
            .min_by(f64::total_cmp)
    }

    /// Columns `range` of the eigenvector matrix.
    pub fn basis_columns(&self, range: Range<usize>) -> CMatrix {
        self.eigenvectors.columns(range.start, range.len()).into_owned()
    }

    /// Stable identity of the system, used to tie bands to their system.
    pub fn fingerprint(&self) -> u64 {
        // FNV-1a over the energy bits.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for e in &self.energies {
            for b in e.to_bits().to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }

    /// Checks ordering, orthonormality and reconstruction.
    pub fn check_invariants(&self, tol: &Tolerances) -> Result<()> {
        if self.energies.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Invariant("energies not ascending".into()));
        }
        let gram = gram_deviation(&self.eigenvectors);
        if gram > tol.orthonormal {
            return Err(Error::NotOrthonormal(gram));
        }
        let err = self.reconstruction_error();
        if err > tol.reconstruction {
            return Err(Error::Invariant(format!("reconstruction error {err:e}")));
        }
        Ok(())
    }

    /// ‖V·diag(E)·V† − H‖ in spectral norm.
    pub fn reconstruction_error(&self) -> f64 {
        let diff = reconstruct(&self.energies, &self.eigenvectors) - self.hamiltonian.matrix();
        hermitian_spectral_norm(&diff)
    }
}

pub(crate) fn reconstruct(energies: &[f64], vectors: &CMatrix) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, &e) in energies.iter().enumerate() {
        scaled.column_mut(j).scale_mut(e);
    }
    scaled * vectors.adjoint()
}

/// max |(V†V − I)_ij|.
pub(crate) fn gram_deviation(v: &CMatrix) -> f64 {
    let g = v.adjoint() * v;
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

fn group_classes(sorted: &[f64], threshold: f64) -> Vec<Range<usize>> {
    let mut classes = Vec::new();
    let mut start = 0;
    for i in 1..sorted.len() {
        if sorted[i] - sorted[i - 1] > threshold {
            classes.push(start..i);
            start = i;
        }
    }
    classes.push(start..sorted.len());
    classes
}

/// Replaces the columns in `class` by Gram–Schmidt on P e_0, P e_1, …,
/// where P projects onto their span. Candidates whose residual falls below
/// a fixed fraction are skipped; if that leaves the class short the
/// largest remaining residuals fill it.
fn canonical_class_basis(vectors: &mut CMatrix, class: Range<usize>) {
    const ACCEPT: f64 = 1e-3;
    let n = vectors.nrows();
    let g = class.len();
    let block = vectors.columns(class.start, g).into_owned();
    let mut basis: Vec<CVector> = Vec::with_capacity(g);

    let residual = |j: usize, basis: &[CVector]| -> CVector {
        // P e_j = block · (row j of block)†
        let coeffs = block.row(j).adjoint();
        let mut r = &block * coeffs;
        for _ in 0..2 {
            for b in basis {
                let overlap = b.dotc(&r);
                r -= b * overlap;
            }
        }
        r
    };

    for j in 0..n {
        if basis.len() == g {
            break;
        }
        let r = residual(j, &basis);
        let norm = r.norm();
        if norm > ACCEPT {
            basis.push(r.unscale(norm));
        }
    }
    while basis.len() < g {
        let (_, r) = (0..n)
            .map(|j| (j, residual(j, &basis)))
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()).then(b.0.cmp(&a.0)))
            .expect("non-empty space");
        let norm = r.norm();
        basis.push(r.unscale(norm));
    }
    for (offset, b) in basis.into_iter().enumerate() {
        vectors.set_column(class.start + offset, &b);
    }
}

/// Rotates column `j` so its largest-magnitude entry (first on ties) is
/// real and positive.
fn fix_phase(vectors: &mut CMatrix, j: usize) {
    let col = vectors.column(j);
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in col.iter().enumerate() {
        let m = z.norm();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    let pivot = col[best];
    if best_mag > 0.0 {
        let phase = pivot.conj() / best_mag;
        let mut c = vectors.column_mut(j);
        c *= phase;
        c[best] = C64::new(c[best].norm(), 0.0);
    }
}
