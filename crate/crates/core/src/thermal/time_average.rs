use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{eig_hermitian, CMatrix, CVector, DensityMatrix, HermitianOperator, SpectralSystem};
use crate::tolerance::Tolerances;

use super::EnergyBand;

/// Which orthonormal basis the stored weights refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisTag {
    /// The eigenvectors of the spectral system, unchanged.
    SystemEigenbasis,
    /// Within each degenerate class the basis is rotated to diagonalize ω.
    BlockRotated,
}

/// ω = Σ_n p_n |b_n⟩⟨b_n|, where every b_n lies inside one energy
/// eigenspace. Weights are indexed over the full space.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeAveragedState {
    fingerprint: u64,
    weights: Vec<f64>,
    basis: CMatrix,
    basis_tag: BasisTag,
    state: DensityMatrix,
}

impl TimeAveragedState {
    /// Σ_n p_n ρ_n in the system eigenbasis.
    pub fn from_weights(sys: &SpectralSystem, weights: Vec<f64>) -> Result<Self> {
        Self::from_weights_in(sys, weights, sys.eigenvectors().clone(), BasisTag::SystemEigenbasis)
    }

    /// Σ_n p_n |b_n⟩⟨b_n| for the columns b_n of `basis`. The caller
    /// guarantees each column lies in one degeneracy class of `sys`.
    pub(crate) fn from_weights_in(
        sys: &SpectralSystem,
        mut weights: Vec<f64>,
        basis: CMatrix,
        basis_tag: BasisTag,
    ) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        if weights.len() != sys.dim() {
            return Err(Error::DimensionMismatch(sys.dim(), weights.len()));
        }
        if let Some(&w) = weights.iter().find(|&&w| w < -tol.weights || !w.is_finite()) {
            return Err(Error::NotPositive(w));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol.trace {
            return Err(Error::InvalidTrace(total));
        }
        for w in &mut weights {
            *w = w.max(0.0);
        }
        let state = DensityMatrix::from_trusted(weighted_projector_sum(&basis, &weights));
        Ok(Self {
            fingerprint: sys.fingerprint(),
            weights,
            basis,
            basis_tag,
            state,
        })
    }

    /// The same basis with new weights, renormalized to sum to one.
    pub(crate) fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), weights.len()));
        }
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 || weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidParameter("weights must be nonnegative with positive sum".into()));
        }
        let weights: Vec<f64> = weights.into_iter().map(|w| w / total).collect();
        let state = DensityMatrix::from_trusted(weighted_projector_sum(&self.basis, &weights));
        Ok(Self {
            fingerprint: self.fingerprint,
            weights,
            basis: self.basis.clone(),
            basis_tag: self.basis_tag,
            state,
        })
    }

    /// Weights p_n over the full space.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Columns are the vectors b_n the weights refer to.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn basis_tag(&self) -> BasisTag {
        self.basis_tag
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Σ_n p_n².
    pub fn purity(&self) -> f64 {
        self.weights.iter().map(|p| p * p).sum()
    }

    /// Weight outside the band.
    pub fn out_of_band_weight(&self, band: &EnergyBand) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(n, _)| !band.contains(*n))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn check_for(&self, sys: &SpectralSystem) -> Result<()> {
        if sys.fingerprint() != self.fingerprint || sys.dim() != self.dim() {
            return Err(Error::ForeignBand);
        }
        Ok(())
    }

    /// Checks weight normalization and ‖[ω, H]‖ within tolerance.
    pub fn check_invariants(&self, sys: &SpectralSystem, tol: &Tolerances) -> Result<()> {
        self.check_for(sys)?;
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > tol.trace {
            return Err(Error::InvalidTrace(total));
        }
        let h = sys.hamiltonian().matrix();
        let w = self.state.matrix();
        let comm = h * w - w * h;
        let scale = h.norm().max(1.0);
        let dev = comm.norm() / scale;
        if dev > tol.reconstruction {
            return Err(Error::Invariant(format!("time-averaged state does not commute with H ({dev:e})")));
        }
        Ok(())
    }
}

/// Σ_n w_n b_n b_n† over the columns with nonzero weight.
pub(crate) fn weighted_projector_sum(basis: &CMatrix, weights: &[f64]) -> CMatrix {
    let support: Vec<usize> = (0..weights.len()).filter(|&n| weights[n] > 0.0).collect();
    let n = basis.nrows();
    let mut b = CMatrix::zeros(n, support.len());
    let mut scaled = CMatrix::zeros(n, support.len());
    for (j, &k) in support.iter().enumerate() {
        b.set_column(j, &basis.column(k));
        scaled.set_column(j, &(basis.column(k) * crate::qcore::C64::new(weights[k], 0.0)));
    }
    scaled * b.adjoint()
}

/// The infinite-time average of e^{−iHt} ρ0 e^{iHt}: dephasing in the
/// energy eigenbasis, or block dephasing Σ_m Π_m ρ0 Π_m when the spectrum
/// is degenerate.
pub fn time_average(rho0: &DensityMatrix, sys: &SpectralSystem) -> Result<TimeAveragedState> {
    if rho0.dim() != sys.dim() {
        return Err(Error::DimensionMismatch(sys.dim(), rho0.dim()));
    }
    let v = sys.eigenvectors();
    let c = v.adjoint() * rho0.matrix() * v;
    dephase(sys, |range| c.view((range.start, range.start), (range.len(), range.len())).into_owned())
}

/// `time_average` for a pure initial state |ψ⟩⟨ψ|, without forming ρ0.
pub fn time_average_pure(psi: &CVector, sys: &SpectralSystem) -> Result<TimeAveragedState> {
    if psi.len() != sys.dim() {
        return Err(Error::DimensionMismatch(sys.dim(), psi.len()));
    }
    let norm = psi.norm();
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::InvalidParameter("zero state vector".into()));
    }
    let c = sys.eigenvectors().adjoint() * psi.unscale(norm);
    dephase(sys, |range| {
        let block = c.rows(range.start, range.len());
        block * block.adjoint()
    })
}

fn dephase(sys: &SpectralSystem, block: impl Fn(std::ops::Range<usize>) -> CMatrix) -> Result<TimeAveragedState> {
    let dim = sys.dim();
    let v = sys.eigenvectors();
    let mut weights = vec![0.0; dim];
    let mut basis = v.clone();
    let mut rotated = false;
    for class in sys.degeneracy_classes() {
        let b = block(class.clone());
        if class.len() == 1 {
            weights[class.start] = b[(0, 0)].re;
            continue;
        }
        rotated = true;
        let eig = eig_hermitian(&HermitianOperator::from_trusted(b))?;
        // Descending weights inside the block keep the support first.
        for (j, k) in (0..class.len()).rev().enumerate() {
            weights[class.start + j] = eig.energies()[k];
        }
        let cols = sys.basis_columns(class.clone());
        let w = eig.eigenvectors();
        for (j, k) in (0..class.len()).rev().enumerate() {
            basis.set_column(class.start + j, &(&cols * w.column(k)));
        }
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w = w.max(0.0) / total;
    }
    let tag = if rotated {
        BasisTag::BlockRotated
    } else {
        BasisTag::SystemEigenbasis
    };
    TimeAveragedState::from_weights_in(sys, weights, basis, tag)
}
