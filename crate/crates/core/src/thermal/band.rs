use std::ops::{Range, RangeInclusive};

use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, HermitianOperator, SpectralSystem};

/// A contiguous range of eigenstates [index_lo, index_hi] of one system.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBand {
    fingerprint: u64,
    system_dim: usize,
    index_lo: usize,
    index_hi: usize,
    e_min: f64,
    e_max: f64,
    projector: HermitianOperator,
}

impl EnergyBand {
    fn from_indices(sys: &SpectralSystem, lo: usize, hi: usize) -> Self {
        let v = sys.basis_columns(lo..hi + 1);
        let projector = HermitianOperator::from_trusted(&v * v.adjoint());
        Self {
            fingerprint: sys.fingerprint(),
            system_dim: sys.dim(),
            index_lo: lo,
            index_hi: hi,
            e_min: sys.energies()[lo],
            e_max: sys.energies()[hi],
            projector,
        }
    }

    pub fn index_lo(&self) -> usize {
        self.index_lo
    }

    pub fn index_hi(&self) -> usize {
        self.index_hi
    }

    /// Band dimension d.
    pub fn d(&self) -> usize {
        self.index_hi - self.index_lo + 1
    }

    pub fn indices(&self) -> Range<usize> {
        self.index_lo..self.index_hi + 1
    }

    pub fn contains(&self, n: usize) -> bool {
        (self.index_lo..=self.index_hi).contains(&n)
    }

    /// Lowest band energy.
    pub fn e_min(&self) -> f64 {
        self.e_min
    }

    /// Highest band energy.
    pub fn e_max(&self) -> f64 {
        self.e_max
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    /// Π_Δ in the system's computational basis.
    pub fn projector(&self) -> &HermitianOperator {
        &self.projector
    }

    /// Fails unless the band was selected from `sys`.
    pub fn check_for(&self, sys: &SpectralSystem) -> Result<()> {
        if sys.dim() != self.system_dim || sys.fingerprint() != self.fingerprint {
            return Err(Error::ForeignBand);
        }
        Ok(())
    }
}

/// All eigenstates with e_min ≤ E_n ≤ e_min + width. Both edges are
/// inclusive.
pub fn select_band(sys: &SpectralSystem, e_min: f64, width: f64) -> Result<EnergyBand> {
    let hi_e = e_min + width;
    let energies = sys.energies();
    let lo = energies.partition_point(|&e| e < e_min);
    let end = energies.partition_point(|&e| e <= hi_e);
    if width < 0.0 || lo >= end {
        return Err(Error::EmptyBand { lo: e_min, hi: hi_e });
    }
    Ok(EnergyBand::from_indices(sys, lo, end - 1))
}

/// Eigenstates with indices in `range`. The range may not split a
/// degeneracy class.
pub fn select_band_by_index(sys: &SpectralSystem, range: RangeInclusive<usize>) -> Result<EnergyBand> {
    let (lo, hi) = (*range.start(), *range.end());
    if lo > hi || hi >= sys.dim() {
        return Err(Error::InvalidParameter(format!(
            "index range {lo}..={hi} invalid for dimension {}",
            sys.dim()
        )));
    }
    for class in sys.degeneracy_classes() {
        let splits_lo = class.start < lo && lo < class.end;
        let splits_hi = class.start <= hi && hi + 1 < class.end;
        if splits_lo || splits_hi {
            return Err(Error::InvalidParameter(format!(
                "index range {lo}..={hi} splits the degenerate class {}..{}",
                class.start, class.end
            )));
        }
    }
    Ok(EnergyBand::from_indices(sys, lo, hi))
}

/// Eigenstates n with n/dim overlapping [lo_frac, hi_frac), widened
/// outwards to whole degeneracy classes.
pub fn select_band_by_fraction(sys: &SpectralSystem, lo_frac: f64, hi_frac: f64) -> Result<EnergyBand> {
    if !(0.0..=1.0).contains(&lo_frac) || !(0.0..=1.0).contains(&hi_frac) || lo_frac >= hi_frac {
        return Err(Error::InvalidParameter(format!(
            "fractional window [{lo_frac}, {hi_frac}) must satisfy 0 ≤ lo < hi ≤ 1"
        )));
    }
    let dim = sys.dim();
    let mut lo = ((lo_frac * dim as f64).floor() as usize).min(dim - 1);
    let mut hi = ((hi_frac * dim as f64).ceil() as usize).clamp(lo + 1, dim) - 1;
    for class in sys.degeneracy_classes() {
        if class.contains(&lo) {
            lo = class.start;
        }
        if class.contains(&hi) {
            hi = class.end - 1;
        }
    }
    Ok(EnergyBand::from_indices(sys, lo, hi))
}

/// Ω = Π_Δ / d.
pub fn microcanonical(band: &EnergyBand) -> DensityMatrix {
    DensityMatrix::from_trusted(band.projector().matrix().unscale(band.d() as f64))
}
