use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Probe, Reference};
use crate::error::{Error, Result};
use crate::qcore::{CMatrix, SpectralSystem};
use crate::thermal::{microcanonical, EnergyBand};

/// Distinguishability of each band eigenstate from Ω and its summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenstateThermalStats {
    /// D(ρ_n, Ω) for n = index_lo, …, index_hi.
    pub per_eigenstate: Vec<f64>,
    pub mean: f64,
    pub rms: f64,
    pub max: f64,
    /// System index of the first eigenstate attaining `max`.
    pub argmax: usize,
    /// Largest mean found over intra-block basis rotations, if computed.
    pub mean_max: Option<f64>,
}

const ORDER_SLACK: f64 = 1e-12;

impl EigenstateThermalStats {
    /// Summaries of `values`, whose first entry belongs to system index
    /// `first_index`.
    pub fn from_values(values: Vec<f64>, first_index: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDimension);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let rms = (values.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        let (mut argmax, mut max) = (0, f64::NEG_INFINITY);
        for (i, &v) in values.iter().enumerate() {
            if v > max {
                max = v;
                argmax = i;
            }
        }
        let s = ORDER_SLACK;
        if !(-s <= mean && mean <= rms + s && rms <= max + s && max <= 1.0 + s) {
            return Err(Error::Invariant(format!(
                "power-mean ordering violated: mean {mean}, rms {rms}, max {max}"
            )));
        }
        Ok(Self {
            per_eigenstate: values,
            mean,
            rms,
            max,
            argmax: first_index + argmax,
            mean_max: None,
        })
    }
}

/// D(ρ_n, Ω) for every band eigenstate.
pub fn eigenstate_stats(band: &EnergyBand, sys: &SpectralSystem, probe: &Probe) -> Result<EigenstateThermalStats> {
    band.check_for(sys)?;
    let values = distances_in_basis(band, &sys.basis_columns(band.indices()), probe)?;
    EigenstateThermalStats::from_values(values, band.index_lo())
}

/// Like `eigenstate_stats`, for an arbitrary orthonormal basis of the band
/// given as the columns of `basis`.
pub fn stats_in_basis(band: &EnergyBand, basis: &CMatrix, probe: &Probe) -> Result<EigenstateThermalStats> {
    let values = distances_in_basis(band, basis, probe)?;
    EigenstateThermalStats::from_values(values, band.index_lo())
}

pub(crate) fn distances_in_basis(band: &EnergyBand, basis: &CMatrix, probe: &Probe) -> Result<Vec<f64>> {
    if basis.nrows() != band.system_dim() {
        return Err(Error::DimensionMismatch(band.system_dim(), basis.nrows()));
    }
    let omega = microcanonical(band);
    let reference = Reference::new(&omega, *probe)?;
    (0..basis.ncols())
        .into_par_iter()
        .map(|j| reference.distance_to_vector(&basis.column(j).into_owned()))
        .collect()
}
