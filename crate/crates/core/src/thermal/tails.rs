use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

use super::{EnergyBand, TimeAveragedState};

/// ω = δ ω^C + (1 − δ) ω^Δ with ω^Δ supported on the band.
#[derive(Debug, Clone, PartialEq)]
pub struct TailsDecomposition {
    pub delta: f64,
    pub omega_band: TimeAveragedState,
    /// Absent when δ is numerically zero.
    pub omega_comp: Option<TimeAveragedState>,
}

/// Splits a time-averaged state into its band part and its tails. The band
/// must consist of whole degeneracy classes, which every band selector
/// guarantees.
pub fn tails_decompose(omega: &TimeAveragedState, band: &EnergyBand) -> Result<TailsDecomposition> {
    if omega.dim() != band.system_dim() {
        return Err(Error::DimensionMismatch(band.system_dim(), omega.dim()));
    }
    let p = omega.weights();
    let inside: f64 = band.indices().map(|n| p[n]).sum();
    let outside: f64 = (0..p.len()).filter(|&n| !band.contains(n)).map(|n| p[n]).sum();
    let delta = outside.clamp(0.0, 1.0);
    if inside <= Tolerances::DEFAULT.tails_zero {
        return Err(Error::OutsideBand);
    }
    let band_weights: Vec<f64> = (0..p.len())
        .map(|n| if band.contains(n) { p[n] / inside } else { 0.0 })
        .collect();
    let omega_band = omega.with_weights(band_weights)?;
    let omega_comp = if delta <= Tolerances::DEFAULT.tails_zero {
        None
    } else {
        let comp: Vec<f64> = (0..p.len())
            .map(|n| if band.contains(n) { 0.0 } else { p[n] / outside })
            .collect();
        Some(omega.with_weights(comp)?)
    };
    Ok(TailsDecomposition {
        delta,
        omega_band,
        omega_comp,
    })
}
