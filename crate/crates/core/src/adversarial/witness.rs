use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{select_subset, SubsetSelectionProblem};
use crate::distinguish::{dist_set, stats_in_basis, subsystem_distance, Probe};
use crate::error::{Error, Result};
use crate::qcore::{
    hermitian_operator_basis, partial_trace, partial_trace_pure, trace_product, CMatrix, MeasurementSet,
    SpectralSystem, SubsystemPartition,
};
use crate::thermal::{
    effective_dimension, microcanonical, BasisTag, DegeneracyStructure, EnergyBand, TimeAveragedState,
};
use crate::tolerance::Tolerances;

/// Which linear functional produced the values a_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSelector {
    /// Outcome `outcome` of POVM `povm`.
    Outcome { povm: usize, outcome: usize },
    /// Element `index` of the subsystem operator basis.
    OperatorBasis { index: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    /// ω = (1/k) Σ_j |b_{n_j}⟩⟨b_{n_j}|.
    pub omega: TimeAveragedState,
    pub k: usize,
    /// Selected band basis vectors, as system indices.
    pub indices: Vec<usize>,
    pub selector: WitnessSelector,
    /// 1/Σp²; equals k by construction.
    pub achieved_deff: f64,
    /// D(ω, Ω) under the probe.
    pub lhs: f64,
    /// D_mean / N_M, or d_S^{−5/2} D_mean for a subsystem.
    pub rhs: f64,
    /// Mean band-basis distinguishability the bound refers to.
    pub d_mean: f64,
    pub satisfied: bool,
}

/// The admissible witness sizes ceil(d/4) ≤ k ≤ floor(d/3).
pub fn valid_k_range(d: usize) -> Result<std::ops::RangeInclusive<usize>> {
    if d < 4 {
        return Err(Error::BandTooSmall(d));
    }
    let (lo, hi) = (d.div_ceil(4), d / 3);
    if lo > hi {
        return Err(Error::InvalidSubsetSize {
            k: lo,
            d,
            reason: "no integer k satisfies d/4 ≤ k ≤ d/3",
        });
    }
    Ok(lo..=hi)
}

/// ceil(d/4), the smallest admissible witness size.
pub fn default_k(d: usize) -> Result<usize> {
    valid_k_range(d).map(|r| *r.start())
}

fn resolve_k(d: usize, k: Option<usize>) -> Result<usize> {
    let range = valid_k_range(d)?;
    let k = k.unwrap_or(*range.start());
    if !range.contains(&k) {
        return Err(Error::InvalidSubsetSize {
            k,
            d,
            reason: "k must satisfy d/4 ≤ k ≤ d/3",
        });
    }
    Ok(k)
}

/// Witness for a finite measurement set in the system eigenbasis.
pub fn witness_state_finite(
    band: &EnergyBand,
    sys: &SpectralSystem,
    ms: &MeasurementSet,
    k: Option<usize>,
) -> Result<WitnessReport> {
    band.check_for(sys)?;
    witness_finite_in_basis(band, sys, &sys.basis_columns(band.indices()), ms, k)
}

/// Witness for a finite measurement set, built from an orthonormal band
/// basis whose columns each lie in one eigenspace of `sys`.
pub fn witness_finite_in_basis(
    band: &EnergyBand,
    sys: &SpectralSystem,
    band_basis: &CMatrix,
    ms: &MeasurementSet,
    k: Option<usize>,
) -> Result<WitnessReport> {
    band.check_for(sys)?;
    let k = resolve_k(band.d(), k)?;
    if ms.is_empty() {
        return Err(Error::EmptyMeasurementSet);
    }
    let omega_mc = microcanonical(band);
    let stats = stats_in_basis(band, band_basis, &Probe::Set(ms))?;

    // a_n for every outcome; keep the outcome with the largest Σ|a_n|.
    let columns: Vec<_> = band_basis.column_iter().map(|c| c.into_owned()).collect();
    let mut candidates = Vec::with_capacity(ms.total_outcomes());
    for (p, povm) in ms.povms().iter().enumerate() {
        for (r, e) in povm.outcomes().iter().enumerate() {
            candidates.push((p, r, e));
        }
    }
    let scored: Vec<(f64, Vec<f64>)> = candidates
        .par_iter()
        .map(|(_, _, e)| {
            let reference = e.expectation(omega_mc.matrix());
            let a: Vec<f64> = columns.iter().map(|v| e.expectation_vector(v) - reference).collect();
            (a.iter().map(|x| x.abs()).sum(), a)
        })
        .collect();
    let best = first_argmax(scored.iter().map(|(s, _)| *s));
    let (p, r, _) = candidates[best];
    let values = centred(scored[best].1.clone());

    let (omega, indices) = build_witness(band, sys, band_basis, values, k)?;
    let lhs = dist_set(omega.state(), &omega_mc, ms)?.value;
    let rhs = stats.mean / ms.total_outcomes() as f64;
    report(omega, k, indices, WitnessSelector::Outcome { povm: p, outcome: r }, lhs, rhs, stats.mean)
}

/// Witness for all measurements on a subsystem, in the system eigenbasis.
pub fn witness_state_subsystem(
    band: &EnergyBand,
    sys: &SpectralSystem,
    part: &SubsystemPartition,
    k: Option<usize>,
) -> Result<WitnessReport> {
    band.check_for(sys)?;
    witness_subsystem_in_basis(band, sys, &sys.basis_columns(band.indices()), part, k)
}

/// Subsystem witness from an arbitrary block-respecting band basis.
pub fn witness_subsystem_in_basis(
    band: &EnergyBand,
    sys: &SpectralSystem,
    band_basis: &CMatrix,
    part: &SubsystemPartition,
    k: Option<usize>,
) -> Result<WitnessReport> {
    band.check_for(sys)?;
    let k = resolve_k(band.d(), k)?;
    let omega_mc = microcanonical(band);
    let omega_s = partial_trace(&omega_mc, part)?.into_matrix();
    let stats = stats_in_basis(band, band_basis, &Probe::Subsystem(*part))?;

    let diffs: Vec<CMatrix> = band_basis
        .column_iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|c| partial_trace_pure(&c.into_owned(), part).map(|m| m - &omega_s))
        .collect::<Result<_>>()?;
    let basis = hermitian_operator_basis(part.dim_s())?;
    let scored: Vec<(f64, Vec<f64>)> = basis
        .iter()
        .map(|e| {
            let a: Vec<f64> = diffs.iter().map(|x| trace_product(x, e.matrix()).re).collect();
            (a.iter().map(|x| x.abs()).sum(), a)
        })
        .collect();
    let best = first_argmax(scored.iter().map(|(s, _)| *s));
    let values = centred(scored[best].1.clone());

    let (omega, indices) = build_witness(band, sys, band_basis, values, k)?;
    let lhs = subsystem_distance(omega.state(), &omega_mc, part)?;
    let rhs = (part.dim_s() as f64).powf(-2.5) * stats.mean;
    report(omega, k, indices, WitnessSelector::OperatorBasis { index: best }, lhs, rhs, stats.mean)
}

fn first_argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Removes the rounding residue of Σ a_n = 0.
fn centred(mut a: Vec<f64>) -> Vec<f64> {
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    for x in &mut a {
        *x -= mean;
    }
    a
}

fn build_witness(
    band: &EnergyBand,
    sys: &SpectralSystem,
    band_basis: &CMatrix,
    values: Vec<f64>,
    k: usize,
) -> Result<(TimeAveragedState, Vec<usize>)> {
    let problem = SubsetSelectionProblem::new(values, k)?;
    let selection = select_subset(&problem);
    let mut weights = vec![0.0; sys.dim()];
    let indices: Vec<usize> = selection.indices.iter().map(|&j| band.index_lo() + j).collect();
    for &n in &indices {
        weights[n] = 1.0 / k as f64;
    }
    let own = sys.basis_columns(band.indices());
    let rotated = (band_basis - &own).norm() > 0.0;
    let omega = if rotated {
        let mut full = sys.eigenvectors().clone();
        full.columns_mut(band.index_lo(), band.d()).copy_from(band_basis);
        TimeAveragedState::from_weights_in(sys, weights, full, BasisTag::BlockRotated)?
    } else {
        TimeAveragedState::from_weights(sys, weights)?
    };
    Ok((omega, indices))
}

fn report(
    omega: TimeAveragedState,
    k: usize,
    indices: Vec<usize>,
    selector: WitnessSelector,
    lhs: f64,
    rhs: f64,
    d_mean: f64,
) -> Result<WitnessReport> {
    let achieved_deff = effective_dimension(&omega, None)?;
    Ok(WitnessReport {
        omega,
        k,
        indices,
        selector,
        achieved_deff,
        lhs,
        rhs,
        d_mean,
        satisfied: lhs >= rhs - Tolerances::DEFAULT.bound_slack,
    })
}

impl WitnessReport {
    /// The degenerate effective dimension 1/Σ_m tr(Π_m ω)².
    pub fn degenerate_deff(&self, degeneracy: &DegeneracyStructure) -> Result<f64> {
        effective_dimension(&self.omega, Some(degeneracy))
    }
}
