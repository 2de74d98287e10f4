use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BoundCheck, CheckContext, CheckName};
use crate::adversarial::{valid_k_range, witness_finite_in_basis, witness_subsystem_in_basis, WitnessReport};
use crate::distinguish::{distance, dmean_max_heuristic, stats_in_basis, Probe, Reference};
use crate::error::{Error, Result};
use crate::models::nondegenerate_gaps_check;
use crate::qcore::{CMatrix, CVector, DensityMatrix, SpectralSystem};
use crate::rng::{derive_seed, seeded};
use crate::thermal::{
    deff_sandwich, effective_dimension, microcanonical, tails_decompose, time_average, time_average_pure,
    DegeneracyStructure, EnergyBand, EnergyFrame, TimeAveragedState,
};
use crate::tolerance::Tolerances;

/// An initial state ρ(0).
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Pure(CVector),
    Mixed(DensityMatrix),
}

impl InitialState {
    pub fn time_average(&self, sys: &SpectralSystem) -> Result<TimeAveragedState> {
        match self {
            InitialState::Pure(psi) => time_average_pure(psi, sys),
            InitialState::Mixed(rho) => time_average(rho, sys),
        }
    }

    fn frame<'a>(&self, sys: &'a SpectralSystem) -> Result<EnergyFrame<'a>> {
        match self {
            InitialState::Pure(psi) => EnergyFrame::from_vector(psi, sys),
            InitialState::Mixed(rho) => EnergyFrame::from_state(rho, sys),
        }
    }
}

/// Random sampling times for the equilibration surrogate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    pub n_times: usize,
    /// Horizon of the uniform time distribution; 10⁴ divided by the
    /// smallest level gap when absent.
    pub t_max: Option<f64>,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            n_times: 200,
            t_max: None,
            seed: 0,
        }
    }
}

/// What replaces N_M in the equilibration bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibrationVariant {
    /// N_M of a finite measurement set; subsystem probes are inapplicable.
    #[default]
    FiniteSet,
    /// N_M for finite sets, d_S for subsystem probes.
    SubsystemDimension,
}

fn band_context(band: &EnergyBand) -> CheckContext {
    CheckContext {
        band_lo: band.index_lo(),
        band_hi: band.index_hi(),
        d: band.d(),
        ..CheckContext::default()
    }
}

fn full_context(sys: &SpectralSystem) -> CheckContext {
    CheckContext {
        band_lo: 0,
        band_hi: sys.dim() - 1,
        d: sys.dim(),
        ..CheckContext::default()
    }
}

fn band_columns(omega: &TimeAveragedState, band: &EnergyBand) -> CMatrix {
    omega.basis().columns(band.index_lo(), band.d()).into_owned()
}

/// 1/Σ_m tr(Π_m ω)² on degenerate spectra, 1/Σp² otherwise.
fn deff_for(omega: &TimeAveragedState, sys: &SpectralSystem) -> Result<f64> {
    if sys.is_degenerate() {
        effective_dimension(omega, Some(&DegeneracyStructure::from_system(sys)))
    } else {
        effective_dimension(omega, None)
    }
}

fn require_in_band(omega: &TimeAveragedState, band: &EnergyBand, sys: &SpectralSystem) -> Result<()> {
    omega.check_for(sys)?;
    band.check_for(sys)?;
    let outside = omega.out_of_band_weight(band);
    if outside > Tolerances::DEFAULT.trace {
        return Err(Error::NotInBand(outside));
    }
    Ok(())
}

/// D(ω, Ω) ≤ D_RMS √(d/d_eff − 1) ≤ √(D_mean (d/d_eff − 1)), with the
/// eigenstate statistics taken in ω's own eigenbasis. Returns the RMS-form
/// and mean-form checks.
pub fn check_thm1(
    omega: &TimeAveragedState,
    band: &EnergyBand,
    sys: &SpectralSystem,
    probe: &Probe,
) -> Result<[BoundCheck; 2]> {
    require_in_band(omega, band, sys)?;
    let stats = stats_in_basis(band, &band_columns(omega, band), probe)?;
    let d_eff = deff_for(omega, sys)?;
    let omega_mc = microcanonical(band);
    let lhs = distance(omega.state(), &omega_mc, probe)?;
    let factor = (band.d() as f64 / d_eff - 1.0).max(0.0);
    let rhs_rms = stats.rms * factor.sqrt();
    let rhs_mean = (stats.mean * factor).sqrt();
    if rhs_rms > rhs_mean + Tolerances::DEFAULT.bound_slack {
        return Err(Error::Invariant(format!(
            "RMS-form bound {rhs_rms} exceeds mean-form bound {rhs_mean}"
        )));
    }
    let context = CheckContext {
        d_eff: Some(d_eff),
        capacity: Some(probe.capacity()),
        ..band_context(band)
    };
    Ok([
        BoundCheck::evaluate(CheckName::Thm1Rms, lhs, rhs_rms, context.clone()),
        BoundCheck::evaluate(CheckName::Thm1Mean, lhs, rhs_mean, context),
    ])
}

/// D(ω, Ω) ≤ Σ p_n D(ρ_n, Ω) ≤ max_n D(ρ_n, Ω) over the band, in ω's
/// eigenbasis.
pub fn check_convexity_chain(
    omega: &TimeAveragedState,
    band: &EnergyBand,
    sys: &SpectralSystem,
    probe: &Probe,
) -> Result<[BoundCheck; 2]> {
    require_in_band(omega, band, sys)?;
    let stats = stats_in_basis(band, &band_columns(omega, band), probe)?;
    let p = &omega.weights()[band.indices()];
    let weighted: f64 = p.iter().zip(&stats.per_eigenstate).map(|(p, v)| p * v).sum();
    let lhs = distance(omega.state(), &microcanonical(band), probe)?;
    let context = CheckContext {
        capacity: Some(probe.capacity()),
        ..band_context(band)
    };
    Ok([
        BoundCheck::evaluate(CheckName::ConvexityChain, lhs, weighted, context.clone())
            .with_note("D(omega, Omega) <= sum_n p_n D(rho_n, Omega)"),
        BoundCheck::evaluate(CheckName::ConvexityChain, weighted, stats.max, context)
            .with_note("sum_n p_n D(rho_n, Omega) <= max_n D(rho_n, Omega)"),
    ])
}

/// Monte-Carlo estimate of ⟨D(ρ(t), ω)⟩_t against N_M/(4√d_eff). A miss
/// is re-evaluated once with ten times as many samples.
pub fn check_equilibration(
    initial: &InitialState,
    sys: &SpectralSystem,
    probe: &Probe,
    sampling: &Sampling,
    variant: EquilibrationVariant,
) -> Result<BoundCheck> {
    let mut context = full_context(sys);
    context.capacity = Some(probe.capacity());
    if probe.is_subsystem() && variant == EquilibrationVariant::FiniteSet {
        return Ok(BoundCheck::inapplicable(
            CheckName::Equilibration,
            context,
            "subsystem probe requires the subsystem-dimension variant",
        ));
    }
    let gaps = nondegenerate_gaps_check(sys, Tolerances::DEFAULT.gap);
    if !gaps.is_nondegenerate {
        return Ok(BoundCheck::inapplicable(
            CheckName::Equilibration,
            context,
            format!("{} energy-gap coincidences", gaps.gap_collision_count),
        ));
    }
    let omega = initial.time_average(sys)?;
    let d_eff = effective_dimension(&omega, None)?;
    context.d_eff = Some(d_eff);
    let rhs = probe.capacity() as f64 / (4.0 * d_eff.sqrt());
    let t_max = sampling
        .t_max
        .unwrap_or_else(|| sys.min_level_gap().map_or(1.0, |g| 1e4 / g));
    if !(t_max > 0.0 && t_max.is_finite()) || sampling.n_times == 0 {
        return Err(Error::InvalidParameter("sampling needs n_times > 0 and a positive finite t_max".into()));
    }

    let frame = initial.frame(sys)?;
    let reference = Reference::new(omega.state(), *probe)?;
    let lhs = time_averaged_distance(&frame, &reference, t_max, sampling.n_times, sampling.seed)?;
    let check = BoundCheck::evaluate(CheckName::Equilibration, lhs, rhs, context.clone());
    if check.passed() {
        return Ok(check);
    }
    let n = 10 * sampling.n_times;
    let lhs = time_averaged_distance(&frame, &reference, t_max, n, derive_seed(sampling.seed, 1))?;
    Ok(BoundCheck::evaluate(CheckName::Equilibration, lhs, rhs, context)
        .with_note(format!("re-run with {n} samples after a miss")))
}

fn time_averaged_distance(frame: &EnergyFrame, reference: &Reference, t_max: f64, n: usize, seed: u64) -> Result<f64> {
    let mut rng = seeded(seed);
    let times: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=t_max)).collect();
    let values: Vec<f64> = times
        .par_iter()
        .map(|&t| match frame.vector_at(t) {
            Some(psi) => reference.distance_to_vector(&psi),
            None => reference.distance_to_state(&frame.state_at(t)),
        })
        .collect::<Result<_>>()?;
    Ok(values.iter().sum::<f64>() / n as f64)
}

/// Multiplier turning a witness distance into a bound on D_mean.
fn capacity_factor(probe: &Probe) -> f64 {
    match probe {
        Probe::Set(ms) => ms.total_outcomes() as f64,
        Probe::Subsystem(p) => (p.dim_s() as f64).powf(2.5),
    }
}

fn witnesses(band: &EnergyBand, sys: &SpectralSystem, basis: &CMatrix, probe: &Probe) -> Result<Option<Vec<WitnessReport>>> {
    let range = match valid_k_range(band.d()) {
        Ok(r) => r,
        Err(Error::InvalidSubsetSize { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    range
        .map(|k| match probe {
            Probe::Set(ms) => witness_finite_in_basis(band, sys, basis, ms, Some(k)),
            Probe::Subsystem(p) => witness_subsystem_in_basis(band, sys, basis, p, Some(k)),
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// Largest witness distance ε* with the k achieving it (first on ties).
fn best_witness(ws: &[WitnessReport]) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for w in ws {
        if w.lhs > best.0 {
            best = (w.lhs, w.k);
        }
    }
    best
}

/// D_mean ≤ N_M ε* (finite set) or D_mean ≤ d_S^{5/2} ε* (subsystem), where
/// ε* is the largest distance from Ω among the witness states for every
/// admissible k.
pub fn check_thm2(band: &EnergyBand, sys: &SpectralSystem, probe: &Probe) -> Result<BoundCheck> {
    band.check_for(sys)?;
    if band.d() < 4 {
        return Err(Error::BandTooSmall(band.d()));
    }
    let name = if probe.is_subsystem() {
        CheckName::Thm2Subsystem
    } else {
        CheckName::Thm2Finite
    };
    let mut context = band_context(band);
    context.capacity = Some(probe.capacity());
    let Some(ws) = witnesses(band, sys, &sys.basis_columns(band.indices()), probe)? else {
        return Ok(BoundCheck::inapplicable(name, context, "no integer k with d/4 <= k <= d/3"));
    };
    let (epsilon, k) = best_witness(&ws);
    context.k = Some(k);
    context.d_eff = Some(k as f64);
    context.epsilon = Some(epsilon);
    let check = BoundCheck::evaluate(name, ws[0].d_mean, capacity_factor(probe) * epsilon, context);
    Ok(witness_verdict(check, &ws))
}

fn witness_verdict(check: BoundCheck, ws: &[WitnessReport]) -> BoundCheck {
    match ws.iter().find(|w| !w.satisfied) {
        Some(w) => {
            let mut c = check.with_note(format!(
                "witness k={} violates its lower bound: {} < {}",
                w.k, w.lhs, w.rhs
            ));
            c.status = super::CheckStatus::Failed;
            c
        }
        None => check,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thm3Options {
    pub n_restarts: usize,
    pub seed: u64,
}

impl Default for Thm3Options {
    fn default() -> Self {
        Self { n_restarts: 4, seed: 0 }
    }
}

/// The degenerate analogue of `check_thm2`: D_mean,max (estimated from
/// below by rotating inside degenerate blocks) against N_M ε* or
/// d_S^{5/2} ε*, with witnesses built in the maximizing basis. Inapplicable
/// when the band's largest degeneracy g exceeds d/4.
pub fn check_thm3(band: &EnergyBand, sys: &SpectralSystem, probe: &Probe, options: &Thm3Options) -> Result<BoundCheck> {
    band.check_for(sys)?;
    if band.d() < 4 {
        return Err(Error::BandTooSmall(band.d()));
    }
    let name = if probe.is_subsystem() {
        CheckName::Thm3Subsystem
    } else {
        CheckName::Thm3Finite
    };
    let mut context = band_context(band);
    context.capacity = Some(probe.capacity());
    let degeneracy = DegeneracyStructure::from_system(sys);
    let g = degeneracy
        .classes()
        .iter()
        .filter(|c| band.contains(c.start))
        .map(|c| c.len())
        .max()
        .unwrap_or(1);
    if 4 * g > band.d() {
        return Ok(BoundCheck::inapplicable(
            name,
            context,
            format!("degeneracy g={g} exceeds d/4 = {}", band.d() as f64 / 4.0),
        ));
    }
    let estimate = dmean_max_heuristic(band, sys, &degeneracy, probe, options.n_restarts, options.seed)?;
    let Some(ws) = witnesses(band, sys, &estimate.basis, probe)? else {
        return Ok(BoundCheck::inapplicable(name, context, "no integer k with d/4 <= k <= d/3"));
    };
    let threshold = band.d() as f64 / (4.0 * g as f64);
    let mut min_deff = f64::INFINITY;
    for w in &ws {
        let deff = w.degenerate_deff(&degeneracy)?;
        if deff < threshold - Tolerances::DEFAULT.bound_slack {
            return Err(Error::Invariant(format!(
                "witness k={} has effective dimension {deff} below d/(4g) = {threshold}",
                w.k
            )));
        }
        min_deff = min_deff.min(deff);
    }
    let (epsilon, k) = best_witness(&ws);
    context.k = Some(k);
    context.d_eff = Some(min_deff);
    context.epsilon = Some(epsilon);
    let check = BoundCheck::evaluate(name, estimate.value, capacity_factor(probe) * epsilon, context).with_note(
        format!("g={g}; lhs is a heuristic lower bound on the maximum over block bases"),
    );
    Ok(witness_verdict(check, &ws))
}

/// D(ω, Ω^Δ) ≤ δ + √(D_mean (d/d_eff(ω^Δ) − 1)) for a state with weight δ
/// outside the band.
pub fn check_tails(omega: &TimeAveragedState, band: &EnergyBand, sys: &SpectralSystem, probe: &Probe) -> Result<BoundCheck> {
    omega.check_for(sys)?;
    band.check_for(sys)?;
    let parts = tails_decompose(omega, band)?;
    let omega_mc = microcanonical(band);
    let lhs = distance(omega.state(), &omega_mc, probe)?;
    let stats = stats_in_basis(band, &band_columns(&parts.omega_band, band), probe)?;
    let d_eff = deff_for(&parts.omega_band, sys)?;
    let rhs = parts.delta + (stats.mean * (band.d() as f64 / d_eff - 1.0).max(0.0)).sqrt();
    let context = CheckContext {
        d_eff: Some(d_eff),
        capacity: Some(probe.capacity()),
        epsilon: None,
        note: Some(format!("delta={}", parts.delta)),
        ..band_context(band)
    };
    Ok(BoundCheck::evaluate(CheckName::Tails, lhs, rhs, context))
}

/// 1/(gΣp²) ≤ d_eff ≤ 1/Σp² for the degenerate effective dimension, with
/// p the eigenvalues of ω.
pub fn check_deff_sandwich(omega: &TimeAveragedState, band: &EnergyBand, sys: &SpectralSystem) -> Result<[BoundCheck; 2]> {
    omega.check_for(sys)?;
    band.check_for(sys)?;
    let degeneracy = DegeneracyStructure::from_system(sys);
    let d_eff = effective_dimension(omega, Some(&degeneracy))?;
    let (lower, upper) = deff_sandwich(omega, &degeneracy);
    let context = CheckContext {
        d_eff: Some(d_eff),
        note: Some(format!("g={}", degeneracy.g())),
        ..band_context(band)
    };
    Ok([
        BoundCheck::evaluate(CheckName::DeffSandwich, lower, d_eff, context.clone()),
        BoundCheck::evaluate(CheckName::DeffSandwich, d_eff, upper, context),
    ])
}
