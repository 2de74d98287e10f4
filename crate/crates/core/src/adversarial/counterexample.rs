use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distinguish::{dist_set, eigenstate_stats, Probe};
use crate::error::{Error, Result};
use crate::models::{build_eigenbasis_measurements, build_hamiltonian, haar_vector, ModelSpec};
use crate::rng::seeded;
use crate::thermal::{effective_dimension, microcanonical, select_band_by_index, time_average_pure, EnergyFrame};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleOptions {
    /// Random pure band states per run.
    pub n_states: usize,
    /// Random times per state for the time-invariance check.
    pub n_times: usize,
    /// Times are drawn uniformly from [0, t_max].
    pub t_max: f64,
    pub seed: u64,
}

impl Default for CounterexampleOptions {
    fn default() -> Self {
        Self {
            n_states: 50,
            n_times: 10,
            t_max: 1e3,
            seed: 0,
        }
    }
}

/// One random initial state of the suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub d_eff: f64,
    /// D(ω, Ω) under the eigenstate-projector measurements.
    pub distance: f64,
    /// max_m |p_m − 1/d|.
    pub closed_form: f64,
    /// √(1/d_eff − 1/d).
    pub intermediate_bound: f64,
    /// 1/√d_eff.
    pub bound: f64,
    /// Largest |tr(M_r ρ(t)) − tr(M_r ρ(0))| over sampled times and outcomes.
    pub max_probability_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub d: usize,
    /// 1 − 1/d.
    pub expected_eigenstate_value: f64,
    pub eigenstate_mean: f64,
    /// max_n |D(ρ_n, Ω) − (1 − 1/d)|.
    pub eigenstate_max_error: f64,
    pub states: Vec<StateRecord>,
    pub max_closed_form_error: f64,
    pub min_bound_margin: f64,
    pub max_probability_drift: f64,
    pub passed: bool,
}

const CLOSED_FORM_TOL: f64 = 1e-12;
const DRIFT_TOL: f64 = 1e-10;

/// Spectrum E_n = n on the full d-dimensional space with the binary
/// eigenstate measurements {ρ_n, 𝕀 − ρ_n}. Checks that every eigenstate
/// sits at distance 1 − 1/d from Ω, that random time-averaged states obey
/// D(ω, Ω) = max_m |p_m − 1/d| ≤ √(1/d_eff − 1/d) ≤ 1/√d_eff, and that all
/// outcome probabilities are constant in time.
pub fn counterexample_suite(d: usize, options: &CounterexampleOptions) -> Result<CounterexampleReport> {
    if d < 2 {
        return Err(Error::BandTooSmall(d));
    }
    let sys = build_hamiltonian(&ModelSpec::explicit_diagonal((0..d).map(|n| n as f64).collect()))?;
    let band = select_band_by_index(&sys, 0..=d - 1)?;
    let ms = build_eigenbasis_measurements(&band, &sys)?;
    let omega_mc = microcanonical(&band);

    let expected = 1.0 - 1.0 / d as f64;
    let stats = eigenstate_stats(&band, &sys, &Probe::Set(&ms))?;
    let eigenstate_max_error = stats
        .per_eigenstate
        .iter()
        .map(|v| (v - expected).abs())
        .fold(0.0, f64::max);

    let mut rng = seeded(options.seed);
    let mut states = Vec::with_capacity(options.n_states);
    for _ in 0..options.n_states {
        let psi = haar_vector(d, &mut rng);
        let omega = time_average_pure(&psi, &sys)?;
        let d_eff = effective_dimension(&omega, None)?;
        let distance = dist_set(omega.state(), &omega_mc, &ms)?.value;
        let closed_form = omega
            .weights()
            .iter()
            .map(|p| (p - 1.0 / d as f64).abs())
            .fold(0.0, f64::max);
        let intermediate_bound = (1.0 / d_eff - 1.0 / d as f64).max(0.0).sqrt();

        let frame = EnergyFrame::from_vector(&psi, &sys)?;
        let initial: Vec<f64> = ms.effects().map(|e| e.expectation_vector(&psi)).collect();
        let mut drift: f64 = 0.0;
        for _ in 0..options.n_times {
            let t = rng.random_range(0.0..=options.t_max);
            let psi_t = frame.vector_at(t).expect("pure frame");
            for (e, p0) in ms.effects().zip(&initial) {
                drift = drift.max((e.expectation_vector(&psi_t) - p0).abs());
            }
        }
        states.push(StateRecord {
            d_eff,
            distance,
            closed_form,
            intermediate_bound,
            bound: 1.0 / d_eff.sqrt(),
            max_probability_drift: drift,
        });
    }

    let max_closed_form_error = states
        .iter()
        .map(|s| (s.distance - s.closed_form).abs())
        .fold(0.0, f64::max);
    let min_bound_margin = states
        .iter()
        .map(|s| (s.bound - s.intermediate_bound).min(s.intermediate_bound - s.distance))
        .fold(f64::INFINITY, f64::min);
    let max_probability_drift = states.iter().map(|s| s.max_probability_drift).fold(0.0, f64::max);
    let passed = eigenstate_max_error <= CLOSED_FORM_TOL
        && max_closed_form_error <= CLOSED_FORM_TOL
        && min_bound_margin >= -CLOSED_FORM_TOL
        && max_probability_drift <= DRIFT_TOL;
    Ok(CounterexampleReport {
        d,
        expected_eigenstate_value: expected,
        eigenstate_mean: stats.mean,
        eigenstate_max_error,
        states,
        max_closed_form_error,
        min_bound_margin,
        max_probability_drift,
        passed,
    })
}
