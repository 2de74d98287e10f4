//! Ensemble execution: one instance per seed, checks merged in a fixed order.

use std::time::Instant;

use anyhow::{Context, Result};
use ethavg::bounds::{
    check_convexity_chain, check_deff_sandwich, check_equilibration, check_tails, check_thm1, check_thm2,
    check_thm3, BoundCheck, CheckContext, CheckName, CheckStatus, InitialState, Sampling, Thm3Options,
};
use ethavg::distinguish::{eigenstate_stats, Probe};
use ethavg::models::{
    build_eigenbasis_measurements, build_hamiltonian, build_random_coarse_measurements, gaussian_profile_vector,
    random_band_vector, ModelSpec,
};
use ethavg::qcore::{MeasurementSet, SpectralSystem, SubsystemPartition};
use ethavg::rng::{derive_seed, seeded};
use ethavg::thermal::{
    effective_dimension, select_band, select_band_by_fraction, select_band_by_index, time_average_pure,
    DegeneracyStructure, EnergyBand,
};
use ethavg::{Error, Tolerances};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{BandSpec, ExperimentConfig, InitialStateSpec, MeasurementSpec};

// Independent random streams per instance seed.
const STREAM_MEASUREMENTS: u64 = 1;
const STREAM_STATE: u64 = 2;
const STREAM_TIMES: u64 = 3;
const STREAM_THM3: u64 = 4;

/// Eigenstate statistics and state summary of one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub seed: u64,
    pub dim: usize,
    pub band_lo: usize,
    pub band_hi: usize,
    pub d: usize,
    /// Effective dimension of the instance's time-averaged state.
    pub d_eff: f64,
    pub d_mean: f64,
    pub d_rms: f64,
    pub d_max: f64,
    pub argmax: usize,
    #[serde(skip)]
    pub energies: Vec<f64>,
    #[serde(skip)]
    pub per_eigenstate: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckAggregate {
    pub name: CheckName,
    pub passed: usize,
    pub failed: usize,
    pub inapplicable: usize,
    /// Smallest rhs − lhs over applicable rows.
    pub min_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Distribution {
    fn of(values: impl Iterator<Item = f64>) -> Option<Self> {
        let v: Vec<f64> = values.collect();
        if v.is_empty() {
            return None;
        }
        Some(Self {
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: v.iter().sum::<f64>() / v.len() as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub checks: Vec<CheckAggregate>,
    pub theorem_failures: usize,
    pub statistical_failures: usize,
    pub d_mean: Option<Distribution>,
    pub d_rms: Option<Distribution>,
    /// Histogram of d_eff/d over ten equal bins of [0, 1].
    pub d_eff_fraction_histogram: Vec<HistogramBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub instances: Vec<InstanceSummary>,
    pub checks: Vec<BoundCheck>,
    pub aggregate: Aggregate,
}

impl ExperimentReport {
    /// Failed checks that are theorems rather than sampled surrogates.
    pub fn theorem_failures(&self) -> usize {
        self.aggregate.theorem_failures
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub instances: Vec<InstanceTiming>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceTiming {
    pub seed: u64,
    pub seconds: f64,
}

struct Instance {
    summary: InstanceSummary,
    checks: Vec<BoundCheck>,
    seconds: f64,
}

/// Runs every instance of the ensemble. Instances run in parallel; the
/// report is assembled in seed order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(ExperimentReport, Timings)> {
    let start = Instant::now();
    let names = config.resolved_checks();
    let seeds: Vec<u64> = (0..config.ensemble.n_seeds as u64)
        .map(|i| config.ensemble.base_seed.wrapping_add(i))
        .collect();
    let instances: Vec<Instance> = seeds
        .par_iter()
        .map(|&seed| run_instance(config, &names, seed).with_context(|| format!("instance with seed {seed}")))
        .collect::<Result<_>>()?;

    let timings = Timings {
        total_seconds: start.elapsed().as_secs_f64(),
        instances: instances
            .iter()
            .map(|i| InstanceTiming {
                seed: i.summary.seed,
                seconds: i.seconds,
            })
            .collect(),
    };
    let mut checks = Vec::new();
    let mut summaries = Vec::new();
    for inst in instances {
        checks.extend(inst.checks);
        summaries.push(inst.summary);
    }
    let aggregate = aggregate(&names, &checks, &summaries);
    let report = ExperimentReport {
        config: config.clone(),
        instances: summaries,
        checks,
        aggregate,
    };
    Ok((report, timings))
}

fn instance_model(config: &ExperimentConfig, seed: u64) -> ModelSpec {
    ModelSpec {
        seed,
        ..config.model.clone()
    }
}

fn build_band(spec: &BandSpec, sys: &SpectralSystem) -> ethavg::Result<EnergyBand> {
    match *spec {
        BandSpec::Fractional { lo, hi } => select_band_by_fraction(sys, lo, hi),
        BandSpec::Index { lo, hi } => select_band_by_index(sys, lo..=hi),
        BandSpec::Energy { e_min, width } => select_band(sys, e_min, width),
    }
}

enum Measurements {
    Set(MeasurementSet),
    Subsystem(SubsystemPartition),
}

impl Measurements {
    fn probe(&self) -> Probe<'_> {
        match self {
            Measurements::Set(ms) => Probe::Set(ms),
            Measurements::Subsystem(p) => Probe::Subsystem(*p),
        }
    }
}

fn build_measurements(
    spec: &MeasurementSpec,
    band: &EnergyBand,
    sys: &SpectralSystem,
    seed: u64,
) -> ethavg::Result<Measurements> {
    Ok(match *spec {
        MeasurementSpec::Eigenbasis => Measurements::Set(build_eigenbasis_measurements(band, sys)?),
        MeasurementSpec::RandomCoarse { n_povms, outcomes } => Measurements::Set(build_random_coarse_measurements(
            sys.dim(),
            n_povms,
            outcomes,
            derive_seed(seed, STREAM_MEASUREMENTS),
        )?),
        MeasurementSpec::Subsystem { dim_s, order } => {
            if dim_s == 0 || !sys.dim().is_multiple_of(dim_s) {
                return Err(Error::InvalidParameter(format!(
                    "subsystem dimension {dim_s} does not divide {}",
                    sys.dim()
                )));
            }
            Measurements::Subsystem(SubsystemPartition::new(dim_s, sys.dim() / dim_s, order)?)
        }
    })
}

/// The check groups that produce rows for `name`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Group {
    Equilibration,
    Convexity,
    Thm1,
    Thm2,
    Tails,
    Sandwich,
    Thm3,
}

fn group_of(name: CheckName) -> Group {
    match name {
        CheckName::Equilibration => Group::Equilibration,
        CheckName::ConvexityChain => Group::Convexity,
        CheckName::Thm1Rms | CheckName::Thm1Mean => Group::Thm1,
        CheckName::Thm2Finite | CheckName::Thm2Subsystem => Group::Thm2,
        CheckName::Tails => Group::Tails,
        CheckName::DeffSandwich => Group::Sandwich,
        CheckName::Thm3Finite | CheckName::Thm3Subsystem => Group::Thm3,
    }
}

fn run_instance(config: &ExperimentConfig, names: &[CheckName], seed: u64) -> Result<Instance> {
    let start = Instant::now();
    let sys = build_hamiltonian(&instance_model(config, seed))?;
    let band = build_band(&config.band, &sys)?;
    let measurements = build_measurements(&config.measurements, &band, &sys, seed)?;
    let probe = measurements.probe();

    let mut rng = seeded(derive_seed(seed, STREAM_STATE));
    let psi = match config.initial_state {
        InitialStateSpec::BandHaar => random_band_vector(&band, &sys, &mut rng)?,
        InitialStateSpec::GaussianProfile { tail_weight } => gaussian_profile_vector(&sys, &band, tail_weight, &mut rng)?,
    };
    let omega = time_average_pure(&psi, &sys)?;
    let degeneracy = sys.is_degenerate().then(|| DegeneracyStructure::from_system(&sys));
    let d_eff = effective_dimension(&omega, degeneracy.as_ref())?;
    let stats = eigenstate_stats(&band, &sys, &probe)?;

    let band_context = CheckContext {
        seed: Some(seed),
        band_lo: band.index_lo(),
        band_hi: band.index_hi(),
        d: band.d(),
        ..CheckContext::default()
    };
    let mut groups: Vec<Group> = names.iter().map(|&n| group_of(n)).collect();
    groups.dedup();

    let mut rows = Vec::new();
    for group in groups {
        let wanted: Vec<CheckName> = names.iter().copied().filter(|&n| group_of(n) == group).collect();
        let (runnable, blocked): (Vec<CheckName>, Vec<CheckName>) =
            wanted.iter().partition(|&&n| config.inapplicability(n).is_none());
        for n in blocked {
            let reason = config.inapplicability(n).unwrap_or_default();
            rows.push(BoundCheck::inapplicable(n, band_context.clone(), reason));
        }
        if runnable.is_empty() {
            continue;
        }
        let result: ethavg::Result<Vec<BoundCheck>> = match group {
            Group::Equilibration => {
                let sampling = Sampling {
                    n_times: config.sampling.n_times,
                    t_max: config.sampling.t_max,
                    seed: derive_seed(seed, STREAM_TIMES),
                };
                check_equilibration(
                    &InitialState::Pure(psi.clone()),
                    &sys,
                    &probe,
                    &sampling,
                    config.equilibration_variant,
                )
                .map(|c| vec![c])
            }
            Group::Convexity => check_convexity_chain(&omega, &band, &sys, &probe).map(Vec::from),
            Group::Thm1 => check_thm1(&omega, &band, &sys, &probe).map(Vec::from),
            Group::Thm2 => check_thm2(&band, &sys, &probe).map(|c| vec![c]),
            Group::Tails => check_tails(&omega, &band, &sys, &probe).map(|c| vec![c]),
            Group::Sandwich => check_deff_sandwich(&omega, &band, &sys).map(Vec::from),
            Group::Thm3 => {
                let options = Thm3Options {
                    n_restarts: config.thm3.n_restarts,
                    seed: derive_seed(seed, STREAM_THM3),
                };
                check_thm3(&band, &sys, &probe, &options).map(|c| vec![c])
            }
        };
        match result {
            Ok(checks) => rows.extend(
                checks
                    .into_iter()
                    .filter(|c| runnable.contains(&c.name))
                    .map(|c| finish_row(c, seed, &config.tolerances)),
            ),
            Err(e @ Error::Invariant(_)) => {
                for n in runnable {
                    let mut c = BoundCheck::inapplicable(n, band_context.clone(), e.to_string());
                    c.status = CheckStatus::Failed;
                    rows.push(c);
                }
            }
            Err(e) => {
                for n in runnable {
                    rows.push(BoundCheck::inapplicable(n, band_context.clone(), e.to_string()));
                }
            }
        }
    }
    // Stable sort keeps the order rows were produced in within a name.
    rows.sort_by_key(|c| c.name);

    let summary = InstanceSummary {
        seed,
        dim: sys.dim(),
        band_lo: band.index_lo(),
        band_hi: band.index_hi(),
        d: band.d(),
        d_eff,
        d_mean: stats.mean,
        d_rms: stats.rms,
        d_max: stats.max,
        argmax: stats.argmax,
        energies: sys.energies()[band.indices()].to_vec(),
        per_eigenstate: stats.per_eigenstate,
    };
    Ok(Instance {
        summary,
        checks: rows,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Stamps the seed and applies the configured bound slack. A failure the
/// check recorded for another reason (a violated witness bound) stands.
fn finish_row(mut c: BoundCheck, seed: u64, tol: &Tolerances) -> BoundCheck {
    c.context.seed = Some(seed);
    if c.status == CheckStatus::Inapplicable {
        return c;
    }
    let forced = c.status == CheckStatus::Failed && c.lhs <= c.rhs + Tolerances::DEFAULT.bound_slack;
    if !forced {
        c.status = if c.lhs <= c.rhs + tol.bound_slack {
            CheckStatus::Passed
        } else {
            CheckStatus::Failed
        };
    }
    c
}

fn aggregate(names: &[CheckName], checks: &[BoundCheck], instances: &[InstanceSummary]) -> Aggregate {
    let per_check: Vec<CheckAggregate> = names
        .iter()
        .map(|&name| {
            let rows: Vec<&BoundCheck> = checks.iter().filter(|c| c.name == name).collect();
            let count = |s| rows.iter().filter(|c| c.status == s).count();
            let min_margin = rows
                .iter()
                .filter(|c| c.status != CheckStatus::Inapplicable && c.margin.is_finite())
                .map(|c| c.margin)
                .reduce(f64::min);
            CheckAggregate {
                name,
                passed: count(CheckStatus::Passed),
                failed: count(CheckStatus::Failed),
                inapplicable: count(CheckStatus::Inapplicable),
                min_margin,
            }
        })
        .collect();
    let failed = |statistical: bool| {
        checks
            .iter()
            .filter(|c| c.status == CheckStatus::Failed && c.name.is_statistical() == statistical)
            .count()
    };
    let mut histogram: Vec<HistogramBin> = (0..10)
        .map(|i| HistogramBin {
            lo: i as f64 / 10.0,
            hi: (i + 1) as f64 / 10.0,
            count: 0,
        })
        .collect();
    for inst in instances {
        let x = inst.d_eff / inst.d as f64;
        let bin = ((x * 10.0).floor().max(0.0) as usize).min(9);
        histogram[bin].count += 1;
    }
    Aggregate {
        checks: per_check,
        theorem_failures: failed(false),
        statistical_failures: failed(true),
        d_mean: Distribution::of(instances.iter().map(|i| i.d_mean)),
        d_rms: Distribution::of(instances.iter().map(|i| i.d_rms)),
        d_eff_fraction_histogram: histogram,
    }
}
