//! Distinguishability under restricted measurement sets and on subsystems,
//! and eigenstate statistics over an energy band.

mod heuristic;
mod metrics;
mod stats;

pub use heuristic::{dmean_max_heuristic, MeanMaxEstimate};
pub use metrics::{dist_set, dist_single, distance, subsystem_distance, Probe, Reference, SetDistance};
pub use stats::{eigenstate_stats, stats_in_basis, EigenstateThermalStats};
