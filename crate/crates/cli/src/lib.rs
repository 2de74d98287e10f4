//! Experiment harness for the `ethavg` bound checks: JSON configs in,
//! JSON/CSV reports out.

pub mod config;
pub mod output;
pub mod runner;

pub use config::{parse_config, Diagnostic, ExperimentConfig, Severity};
pub use runner::{run_experiment, ExperimentReport, Timings};
