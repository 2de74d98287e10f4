//! Energy bands, microcanonical and time-averaged states, effective
//! dimension, unitary evolution and the tails decomposition.

mod band;
mod degeneracy;
mod evolve;
mod tails;
mod time_average;

pub use band::{microcanonical, select_band, select_band_by_fraction, select_band_by_index, EnergyBand};
pub use degeneracy::{deff_sandwich, effective_dimension, DegeneracyStructure};
pub use evolve::{evolve, EnergyFrame};
pub use tails::{tails_decompose, TailsDecomposition};
pub use time_average::{time_average, time_average_pure, BasisTag, TimeAveragedState};
