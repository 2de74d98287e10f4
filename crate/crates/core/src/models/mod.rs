//! Hamiltonian, measurement-set and initial-state generators.
//!
//! Every generator is a pure function of its arguments; randomness comes
//! from an explicit seed.

mod gaps;
mod hamiltonian;
mod measurements;
mod states;

pub use gaps::{nondegenerate_gaps_check, GapReport};
pub use hamiltonian::{
    build_hamiltonian, scar_indices, ModelKind, ModelSpec, DEFAULT_LONGITUDINAL_FIELD,
    DEFAULT_TRANSVERSE_FIELD, MAX_DIM,
};
pub use measurements::{build_eigenbasis_measurements, build_eigenbasis_measurements_in, build_random_coarse_measurements};
pub use states::{
    random_simplex_weights, gaussian_profile_vector, haar_unitary, haar_vector, random_band_vector,
};
