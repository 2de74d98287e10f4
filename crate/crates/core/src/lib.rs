//! Numerics for eigenstate thermalisation on average.
//!
//! The crate works with dense finite-dimensional quantum systems and covers
//! the whole chain from a Hamiltonian to a verified inequality:
//!
//! - [`qcore`]: Hermitian operators, density matrices, POVMs, partial traces
//!   and the deterministic Hermitian eigensolver wrapper.
//! - [`models`]: GUE, Ising-chain, scarred and degenerate Hamiltonians, plus
//!   measurement-set and random-state generators.
//! - [`thermal`]: energy bands, microcanonical and time-averaged states,
//!   effective dimension, unitary evolution and tails decomposition.
//! - [`distinguish`]: restricted-measurement distinguishability and
//!   eigenstate statistics over a band.
//! - [`adversarial`]: the subset-selection lemma, witness states and the
//!   fine-tuned counterexample measurement set.
//! - [`bounds`]: every bound evaluated as a [`bounds::BoundCheck`] record.
//!
//! Energies are dimensionless and `ħ = 1`, so times are in inverse energy
//! units.

pub mod adversarial;
pub mod bounds;
pub mod distinguish;
pub mod error;
pub mod models;
pub mod qcore;
pub mod rng;
pub mod thermal;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
