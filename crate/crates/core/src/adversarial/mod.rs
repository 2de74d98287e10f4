//! Constructions from the necessity argument: the zero-sum subset
//! selection, witness states of effective dimension k, and the
//! counterexample measurement suite.

mod counterexample;
mod subset;
mod witness;

pub use counterexample::{counterexample_suite, CounterexampleOptions, CounterexampleReport, StateRecord};
pub use subset::{select_subset, SelectionCase, SubsetSelection, SubsetSelectionProblem};
pub use witness::{
    default_k, valid_k_range, witness_finite_in_basis, witness_state_finite, witness_state_subsystem,
    witness_subsystem_in_basis, WitnessReport, WitnessSelector,
};
