//! Numerical checks of the equilibration, thermalization and necessity
//! bounds. Every check returns `BoundCheck` records; a theorem-class check
//! that fails indicates a defect, not a property of the model.

mod checks;
mod record;

pub use checks::{
    check_convexity_chain, check_deff_sandwich, check_equilibration, check_tails, check_thm1, check_thm2,
    check_thm3, EquilibrationVariant, InitialState, Sampling, Thm3Options,
};
pub use record::{BoundCheck, CheckContext, CheckName, CheckStatus};
