use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Equilibration,
    ConvexityChain,
    Thm1Rms,
    Thm1Mean,
    Thm2Finite,
    Thm2Subsystem,
    Tails,
    DeffSandwich,
    Thm3Finite,
    Thm3Subsystem,
}

impl CheckName {
    pub const ALL: [CheckName; 10] = [
        CheckName::Equilibration,
        CheckName::ConvexityChain,
        CheckName::Thm1Rms,
        CheckName::Thm1Mean,
        CheckName::Thm2Finite,
        CheckName::Thm2Subsystem,
        CheckName::Tails,
        CheckName::DeffSandwich,
        CheckName::Thm3Finite,
        CheckName::Thm3Subsystem,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Equilibration => "equilibration",
            CheckName::ConvexityChain => "convexity_chain",
            CheckName::Thm1Rms => "thm1_rms",
            CheckName::Thm1Mean => "thm1_mean",
            CheckName::Thm2Finite => "thm2_finite",
            CheckName::Thm2Subsystem => "thm2_subsystem",
            CheckName::Tails => "tails",
            CheckName::DeffSandwich => "deff_sandwich",
            CheckName::Thm3Finite => "thm3_finite",
            CheckName::Thm3Subsystem => "thm3_subsystem",
        }
    }

    /// Finite-sample surrogates whose misses are not defects.
    pub fn is_statistical(self) -> bool {
        self == CheckName::Equilibration
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown check `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Passed,
    Failed,
    Inapplicable,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Passed => "passed",
            CheckStatus::Failed => "failed",
            CheckStatus::Inapplicable => "inapplicable",
        }
    }
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Identifies the instance a check was evaluated on.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CheckContext {
    pub seed: Option<u64>,
    pub band_lo: usize,
    pub band_hi: usize,
    pub d: usize,
    pub d_eff: Option<f64>,
    pub k: Option<usize>,
    /// N_M for a finite measurement set, d_S for a subsystem.
    pub capacity: Option<usize>,
    pub epsilon: Option<f64>,
    pub note: Option<String>,
}

/// lhs ≤ rhs, evaluated. Inapplicable checks carry NaN sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: CheckName,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs − lhs.
    pub margin: f64,
    pub status: CheckStatus,
    pub context: CheckContext,
}

impl BoundCheck {
    /// Passed iff lhs ≤ rhs + the bound slack.
    pub fn evaluate(name: CheckName, lhs: f64, rhs: f64, context: CheckContext) -> Self {
        let passed = lhs <= rhs + Tolerances::DEFAULT.bound_slack;
        Self {
            name,
            lhs,
            rhs,
            margin: rhs - lhs,
            status: if passed { CheckStatus::Passed } else { CheckStatus::Failed },
            context,
        }
    }

    pub fn inapplicable(name: CheckName, mut context: CheckContext, reason: impl Into<String>) -> Self {
        context.note = Some(reason.into());
        Self {
            name,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            status: CheckStatus::Inapplicable,
            context,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Passed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.context.seed = Some(seed);
        self
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.context.note = Some(note.into());
        self
    }
}
