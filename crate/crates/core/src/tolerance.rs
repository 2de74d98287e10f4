use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every invariant check in the crate.
///
/// Validating constructors use [`Tolerances::DEFAULT`]; the `*_with`
/// variants accept an explicit record so experiment configs can override
/// individual entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Max |A_ij - conj(A_ji)|.
    pub hermitian: f64,
    /// |tr ρ - 1|.
    pub trace: f64,
    /// Most negative eigenvalue tolerated in a PSD operator.
    pub psd: f64,
    /// Gram-matrix deviation for orthonormal columns.
    pub orthonormal: f64,
    /// Spectral-norm error of V·diag(E)·V† against H.
    pub reconstruction: f64,
    /// Eigenvalues closer than `degeneracy * max(1, spectral range)` share a class.
    pub degeneracy: f64,
    /// Deviation of Σ_r M_r from the identity.
    pub completeness: f64,
    /// Idempotence error of a band projector.
    pub projector: f64,
    /// Most negative probability weight tolerated.
    pub weights: f64,
    /// |Σ a_n| allowed in a subset-selection problem, relative to max(1, Σ|a_n|).
    pub zero_sum: f64,
    /// Absolute slack in every bound comparison: passed ⇔ lhs ≤ rhs + slack.
    pub bound_slack: f64,
    /// Two energy gaps closer than this count as a collision.
    pub gap: f64,
    /// Out-of-band weight below this is treated as zero.
    pub tails_zero: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-12,
        trace: 1e-10,
        psd: 1e-10,
        orthonormal: 1e-10,
        reconstruction: 1e-9,
        degeneracy: 1e-9,
        completeness: 1e-10,
        projector: 1e-10,
        weights: 1e-12,
        zero_sum: 1e-10,
        bound_slack: 1e-8,
        gap: 1e-9,
        tails_zero: 1e-12,
    };

    /// Absolute degeneracy threshold for a spectrum spanning `range`.
    pub fn degeneracy_threshold(&self, range: f64) -> f64 {
        self.degeneracy * range.max(1.0)
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
