use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("not Hermitian: entry ({row}, {col}) deviates from conjugate symmetry by {asymmetry:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        asymmetry: f64,
    },

    #[error("trace is {0} (expected 1)")]
    InvalidTrace(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("vectors are not orthonormal (Gram deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("POVM outcome {index} is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    OutcomeNotPositive { index: usize, min_eigenvalue: f64 },

    #[error("POVM outcomes do not sum to identity (deviation {0:e})")]
    NotComplete(f64),

    #[error("a POVM needs at least {required} outcomes, got {got}")]
    TooFewOutcomes { required: usize, got: usize },

    #[error("measurement set is empty")]
    EmptyMeasurementSet,

    #[error("no eigenvalue in the window [{lo}, {hi}]")]
    EmptyBand { lo: f64, hi: f64 },

    #[error("band does not belong to this system")]
    ForeignBand,

    #[error("state has no weight inside the band")]
    OutsideBand,

    #[error("state is not supported in the band (weight outside {0:e})")]
    NotInBand(f64),

    #[error("values must sum to zero (sum {0:e})")]
    NonZeroSum(f64),

    #[error("subset size k={k} is invalid for d={d}: {reason}")]
    InvalidSubsetSize { k: usize, d: usize, reason: &'static str },

    #[error("band dimension {0} is too small (need at least 4)")]
    BandTooSmall(usize),

    #[error("POVM normalization stayed singular after {0} attempts")]
    SingularNormalization(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
