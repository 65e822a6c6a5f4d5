use thiserror::Error;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max |A - A^H| = {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("{name} = {value} is outside its allowed range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("Mueller matrix is not physical (Cloude eigenvalue {min_eigenvalue:e})")]
    NotPhysical { min_eigenvalue: f64 },

    #[error("Mueller matrix has non-positive M00 = {m00}")]
    NonPositiveTransmission { m00: f64 },

    #[error("cannot compose an empty list of Mueller matrices")]
    EmptyComposition,

    #[error("retarder axis has zero length")]
    ZeroAxis,

    #[error("channel annihilates the state (output trace {trace:e})")]
    ZeroProbability { trace: f64 },

    #[error("projector set is not informationally complete (rank {rank} of 16)")]
    Incomplete { rank: usize },

    #[error("expected {expected} count values, got {got}")]
    CountMismatch { expected: usize, got: usize },

    #[error("invalid count value {value} for setting {index}")]
    InvalidCount { index: usize, value: f64 },

    #[error("all coincidence counts are zero")]
    EmptyCounts,

    #[error("invalid sweep configuration: {field}: {reason}")]
    InvalidConfig {
        field: &'static str,
        reason: &'static str,
    },
}

pub type Result<T> = core::result::Result<T, Error>;
