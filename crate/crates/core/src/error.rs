use thiserror::Error;

/// Errors produced by the estimation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("chain is not ergodic")]
    NonErgodic,
    #[error("chain is not reversible (detailed-balance residual {residual:e})")]
    NotReversible { residual: f64 },
    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("stationary distribution has a zero entry at state {0}")]
    ZeroStationaryEntry(usize),
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("eigensolver failure: {0}")]
    EigensolverFailure(String),
    #[error("mixing time exceeds cap {cap}")]
    Overflow { cap: usize },
    #[error("summary does not contain the {0} required for this mode")]
    MissingGap(&'static str),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),
    #[error("skip rate {k} too large for trajectory of length {m}")]
    SkipTooLarge { k: usize, m: usize },
    #[error("unsmoothed estimate requested but state {0} was never visited")]
    ZeroCountUnsmoothed(usize),
    #[error("degenerate spectral gap {0}")]
    DegenerateGap(f64),
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("absolute continuity violated at index {0}")]
    AbsoluteContinuityViolation(usize),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
