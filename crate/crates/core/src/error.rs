use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("exponent overflow in scaled arithmetic")]
    ExponentOverflow,

    #[error("division by zero")]
    DivisionByZero,

    #[error("point {0} lies on a branch cut")]
    BranchCut(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("ratio w_{k} is numerically zero (|w_k| = {magnitude:e})")]
    NearZeroRatio { k: usize, magnitude: f64 },

    #[error("{requested} formula does not apply at this point (classified as {actual})")]
    WrongRegion { requested: String, actual: String },

    #[error("point is within the turning-point exclusion radius")]
    ExcludedRegion,

    #[error("evaluation at curve endpoint {0}")]
    Endpoint(String),

    #[error("root solver failed: {0}")]
    SolverFailure(String),

    #[error("curve trace failed after {accepted} points: {reason}")]
    TraceFailure { accepted: usize, reason: String },

    #[error("zero finder did not converge for {} of {n} roots", .unconverged.len())]
    NotConverged {
        n: usize,
        unconverged: Vec<usize>,
        /// Last iterate for every root, converged or not.
        partial: Vec<num_complex::Complex64>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
