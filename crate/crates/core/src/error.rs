use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("rule at line {line} is not range-restricted: head variable {var} does not occur in the body")]
    RangeRestriction { line: usize, var: String },

    #[error("grounded atom universe has {size} atoms, above the guard of {guard}")]
    GuardExceeded { size: u128, guard: u128 },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("not row-stochastic: row {row} sums to {sum}")]
    NotStochastic { row: usize, sum: f64 },

    #[error("invalid probability or distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("function is not total on the input space: no image for {0}")]
    PartialFunction(String),

    #[error("image {image} of {input} is outside the output space")]
    ImageEscape { input: String, image: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sender core not contained in the receiver vocabulary; lost core: {0:?}")]
    CoreLost(Vec<String>),

    #[error("no convergence after {iterations} iterations (gap {gap:e})")]
    NoConvergence { iterations: usize, gap: f64 },

    #[error("infeasible distortion level {requested}: minimum achievable is {minimum}")]
    InfeasibleDistortion { requested: f64, minimum: f64 },

    #[error("channel config: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
