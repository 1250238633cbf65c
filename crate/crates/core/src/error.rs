use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes do not line up (matrix products, vector lengths, ...).
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An argument is outside its documented domain (non-finite entry,
    /// negative tolerance, empty index set, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A factorization pivot fell below its floor, or an eliminated entry
    /// was exactly zero where the reduction needs to divide by it.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// A column of the dictionary is identically zero, so column
    /// normalization (and hence coherence) is undefined.
    #[error("degenerate column {index}: zero norm")]
    DegenerateColumn { index: usize },

    /// A mathematical hypothesis of the requested check is not met by the
    /// input (wrong shape regime, asymmetry, non-positive diagonal, ...).
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    /// The requested computation would enumerate too much; the caller must
    /// raise the relevant limit explicitly.
    #[error("cost guard: {0}")]
    CostGuard(String),

    /// The path solver produced more breakpoints than its cycle guard
    /// allows; almost certainly a degenerate instance.
    #[error("breakpoint limit exceeded: {0}")]
    CycleGuard(String),

    /// Exhaustive verification could not certify a solution where one was
    /// expected to exist.
    #[error("oracle failure: {0}")]
    OracleFailure(String),

    /// A queried lambda lies outside the range covered by a computed path.
    #[error("lambda out of range: {0}")]
    OutOfRange(String),

    /// Malformed text input (matrix/vector/CSV files).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
