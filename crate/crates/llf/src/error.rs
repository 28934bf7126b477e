use thiserror::Error;

/// Errors produced by the approximation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor argument violated a documented invariant.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An evaluation point fell outside the admissible interval.
    #[error("argument {value} outside [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    /// A subinterval index past the end of the partition.
    #[error("subinterval index {index} out of range (partition has {count})")]
    IndexOutOfRange { index: usize, count: usize },

    /// Vector length did not match the expected discretization size.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// The SVD routine did not converge or produced an inconsistent
    /// factorization. Never silently fallen back from.
    #[error("singular value decomposition failed: {0}")]
    SvdFailed(String),

    /// A stored factorization or approximant violated its invariants.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// Malformed container file (bad magic, version, or truncation).
    #[error("format error: {0}")]
    Format(String),

    /// Malformed input data (CSV samples, jittered grids, ...).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A flagged window produced no indicator jump above the threshold.
    #[error("localization failed: {0}")]
    LocalizationFailed(String),

    /// A one-sided patch would be fit on fewer than the minimum samples.
    #[error(
        "window too narrow: {side} side of split has {count} samples (need at least {min}); \
         increase the number of subintervals or samples per subinterval"
    )]
    WindowTooNarrow {
        side: &'static str,
        count: usize,
        min: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
