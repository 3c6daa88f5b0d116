//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bit-vector length {actual} does not match expected length {expected}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A list handed to a correlation statistic is constant (or numerically
    /// indistinguishable from constant), so the statistic is undefined.
    #[error("{series} values are degenerate (near-zero spread) across {len} entries")]
    DegenerateVariance { series: &'static str, len: usize },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("exhaustive enumeration refused: n = {n} exceeds the {limit}-variable limit")]
    EnumerationTooLarge { n: usize, limit: usize },

    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("surrogate training aborted: dataset has {rows} rows with {distinct} distinct fom values: {source}")]
    TrainingDegenerate {
        rows: usize,
        distinct: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }
}
