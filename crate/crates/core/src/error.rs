use thiserror::Error;

/// Failure of a semiring operation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("arithmetic overflow")]
    Overflow,
    #[error("{op} is undefined for {left} and {right}")]
    Undefined {
        op: &'static str,
        left: String,
        right: String,
    },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("query words must be nonempty")]
    EmptyWord,
    #[error("query set is empty")]
    EmptyQuerySet,
    #[error("word {0} is not a registered query")]
    UnknownQuery(String),
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("incremental maintenance requires an idempotent semiring")]
    NotIdempotent,
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("malformed certificate: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
