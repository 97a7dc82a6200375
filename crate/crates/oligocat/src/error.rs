use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size limit exceeded: {what} has size {actual}, bound is {limit}")]
    SizeLimit {
        what: String,
        limit: usize,
        actual: usize,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("instance mismatch: {0}")]
    Mismatch(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {message} (witness: {witness})")]
    Precondition { message: String, witness: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn size_limit(what: impl Into<String>, limit: usize, actual: usize) -> Error {
    Error::SizeLimit {
        what: what.into(),
        limit,
        actual,
    }
}
