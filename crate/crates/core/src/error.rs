use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series truncation failed: {0}")]
    Truncation(String),
    #[error("pole encountered: {0}")]
    Pole(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("numerical limit did not settle: {0}")]
    Limit(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("eigensolver failure: {0}")]
    Eigen(String),
    #[error("contour integration failure: {0}")]
    Contour(String),
}

impl Error {
    /// True for failures caused by a parameter point sitting on (or too close to)
    /// a zero or pole, as opposed to a malformed request.
    pub fn is_degeneracy(&self) -> bool {
        matches!(self, Error::Degenerate(_) | Error::Pole(_) | Error::Contour(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
