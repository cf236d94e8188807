use thiserror::Error;

/// Errors raised by the numerical pipelines.
///
/// Verification mismatches are not errors: they are reported as verdicts in a
/// [`crate::report::VerificationReport`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a contraction: {0}")]
    NotAContraction(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature did not reach tolerance {tol:e}: estimate {estimate}, error {error:e}")]
    Quadrature { estimate: String, error: f64, tol: f64 },

    #[error("construction error: {0}")]
    Construction(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("pipeline error: {0}")]
    Pipeline(String),

    #[error("degenerate Cayley transform: {0}")]
    DegenerateTransform(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }
}
