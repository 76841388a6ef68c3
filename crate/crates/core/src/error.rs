use thiserror::Error;

/// Library-wide error type.
///
/// `Structural` marks inputs that violate a defining algebraic property
/// (failed anticommutator, dimension mismatch, non-skew generator);
/// `Domain` marks arguments outside an operation's domain (zero central
/// frequency, exponent out of range); `Budget` marks requests exceeding the
/// configured compute budgets; `Accuracy` carries the best estimate obtained
/// when an adaptive routine fails to reach its target tolerance.
#[derive(Debug, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("accuracy target not met: {message} (best estimate {estimate:e})")]
    Accuracy { message: String, estimate: f64 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }
}
