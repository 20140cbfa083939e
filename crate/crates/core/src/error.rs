use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the simulator library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("capacity error: dimension {dim} exceeds maximum {max}")]
    Capacity { dim: usize, max: usize },

    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fixed point did not converge after {iterations} doublings (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("inconsistent decomposition: {0}")]
    Decomposition(String),

    #[error("outcome {outcome} has zero probability; conditional state undefined")]
    UndefinedConditional { outcome: usize },

    #[error("tomographically incomplete inputs: rank {rank}, need {required}")]
    Rank { rank: usize, required: usize },

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }
}
