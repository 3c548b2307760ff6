use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 3, got {0}")]
    InvalidDimension(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("induced curvature {value} is not positive and finite at {point:?}")]
    NonPositiveCurvature { value: f64, point: Vec<f64> },

    #[error("{what} did not converge (estimate {estimate:e}, error {error:e})")]
    Unconverged {
        what: String,
        estimate: f64,
        error: f64,
    },

    #[error("no admissible bubble scale found: {0}")]
    LambdaSearch(String),

    #[error("ODE integration failed: {0}")]
    Integration(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}
