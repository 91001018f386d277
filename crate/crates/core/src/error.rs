use thiserror::Error;

/// Error type shared by all modules.
///
/// The variants mirror the failure classes of the public operations:
/// configuration and parameter errors are caller mistakes, domain errors are
/// evaluations outside a validity window (singular times, invalid branches),
/// balance errors are degenerate leading-order data in the WTC expansion, and
/// divergence/numerical errors are runtime failures of an otherwise valid
/// computation.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("balance error: {0}")]
    Balance(String),

    #[error("divergence at t = {time}: {message}")]
    Divergence { time: f64, message: String },

    #[error("numerical error: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
