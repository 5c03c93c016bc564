use thiserror::Error;

/// Errors produced by the model, dynamics, witness and measurement layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    #[error("step {step} exceeds stability limit {limit}")]
    Stability { step: f64, limit: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("undefined bound: {0}")]
    UndefinedBound(String),

    #[error("readout cannot be inverted with zero coupling gain")]
    NoInversion,

    #[error("estimation error: {0}")]
    Estimation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
