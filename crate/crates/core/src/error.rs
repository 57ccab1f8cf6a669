use thiserror::Error;

/// Errors raised by the model, search and optimization layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-ergodic configuration: utilization {rho} is not below 1")]
    NonErgodic { rho: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("negative deadline {0}")]
    NegativeDeadline(f64),
    #[error("finite-difference stencil leaves the search box at ({m}, {s})")]
    StencilOutOfBox { m: f64, s: f64 },
    #[error("working point ({m}, {s}) is on the infeasible side (residual {residual})")]
    InfeasibleCenter { m: f64, s: f64, residual: f64 },
    #[error("no contact with the curve within r_max = {r_max}")]
    NoContactWithinRMax { r_max: f64 },
    #[error("polyline is empty")]
    EmptyPolyline,
    #[error("boundary curve could not be traced inside the search box")]
    TraceUnavailable,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
