use thiserror::Error;

use crate::evolution::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("under-resolved: {0}")]
    UnderResolved(String),

    #[error("CFL violated (number {cfl:.3e}); retry with dt <= {suggested_dt:.3e}")]
    CflViolation { cfl: f64, suggested_dt: f64 },

    #[error("blow-up guard tripped at t = {time:.6e}: |grad u|_inf = {grad_linf:.6e} exceeds {threshold:.6e}")]
    BlowupDetected {
        time: f64,
        grad_linf: f64,
        threshold: f64,
        /// Everything integrated up to the last accepted step.
        partial: Box<Trajectory>,
    },

    #[error("need at least {needed} iterates, have {available}")]
    InsufficientIterates { needed: usize, available: usize },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
