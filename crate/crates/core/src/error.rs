use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("state norm is {norm:.3e} away from {expected}; inputs must be pre-normalized")]
    NormViolation { norm: f64, expected: f64 },

    #[error("hard-wall boundary amplitudes must be exactly zero")]
    BoundaryNotZero,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("eigensolver did not converge for pair {index}: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence {
        index: usize,
        residual: f64,
        iterations: usize,
    },

    #[error("levels {0} and {1} are degenerate within 1e-12; criterion undefined")]
    Degenerate(usize, usize),

    #[error("dipole element |<1|x|0>| below 1e-12; transition forbidden, rate calibration inapplicable")]
    ForbiddenTransition,

    #[error("norm drifted by {deviation:.3e} at t = {t}; reduce dt or refine the grid")]
    NormDrift { t: f64, deviation: f64 },

    #[error("dynamic and ground-state tracks disagree on output times at index {0}")]
    TimeMismatch(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{0}")]
    Experiment(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
