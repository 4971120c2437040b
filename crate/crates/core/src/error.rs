use thiserror::Error;

/// Errors raised by the walk, its analytics and the ensemble runner.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("bias parameter p = {0} is outside [0, 1]")]
    InvalidBias(f64),

    #[error("measurement probability q = {0} is outside [0, 1]")]
    InvalidMeasurementProbability(f64),

    #[error("site {site} is off the support of the walk at t = {time}")]
    OffSupport { site: i64, time: usize },

    #[error("states at times {0} and {1} cannot be compared")]
    TimeMismatch(usize, usize),

    #[error("invalid amplitudes: {0}")]
    InvalidAmplitudes(String),

    #[error("invalid reduced density matrix: {0}")]
    InvalidDensity(String),

    #[error("gaussian limit is degenerate for p = {0}")]
    DegenerateGaussian(f64),

    #[error("gaussian limit needs t >= 1")]
    ZeroTime,

    #[error("moment order must be at least 1")]
    InvalidMomentOrder,

    #[error("probability mass function is empty")]
    EmptyPmf,

    #[error("ensemble needs at least one trial")]
    NoTrials,

    #[error("ensemble of {trials} trials over {steps} steps overflows the work counter")]
    WorkOverflow { trials: u64, steps: usize },
}

pub type Result<T, E = WalkError> = std::result::Result<T, E>;
