use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hypergeometric parameter c = {0} is a non-positive integer")]
    InvalidC(String),

    #[error("hypergeometric series failed to converge after {terms} terms")]
    NonConvergence { terms: usize },

    #[error("adaptive quadrature did not reach tolerance {tolerance:e}")]
    QuadratureFailure { tolerance: f64 },

    #[error("step {dt} ps too large for fastest rate {rate} rad/ps (dt·rate = {product:.3} ≥ 0.1)")]
    StepTooLarge { dt: f64, rate: f64, product: f64 },

    #[error("state norm {norm} exceeded unity at t = {time} ps")]
    NormBlowup { norm: f64, time: f64 },

    #[error("invalid pulse schedule: {0}")]
    InvalidSchedule(String),

    #[error("dynamic phase is only defined for trajectories computed without trion decay")]
    DecayForbidden,

    #[error("pulse ratio r = Ω/Δ must be nonzero")]
    ZeroRatio,

    #[error("target angle {0} rad outside (−π, π); use a single resonant pulse for a π rotation")]
    OutOfRange(f64),

    #[error("operator is not a contraction: largest singular value {0}")]
    NonContraction(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
