use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("time {0} is outside the domain [0, inf)")]
    NegativeTime(f64),

    #[error("time {t} lies beyond the last sample at {last} and the spec has no extension rule")]
    BeyondSamples { t: f64, last: f64 },

    #[error("non-finite value {value} at t = {t}")]
    NonFinite { t: f64, value: f64 },

    #[error("invalid function spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("refusing to certify: {0}")]
    Unsound(String),

    #[error("function is not in W^(1,{p},{q}): {reason}")]
    NotSobolev { p: f64, q: String, reason: String },

    #[error("integrator blew up at t = {t}")]
    BlowUp { t: f64 },

    #[error("Lyapunov check failed: {0}")]
    LyapunovViolation(String),

    #[error("quadrature did not converge on [{a}, {b}] (error estimate {estimate})")]
    Quadrature { a: f64, b: f64, estimate: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
