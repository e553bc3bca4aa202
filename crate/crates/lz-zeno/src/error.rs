//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum LzError {
    /// An argument was outside its documented domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A time interval with start > end in the extended-real order.
    #[error("invalid interval: start {start} > end {end}")]
    InvalidInterval { start: String, end: String },

    /// The adaptive integrator could not meet its tolerance.
    #[error("integrator failed to converge (last accepted step {last_step:.3e})")]
    IntegratorStall { last_step: f64 },

    /// A schedule exceeded the configured measurement limit.
    #[error("schedule has {n} measurements, exceeding the maximum {max}")]
    TooManyMeasurements { n: usize, max: usize },

    /// Exact sign enumeration was requested for too many measurements.
    #[error("enumeration over 2^(N-1) signs is limited to N <= {max}, got N = {n}")]
    EnumerationTooLarge { n: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, LzError>;
