use thiserror::Error;

use crate::Time;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("covariance matrix is singular or ill-conditioned (reciprocal condition estimate {rcond:e})")]
    SingularCovariance { rcond: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("window {window} exceeds the preceding inactive duration {tau_off_prev}")]
    WindowExceedsPrevQuiet { window: usize, tau_off_prev: usize },

    #[error("fault is not guaranteed detectable with window {window}")]
    NotDetectableWithWindow { window: usize },

    #[error("permanent fault is not guaranteed detectable by any window")]
    NotPfDetectable,

    #[error("no admissible window set: the configured fault is not guaranteed detectable")]
    EmptyWindowSet,

    #[error("inconsistent alarms: {0}")]
    InconsistentAlarms(String),

    #[error("fault episodes overlap or touch: episode ending at {nu} is followed by one starting at {next_mu}")]
    OverlappingEpisodes { nu: Time, next_mu: Time },

    #[error("integration diverged at sample {step}: {reason}")]
    IntegrationDiverged { step: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
