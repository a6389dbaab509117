//! Intermittent fault detection with moving-average Hotelling T² control
//! charts over a bank of window lengths.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the crate root fix it to `f64`, which is what the CLI uses.

pub mod bank;
pub mod cli;
pub mod detectability;
pub mod distribution;
pub mod error;
pub mod io;
pub mod linalg;
pub mod monitor;
pub mod scalar;
pub mod simkit;
pub mod stat_core;

/// Discrete sample index, 1-based.
pub type Time = i64;

pub use bank::{BankConfig, BankReport, CleaningOrder, EpisodeFlag, EpisodeInference, TimeInterval};
pub use detectability::{AlarmDelays, DetectabilityReport, Durations, FaultGeometry, PfReport, WindowRange};
pub use error::{Error, Result};
pub use monitor::{Alarm, AlarmSequence, AlarmTracker, ChartOutput};
pub use scalar::Scalar;
pub use stat_core::{ChartConfig, ControlLimits};

pub type Model = stat_core::GaussianModel<f64>;
pub type Chart = monitor::MovingChart<f64>;
pub type CovMatrix = linalg::Matrix<f64>;
pub type FaultParams = detectability::IfParams<f64>;
pub type Bank = bank::Bank<f64>;
