//! Ground-truth generators: Gaussian streams, fault injection, a closed-loop
//! CSTR, and the two reference scenarios built on them.

pub mod audit;
pub mod cstr;
pub mod faults;
pub mod gaussian;
pub mod scenarios;
pub mod score;

pub use audit::{condition_excursions, Excursion};
pub use cstr::{cstr_simulate, CstrConfig};
pub use faults::{inject_faults, random_schedule, FaultEpisode, FaultSchedule, ScheduleSpec};
pub use gaussian::gen_gaussian_stream;
pub use score::{explaining_excursions, score, Score, TruthScore};
pub use scenarios::{cstr_scenario, cstr_scenario_with, numerical_scenario, Scenario};
