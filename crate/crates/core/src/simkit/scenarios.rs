//! The two reference scenarios: the correlated Gaussian example and the
//! CSTR with intermittent sensor faults on the feed-flow measurement.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::detectability::IfParams;
use crate::error::Result;
use crate::linalg::{Cholesky, Matrix};
use crate::simkit::cstr::{cstr_simulate_clean, CstrConfig, CSTR_DIM};
use crate::simkit::faults::{inject_faults, random_schedule, FaultSchedule, ScheduleSpec};
use crate::simkit::gaussian::draw;
use crate::stat_core::GaussianModel;

pub const NUMERICAL_MEAN: [f64; 2] = [6.0, 4.0];
pub const NUMERICAL_COV: [[f64; 2]; 2] = [[3.0, 2.6], [2.6, 4.0]];
pub const NUMERICAL_DIRECTION: [f64; 2] = [0.2425, 0.9701];
pub const CSTR_DIRECTION: [f64; 4] = [0.0, 0.0, 0.0, 1.0];
/// Lower bound on every fault magnitude.
pub const MAGNITUDE_LOWER_BOUND: f64 = 4.0;
/// Lower bound on every active and inactive duration.
pub const DURATION_LOWER_BOUND: usize = 10;
pub const ALPHA: f64 = 0.01;
pub const N_TRAIN: usize = 5000;

pub fn numerical_cov() -> Matrix<f64> {
    Matrix::from_rows(&NUMERICAL_COV.map(|r| r.to_vec())).expect("square literal")
}

/// Training data, a fault-free test stream, and the same stream with faults.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: &'static str,
    pub train: Vec<Vec<f64>>,
    pub model: Arc<GaussianModel<f64>>,
    pub clean: Vec<Vec<f64>>,
    pub test: Vec<Vec<f64>>,
    pub schedule: FaultSchedule<f64>,
    /// Lower bounds the monitor is configured with.
    pub params: IfParams<f64>,
    pub alpha: f64,
}

/// Draws magnitudes in `[f̃, f̃ + 1.5]` and durations in `[12, 22]`.
pub fn schedule_spec(direction: &[f64], first_mu: i64, episodes: usize) -> ScheduleSpec {
    ScheduleSpec {
        first_mu,
        episodes,
        direction: direction.to_vec(),
        magnitude: (MAGNITUDE_LOWER_BOUND, MAGNITUDE_LOWER_BOUND + 1.5),
        tau_on: (12, 22),
        tau_off: (12, 22),
    }
}

/// Two correlated Gaussian variables, 500 test samples, seven episodes from k = 201.
pub fn numerical_scenario(seed: u64) -> Result<Scenario> {
    let cov = numerical_cov();
    let chol = Cholesky::factor(&cov)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let train = draw(&chol, &NUMERICAL_MEAN, N_TRAIN, &mut rng);
    let clean = draw(&chol, &NUMERICAL_MEAN, 500, &mut rng);
    let schedule = random_schedule(&schedule_spec(&NUMERICAL_DIRECTION, 201, 7), &mut rng)?;
    finish("numerical", train, clean, schedule, &NUMERICAL_DIRECTION)
}

/// CSTR with the default configuration, 400 test samples, six sensor-fault
/// episodes on `q` from k = 101.
pub fn cstr_scenario(seed: u64) -> Result<Scenario> {
    cstr_scenario_with(&CstrConfig::default(), seed)
}

pub fn cstr_scenario_with(cfg: &CstrConfig, seed: u64) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let train = cstr_simulate_clean(cfg, N_TRAIN, seed.wrapping_mul(2))?;
    let clean = cstr_simulate_clean(cfg, 400, seed.wrapping_mul(2).wrapping_add(1))?;
    debug_assert_eq!(clean[0].len(), CSTR_DIM);
    let schedule = random_schedule(&schedule_spec(&CSTR_DIRECTION, 101, 6), &mut rng)?;
    finish("cstr", train, clean, schedule, &CSTR_DIRECTION)
}

fn finish(
    name: &'static str,
    train: Vec<Vec<f64>>,
    clean: Vec<Vec<f64>>,
    schedule: FaultSchedule<f64>,
    direction: &[f64],
) -> Result<Scenario> {
    let model = Arc::new(GaussianModel::fit(&train)?);
    let test = inject_faults(&clean, &schedule)?;
    let params = IfParams::uniform_lower_bounds(direction.to_vec(), MAGNITUDE_LOWER_BOUND, DURATION_LOWER_BOUND)?;
    Ok(Scenario { name, train, model, clean, test, schedule, params, alpha: ALPHA })
}
