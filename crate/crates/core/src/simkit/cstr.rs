//! Continuous stirred-tank reactor with an exothermic first-order reaction
//! `A → B`, held at an open-loop unstable operating point by two PI loops:
//! coolant temperature `T_c` regulates reactor temperature `T`, feed flow `q`
//! regulates concentration `C_A`. Time is in minutes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simkit::faults::{inject_faults, FaultSchedule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CstrConfig {
    /// Reactor volume, L.
    pub volume: f64,
    /// Feed concentration, mol/L.
    pub feed_conc: f64,
    /// Feed temperature, K.
    pub feed_temp: f64,
    /// Pre-exponential factor, 1/min.
    pub k0: f64,
    /// Activation energy over the gas constant, K.
    pub activation_temp: f64,
    /// Heat of reaction, J/mol (negative for exothermic).
    pub reaction_enthalpy: f64,
    /// Density, g/L.
    pub density: f64,
    /// Heat capacity, J/(g K).
    pub heat_capacity: f64,
    /// Heat transfer coefficient times area, J/(min K).
    pub ua: f64,
    /// Concentration set point, mol/L.
    pub ca_setpoint: f64,
    /// Temperature set point, K.
    pub t_setpoint: f64,
    /// Temperature loop: proportional gain (K/K) and integral gain (1/min).
    pub kp_t: f64,
    pub ki_t: f64,
    /// Concentration loop: proportional gain (L²/(min mol)) and integral gain.
    pub kp_c: f64,
    pub ki_c: f64,
    /// Standard deviations of the disturbances `v₁` (mol/(L min)) and `v₂` (K/min),
    /// held constant over each sampling interval.
    pub process_noise: [f64; 2],
    /// Standard deviations of the measurement noise on `C_A, T, T_c, q`.
    pub sensor_noise: [f64; 4],
    /// Sampling interval, s.
    pub sample_seconds: f64,
    /// RK4 steps per sampling interval.
    pub substeps: usize,
}

impl Default for CstrConfig {
    fn default() -> Self {
        Self {
            volume: 100.0,
            feed_conc: 1.0,
            feed_temp: 350.0,
            k0: 7.2e10,
            activation_temp: 8750.0,
            reaction_enthalpy: -5.0e4,
            density: 1000.0,
            heat_capacity: 0.239,
            ua: 5.0e4,
            ca_setpoint: 0.5,
            t_setpoint: 350.0,
            kp_t: 5.0,
            ki_t: 2.0,
            kp_c: 100.0,
            ki_c: 50.0,
            process_noise: [0.002, 0.1],
            sensor_noise: [0.005, 0.2, 0.2, 1.15],
            sample_seconds: 30.0,
            substeps: 10,
        }
    }
}

/// Number of measured variables: `C_A, T, T_c, q`.
pub const CSTR_DIM: usize = 4;

impl CstrConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("volume", self.volume),
            ("feed_conc", self.feed_conc),
            ("feed_temp", self.feed_temp),
            ("k0", self.k0),
            ("activation_temp", self.activation_temp),
            ("density", self.density),
            ("heat_capacity", self.heat_capacity),
            ("ua", self.ua),
            ("ca_setpoint", self.ca_setpoint),
            ("t_setpoint", self.t_setpoint),
            ("sample_seconds", self.sample_seconds),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("CSTR parameter {name} must be positive, got {v}")));
            }
        }
        if self.ca_setpoint >= self.feed_conc {
            return Err(Error::Domain("concentration set point must be below the feed concentration".into()));
        }
        if self.substeps < 10 {
            return Err(Error::Domain("at least 10 integrator steps per sample are required".into()));
        }
        let noise = self.process_noise.iter().chain(&self.sensor_noise);
        if noise.clone().any(|&s| !(s >= 0.0 && s.is_finite())) {
            return Err(Error::Domain("noise levels must be non-negative".into()));
        }
        Ok(())
    }

    fn rate(&self, t: f64) -> f64 {
        self.k0 * (-self.activation_temp / t).exp()
    }

    fn heat_gain(&self) -> f64 {
        -self.reaction_enthalpy / (self.density * self.heat_capacity)
    }

    fn cooling_gain(&self) -> f64 {
        self.ua / (self.volume * self.density * self.heat_capacity)
    }

    /// Nominal feed flow (L/min) and coolant temperature (K) at the set points.
    pub fn steady_state(&self) -> (f64, f64) {
        let (ca, t) = (self.ca_setpoint, self.t_setpoint);
        let r = self.rate(t) * ca;
        let q = self.volume * r / (self.feed_conc - ca);
        let tc = t - (self.heat_gain() * r + q / self.volume * (self.feed_temp - t)) / self.cooling_gain();
        (q, tc)
    }
}

/// Reactor state plus the two controller integrators.
type State = [f64; 4];

struct Plant<'a> {
    cfg: &'a CstrConfig,
    q0: f64,
    tc0: f64,
}

impl Plant<'_> {
    fn inputs(&self, y: &State) -> (f64, f64) {
        let c = self.cfg;
        let tc = self.tc0 + c.kp_t * (c.t_setpoint - y[1]) + c.ki_t * y[2];
        let q = self.q0 + c.kp_c * (c.ca_setpoint - y[0]) + c.ki_c * y[3];
        (tc, q)
    }

    fn deriv(&self, y: &State, v: [f64; 2]) -> State {
        let c = self.cfg;
        let (tc, q) = self.inputs(y);
        let (ca, t) = (y[0], y[1]);
        let r = c.rate(t) * ca;
        let dil = q / c.volume;
        [
            dil * (c.feed_conc - ca) - r + v[0],
            dil * (c.feed_temp - t) + c.heat_gain() * r + c.cooling_gain() * (tc - t) + v[1],
            c.t_setpoint - t,
            c.ca_setpoint - ca,
        ]
    }

    fn rk4(&self, y: &State, v: [f64; 2], h: f64) -> State {
        let add = |a: &State, b: &State, s: f64| -> State { std::array::from_fn(|i| a[i] + s * b[i]) };
        let k1 = self.deriv(y, v);
        let k2 = self.deriv(&add(y, &k1, h / 2.0), v);
        let k3 = self.deriv(&add(y, &k2, h / 2.0), v);
        let k4 = self.deriv(&add(y, &k3, h), v);
        std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
    }
}

/// Fault-free measurements `[C_A, T, T_c, q]` at samples `1..=n_steps`,
/// starting from the set-point steady state.
pub fn cstr_simulate_clean(cfg: &CstrConfig, n_steps: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let (q0, tc0) = cfg.steady_state();
    let plant = Plant { cfg, q0, tc0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = move || -> f64 { StandardNormal.sample(&mut rng) };
    let h = cfg.sample_seconds / 60.0 / cfg.substeps as f64;
    let mut y: State = [cfg.ca_setpoint, cfg.t_setpoint, 0.0, 0.0];
    let mut out = Vec::with_capacity(n_steps);
    for step in 1..=n_steps {
        let v = [cfg.process_noise[0] * gauss(), cfg.process_noise[1] * gauss()];
        for _ in 0..cfg.substeps {
            y = plant.rk4(&y, v, h);
        }
        if y.iter().any(|x| !x.is_finite()) {
            return Err(Error::IntegrationDiverged { step, reason: "non-finite state".into() });
        }
        if !(y[0] > -0.1 * cfg.feed_conc && y[0] < 1.5 * cfg.feed_conc) {
            return Err(Error::IntegrationDiverged { step, reason: format!("concentration {} out of range", y[0]) });
        }
        if !(y[1] > 0.5 * cfg.t_setpoint && y[1] < 2.0 * cfg.t_setpoint) {
            return Err(Error::IntegrationDiverged { step, reason: format!("temperature {} out of range", y[1]) });
        }
        let (tc, q) = plant.inputs(&y);
        let clean = [y[0], y[1], tc, q];
        out.push(clean.iter().zip(&cfg.sensor_noise).map(|(&x, &s)| x + s * gauss()).collect());
    }
    Ok(out)
}

/// Measurements with sensor faults from `schedule` added on top.
pub fn cstr_simulate(
    cfg: &CstrConfig,
    n_steps: usize,
    seed: u64,
    schedule: &FaultSchedule<f64>,
) -> Result<Vec<Vec<f64>>> {
    inject_faults(&cstr_simulate_clean(cfg, n_steps, seed)?, schedule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet() -> CstrConfig {
        CstrConfig { process_noise: [0.0; 2], sensor_noise: [0.0; 4], ..CstrConfig::default() }
    }

    #[test]
    fn steady_state_matches_hand_calculation() {
        let (q, tc) = CstrConfig::default().steady_state();
        // k(350) = 7.2e10 e^-25; q = V k C_A / (C_Af − C_A)
        let k = 7.2e10 * (-25.0_f64).exp();
        assert!((q - 100.0 * k * 0.5 / 0.5).abs() < 1e-9);
        assert!((tc - (350.0 - 209.205_020_920_502_1 * k * 0.5 / 2.092_050_209_205_021)).abs() < 1e-9);
    }

    #[test]
    fn noiseless_run_stays_at_steady_state() {
        let cfg = quiet();
        let (q0, tc0) = cfg.steady_state();
        let xs = cstr_simulate_clean(&cfg, 400, 1).unwrap();
        for x in &xs {
            let want = [0.5, 350.0, tc0, q0];
            for (a, b) in x.iter().zip(want) {
                assert!((a - b).abs() <= 1e-9 * b.abs());
            }
        }
    }

    #[test]
    fn loops_reject_a_disturbance() {
        let cfg = CstrConfig { sensor_noise: [0.0; 4], process_noise: [0.0, 0.0], ..CstrConfig::default() };
        let (q0, tc0) = cfg.steady_state();
        let plant = Plant { cfg: &cfg, q0, tc0 };
        let mut y: State = [0.52, 352.0, 0.0, 0.0];
        for _ in 0..2000 {
            y = plant.rk4(&y, [0.0, 0.0], 0.05);
        }
        assert!((y[0] - 0.5).abs() < 1e-6 && (y[1] - 350.0).abs() < 1e-4);
    }

    #[test]
    fn halving_the_step_barely_moves_the_trajectory() {
        let coarse = CstrConfig { sensor_noise: [0.0; 4], ..CstrConfig::default() };
        let fine = CstrConfig { substeps: 20, ..coarse.clone() };
        let a = cstr_simulate_clean(&coarse, 200, 5).unwrap();
        let b = cstr_simulate_clean(&fine, 200, 5).unwrap();
        for (x, y) in a.iter().zip(&b) {
            for (u, v) in x.iter().zip(y) {
                assert!(((u - v) / v).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = CstrConfig::default();
        assert_eq!(cstr_simulate_clean(&cfg, 50, 3).unwrap(), cstr_simulate_clean(&cfg, 50, 3).unwrap());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(CstrConfig { volume: 0.0, ..CstrConfig::default() }.validate().is_err());
        assert!(CstrConfig { substeps: 4, ..CstrConfig::default() }.validate().is_err());
        assert!(CstrConfig { sensor_noise: [-1.0, 0.0, 0.0, 0.0], ..CstrConfig::default() }.validate().is_err());
    }

    #[test]
    fn runaway_is_reported() {
        // reversed temperature loop heats the reactor as it warms up
        let reversed = CstrConfig { kp_t: -5.0, ki_t: -2.0, process_noise: [0.0, 1.0], ..CstrConfig::default() };
        let err = cstr_simulate_clean(&reversed, 2000, 2).unwrap_err();
        assert!(matches!(err, Error::IntegrationDiverged { .. }));
    }
}
