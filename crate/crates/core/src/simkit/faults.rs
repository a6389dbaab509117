use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Time;

/// Additive fault `ξ f` active on samples `k ∈ [mu, nu)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FaultEpisode<T> {
    pub mu: Time,
    pub nu: Time,
    pub direction: Vec<T>,
    pub magnitude: T,
}

impl<T: Scalar> FaultEpisode<T> {
    pub fn active_len(&self) -> Time {
        self.nu - self.mu
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FaultSchedule<T> {
    episodes: Vec<FaultEpisode<T>>,
}

impl<T: Scalar> FaultSchedule<T> {
    pub fn new(episodes: Vec<FaultEpisode<T>>) -> Result<Self> {
        for e in &episodes {
            if e.mu < 1 || e.nu <= e.mu {
                return Err(Error::Domain(format!("episode [{}, {}) is empty or starts before 1", e.mu, e.nu)));
            }
            if !e.magnitude.is_finite() || e.direction.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain("fault shift must be finite".into()));
            }
        }
        for pair in episodes.windows(2) {
            if pair[1].mu <= pair[0].nu {
                return Err(Error::OverlappingEpisodes { nu: pair[0].nu, next_mu: pair[1].mu });
            }
        }
        Ok(Self { episodes })
    }

    pub fn empty() -> Self {
        Self { episodes: Vec::new() }
    }

    pub fn episodes(&self) -> &[FaultEpisode<T>] {
        &self.episodes
    }

    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    /// Last faulty sample index, or 0 for an empty schedule.
    pub fn last_active(&self) -> Time {
        self.episodes.last().map_or(0, |e| e.nu - 1)
    }
}

/// Returns `stream` with `ξ_q f_q` added on every `k ∈ [μ_q, ν_q)`.
pub fn inject_faults<T: Scalar>(stream: &[Vec<T>], schedule: &FaultSchedule<T>) -> Result<Vec<Vec<T>>> {
    let mut out = stream.to_vec();
    let p = stream.first().map_or(0, Vec::len);
    if schedule.last_active() > stream.len() as Time {
        return Err(Error::Domain(format!(
            "schedule reaches sample {} but the stream has {}",
            schedule.last_active(),
            stream.len()
        )));
    }
    for e in schedule.episodes() {
        if e.direction.len() != p {
            return Err(Error::DimensionMismatch { expected: p, got: e.direction.len() });
        }
        for k in e.mu..e.nu {
            let x = &mut out[(k - 1) as usize];
            for (xi, &d) in x.iter_mut().zip(&e.direction) {
                *xi = *xi + d * e.magnitude;
            }
        }
    }
    Ok(out)
}

/// Recipe for drawing a fault train from lower bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub first_mu: Time,
    pub episodes: usize,
    pub direction: Vec<f64>,
    /// Inclusive range of magnitudes `f_q`.
    pub magnitude: (f64, f64),
    /// Inclusive range of active durations `τᵒ_q`.
    pub tau_on: (usize, usize),
    /// Inclusive range of inactive durations `τʳ_q` between episodes.
    pub tau_off: (usize, usize),
}

pub fn random_schedule<T: Scalar, R: Rng>(spec: &ScheduleSpec, rng: &mut R) -> Result<FaultSchedule<T>> {
    let (f_lo, f_hi) = spec.magnitude;
    if !(f_lo > 0.0 && f_lo <= f_hi) || spec.tau_on.0 == 0 || spec.tau_off.0 == 0 {
        return Err(Error::Domain("schedule ranges must be positive and ordered".into()));
    }
    if spec.tau_on.0 > spec.tau_on.1 || spec.tau_off.0 > spec.tau_off.1 {
        return Err(Error::Domain("schedule ranges must be ordered".into()));
    }
    let direction: Vec<T> = spec.direction.iter().map(|&x| T::of(x)).collect();
    let mut episodes = Vec::with_capacity(spec.episodes);
    let mut mu = spec.first_mu;
    for _ in 0..spec.episodes {
        let on = rng.random_range(spec.tau_on.0..=spec.tau_on.1) as Time;
        let f = if f_hi > f_lo { rng.random_range(f_lo..=f_hi) } else { f_lo };
        episodes.push(FaultEpisode { mu, nu: mu + on, direction: direction.clone(), magnitude: T::of(f) });
        let off = rng.random_range(spec.tau_off.0..=spec.tau_off.1) as Time;
        mu += on + off;
    }
    FaultSchedule::new(episodes)
}
