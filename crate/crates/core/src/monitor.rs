//! Single-window online MA-TCC and alarm on/off extraction.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scalar::{CompensatedSum, Scalar};
use crate::stat_core::{ChartConfig, ControlLimits, GaussianModel};
use crate::Time;

#[cfg(debug_assertions)]
const RECHECK_PERIOD: u64 = 1 << 16;

/// Statistic and alarm flag emitted once the window is full.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartOutput<T> {
    pub t2: T,
    pub alarm: bool,
}

/// Moving-average T² chart over the latest `W` samples.
#[derive(Debug, Clone)]
pub struct MovingChart<T> {
    cfg: ChartConfig,
    model: Arc<GaussianModel<T>>,
    buffer: VecDeque<Vec<T>>,
    sum: Vec<CompensatedSum<T>>,
    steps_seen: u64,
    limit: T,
}

impl<T: Scalar> MovingChart<T> {
    pub fn new(model: Arc<GaussianModel<T>>, cfg: ChartConfig) -> Result<Self> {
        let limits = ControlLimits::for_model(&model, cfg.alpha)?;
        Ok(Self::with_limit(model, cfg, T::of(limits.limit(cfg.window))))
    }

    pub(crate) fn with_limit(model: Arc<GaussianModel<T>>, cfg: ChartConfig, limit: T) -> Self {
        let dim = model.dim();
        Self {
            cfg,
            model,
            buffer: VecDeque::with_capacity(cfg.window + 1),
            sum: vec![CompensatedSum::new(); dim],
            steps_seen: 0,
            limit,
        }
    }

    pub fn window(&self) -> usize {
        self.cfg.window
    }

    pub fn config(&self) -> &ChartConfig {
        &self.cfg
    }

    /// Cached `δ²_W`.
    pub fn limit(&self) -> T {
        self.limit
    }

    pub fn steps_seen(&self) -> u64 {
        self.steps_seen
    }

    /// Time index (1-based) of the most recent sample.
    pub fn current_time(&self) -> Time {
        self.steps_seen as Time
    }

    /// Pushes one sample. Returns `None` during the first `W − 1` steps.
    pub fn step(&mut self, sample: &[T]) -> Result<Option<ChartOutput<T>>> {
        self.model.check_dim(sample.len())?;
        for (acc, &x) in self.sum.iter_mut().zip(sample) {
            acc.add(x);
        }
        self.buffer.push_back(sample.to_vec());
        if self.buffer.len() > self.cfg.window {
            let old = self.buffer.pop_front().expect("buffer is non-empty");
            for (acc, &x) in self.sum.iter_mut().zip(&old) {
                acc.add(-x);
            }
        }
        self.steps_seen += 1;

        #[cfg(debug_assertions)]
        if self.steps_seen % RECHECK_PERIOD == 0 {
            self.recheck_sum();
        }

        if self.buffer.len() < self.cfg.window {
            return Ok(None);
        }
        let w = T::of_count(self.cfg.window);
        let mean: Vec<T> = self.sum.iter().map(|acc| acc.value() / w).collect();
        let t2 = self.model.hotelling_t2(&mean)?;
        Ok(Some(ChartOutput { t2, alarm: t2 > self.limit }))
    }

    #[cfg(debug_assertions)]
    fn recheck_sum(&self) {
        for (j, acc) in self.sum.iter().enumerate() {
            let exact: T = self.buffer.iter().map(|s| s[j]).sum();
            let scale = self.buffer.iter().map(|s| s[j].abs()).sum::<T>().max(T::one());
            debug_assert!(
                (exact - acc.value()).abs() <= scale * T::epsilon() * T::of(64.0),
                "running window sum drifted"
            );
        }
    }
}

/// One alarm: raised at `on` (first time `T² > δ²_W`), cleared at `off`
/// (first subsequent time `T² ≤ δ²_W`); `off` is `None` while still raised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alarm {
    pub on: Time,
    pub off: Option<Time>,
}

impl Alarm {
    pub fn closed(on: Time, off: Time) -> Self {
        Self { on, off: Some(off) }
    }

    pub fn open(on: Time) -> Self {
        Self { on, off: None }
    }

    pub fn is_open(&self) -> bool {
        self.off.is_none()
    }

    pub fn duration(&self) -> Option<Time> {
        self.off.map(|off| off - self.on)
    }

    /// Half-open span `[on, off)`, with open alarms extending to `horizon`.
    pub fn span(&self, horizon: Time) -> (Time, Time) {
        (self.on, self.off.unwrap_or(horizon))
    }
}

/// Ordered, interleaved alarm on/off times of one chart.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlarmSequence {
    alarms: Vec<Alarm>,
}

impl AlarmSequence {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a sequence, checking `off_{i−1} < on_i < off_i` and that only
    /// the last alarm may be open.
    pub fn from_alarms(alarms: Vec<Alarm>) -> Option<Self> {
        let seq = Self { alarms };
        seq.is_well_formed().then_some(seq)
    }

    pub fn alarms(&self) -> &[Alarm] {
        &self.alarms
    }

    pub fn len(&self) -> usize {
        self.alarms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alarms.is_empty()
    }

    pub fn last(&self) -> Option<&Alarm> {
        self.alarms.last()
    }

    pub fn is_well_formed(&self) -> bool {
        let n = self.alarms.len();
        let mut prev_off: Option<Time> = None;
        for (i, a) in self.alarms.iter().enumerate() {
            if let Some(p) = prev_off {
                if a.on <= p {
                    return false;
                }
            }
            match a.off {
                Some(off) if off > a.on => prev_off = Some(off),
                Some(_) => return false,
                None if i + 1 == n => {}
                None => return false,
            }
        }
        true
    }


    /// Appends another sequence that starts after this one has closed.
    pub fn concat(mut self, other: AlarmSequence) -> Option<Self> {
        self.alarms.extend(other.alarms);
        self.is_well_formed().then_some(self)
    }
}

/// Incremental alarm extraction from a flag stream.
#[derive(Debug, Clone, Default)]
pub struct AlarmTracker {
    seq: AlarmSequence,
    raised: bool,
}

impl AlarmTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, k: Time, alarm: bool) {
        match (self.raised, alarm) {
            (false, true) => {
                self.seq.alarms.push(Alarm::open(k));
                self.raised = true;
            }
            (true, false) => {
                if let Some(last) = self.seq.alarms.last_mut() {
                    last.off = Some(k);
                }
                self.raised = false;
            }
            _ => {}
        }
    }

    pub fn sequence(&self) -> &AlarmSequence {
        &self.seq
    }

    pub fn into_sequence(self) -> AlarmSequence {
        self.seq
    }
}

/// Extracts alarm on/off times from consecutive flags, the first of which
/// sits at time `first_index`.
pub fn extract_alarms(flags: &[bool], first_index: Time) -> AlarmSequence {
    let mut tracker = AlarmTracker::new();
    for (i, &f) in flags.iter().enumerate() {
        tracker.push(first_index + i as Time, f);
    }
    tracker.into_sequence()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn flags(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == 'T').collect()
    }

    fn unit_model() -> Arc<GaussianModel<f64>> {
        Arc::new(GaussianModel::from_parts(vec![1.0, -2.0], Matrix::identity(2), 5000).unwrap())
    }

    #[test]
    fn extract_single_alarm() {
        let seq = extract_alarms(&flags("FFTTTFF"), 1);
        assert_eq!(seq.alarms(), &[Alarm::closed(3, 6)]);
    }

    #[test]
    fn extract_no_alarm() {
        assert!(extract_alarms(&flags("FFFFFF"), 1).is_empty());
    }

    #[test]
    fn extract_open_trailing_alarm() {
        let seq = extract_alarms(&flags("TTFFTT"), 1);
        assert_eq!(seq.alarms(), &[Alarm::closed(1, 3), Alarm::open(5)]);
        assert!(seq.is_well_formed());
    }

    #[test]
    fn malformed_sequences_are_rejected() {
        assert!(AlarmSequence::from_alarms(vec![Alarm::closed(3, 3)]).is_none());
        assert!(AlarmSequence::from_alarms(vec![Alarm::closed(1, 4), Alarm::closed(4, 6)]).is_none());
        assert!(AlarmSequence::from_alarms(vec![Alarm::open(1), Alarm::closed(4, 6)]).is_none());
        assert!(AlarmSequence::from_alarms(vec![Alarm::closed(1, 4), Alarm::open(5)]).is_some());
    }

    #[test]
    fn warm_up_emits_nothing() {
        let cfg = ChartConfig::new(0.01, 3).unwrap();
        let mut chart = MovingChart::new(unit_model(), cfg).unwrap();
        assert!(chart.step(&[0.0, 0.0]).unwrap().is_none());
        assert!(chart.step(&[0.0, 0.0]).unwrap().is_none());
        assert!(chart.step(&[0.0, 0.0]).unwrap().is_some());
    }

    #[test]
    fn stream_at_training_mean_never_alarms() {
        let cfg = ChartConfig::new(0.01, 4).unwrap();
        let mut chart = MovingChart::new(unit_model(), cfg).unwrap();
        for _ in 0..1000 {
            if let Some(out) = chart.step(&[1.0, -2.0]).unwrap() {
                assert_eq!(out.t2, 0.0);
                assert!(!out.alarm);
            }
        }
    }

    #[test]
    fn sustained_large_shift_alarms_once_window_is_full() {
        let model = unit_model();
        let w = 5;
        let cfg = ChartConfig::new(0.01, w).unwrap();
        let mut chart = MovingChart::new(model.clone(), cfg).unwrap();
        let delta_w = chart.limit().sqrt();
        // whitened length 2.5 δ_W > 2 δ_W
        let shift = 2.5 * delta_w;
        let onset = 20;
        let mut first_alarm = None;
        for k in 1..=60 {
            let x = if k >= onset { [1.0 + shift, -2.0] } else { [1.0, -2.0] };
            if let Some(out) = chart.step(&x).unwrap() {
                if out.alarm && first_alarm.is_none() {
                    first_alarm = Some(k);
                }
                if k >= onset + w as i64 - 1 {
                    assert!(out.alarm, "full-window fault must alarm at k={k}");
                }
            }
        }
        let first = first_alarm.unwrap();
        assert!(first >= onset && first < onset + w as i64);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let mut chart = MovingChart::new(unit_model(), ChartConfig::new(0.01, 2).unwrap()).unwrap();
        assert!(chart.step(&[1.0]).is_err());
    }

    #[test]
    fn tie_at_limit_is_not_an_alarm() {
        let model = unit_model();
        let cfg = ChartConfig::new(0.01, 1).unwrap();
        // hand-set limit so that T² hits it exactly
        let mut chart = MovingChart::with_limit(model, cfg, 4.0);
        let out = chart.step(&[3.0, -2.0]).unwrap().unwrap();
        assert_eq!(out.t2, 4.0);
        assert!(!out.alarm);
    }
}
