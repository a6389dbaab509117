//! Multi-window chart bank: alarm cleaning and fault-time inference.
//!
//! Every admissible window runs its own moving chart over the same stream.
//! At report time the alarm sequences are cleaned against the guaranteed
//! alarm durations and against each other, then every confirmed episode of
//! the longest chart gets one appearance and one disappearance interval per
//! window; the published intervals are their intersections.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::detectability::{AlarmDelays, Durations, FaultGeometry, IfParams};
use crate::error::{Error, Result};
use crate::monitor::{Alarm, AlarmSequence, AlarmTracker, ChartOutput, MovingChart};
use crate::scalar::Scalar;
use crate::stat_core::{ChartConfig, ControlLimits, GaussianModel};
use crate::Time;

/// Order of the two cleaning phases within one pass.
///
/// Excluding first keeps a one-sample false alarm that sits just before a
/// genuine alarm from being merged into it by the gap rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CleaningOrder {
    CompensateFirst,
    #[default]
    ExcludeFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BankConfig {
    pub alpha: f64,
    pub order: CleaningOrder,
    pub max_passes: usize,
}

impl Default for BankConfig {
    fn default() -> Self {
        Self { alpha: 0.01, order: CleaningOrder::default(), max_passes: 100 }
    }
}

/// Guaranteed lower bounds on alarm and gap durations for one window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinDurations {
    /// Shortest genuine appearance alarm `ν^A_i − μ^A_i`.
    pub min_app: Time,
    /// Shortest gap after an episode `μ^A_{l+1} − ν^A_l`.
    pub min_disapp: Time,
    /// Shortest gap before an episode `μ^A_{j+1} − ν^A_j`.
    pub min_prev_disapp: Time,
}

pub fn min_alarm_durations(delays: &AlarmDelays, d: &Durations) -> MinDurations {
    let w = delays.window as Time;
    let mu_d = delays.mu_delay as Time;
    let nu_d = delays.nu_delay as Time;
    let tau_on = d.tau_on as Time;
    let min_app = (tau_on + nu_d - 2 * mu_d).max(w - mu_d).max(tau_on - mu_d).max(1);
    MinDurations {
        min_app,
        min_disapp: (d.tau_off_next as Time - nu_d).max(1),
        min_prev_disapp: (d.tau_off_prev as Time - nu_d).max(1),
    }
}

/// Alarms of one window together with what is needed to clean them.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowAlarms {
    pub delays: AlarmDelays,
    pub min: MinDurations,
    pub alarms: Vec<Alarm>,
}

impl WindowAlarms {
    pub fn window(&self) -> usize {
        self.delays.window
    }
}

/// Snapshot of all windows' alarms, ordered by increasing window.
#[derive(Debug, Clone, PartialEq)]
pub struct CleaningState {
    pub windows: Vec<WindowAlarms>,
    /// One past the last observed sample; open alarms extend to here.
    pub horizon: Time,
    /// Times the longest chart's latest alarm was excluded.
    pub reinitializations: usize,
}

fn intersects(a: (Time, Time), b: (Time, Time)) -> bool {
    a.0 < b.1 && b.0 < a.1
}

fn overlap(a: (Time, Time), b: (Time, Time)) -> Time {
    (a.1.min(b.1) - a.0.max(b.0)).max(0)
}

/// Half-open quiet spans of a sequence, including the leading and trailing ones.
fn gaps(alarms: &[Alarm], horizon: Time) -> Vec<(Time, Time)> {
    let mut out = Vec::with_capacity(alarms.len() + 1);
    let mut start = 1;
    for a in alarms {
        if a.on > start {
            out.push((start, a.on));
        }
        match a.off {
            Some(off) => start = off,
            None => return out,
        }
    }
    if horizon > start {
        out.push((start, horizon));
    }
    out
}

fn merge_marked(alarms: &mut Vec<Alarm>, merge_before: &[bool]) -> bool {
    if !merge_before.iter().any(|&m| m) {
        return false;
    }
    let mut out: Vec<Alarm> = Vec::with_capacity(alarms.len());
    for (i, a) in alarms.iter().enumerate() {
        match out.last_mut() {
            Some(prev) if merge_before[i] => prev.off = a.off,
            _ => out.push(*a),
        }
    }
    *alarms = out;
    true
}

fn drop_marked(alarms: &mut Vec<Alarm>, drop: &[bool]) -> bool {
    if !drop.iter().any(|&d| d) {
        return false;
    }
    let mut i = 0;
    alarms.retain(|_| {
        let keep = !drop[i];
        i += 1;
        keep
    });
    true
}

impl CleaningState {
    /// Missing-alarm compensation: merges alarms across gaps that are too
    /// short to be genuine, or that some other window sees no gap at all.
    /// Returns whether anything changed.
    pub fn compensate_missing(&mut self) -> bool {
        let mut changed = false;
        // gaps below the guaranteed disappearance duration
        for wa in &mut self.windows {
            let marks: Vec<bool> = (0..wa.alarms.len())
                .map(|i| {
                    i > 0
                        && wa.alarms[i - 1]
                            .off
                            .is_some_and(|off| wa.alarms[i].on - off < wa.min.min_disapp)
                })
                .collect();
            changed |= merge_marked(&mut wa.alarms, &marks);
        }
        // gaps that some other window does not share
        let all_gaps: Vec<Vec<(Time, Time)>> =
            self.windows.iter().map(|wa| gaps(&wa.alarms, self.horizon)).collect();
        let marks: Vec<Vec<bool>> = self
            .windows
            .iter()
            .enumerate()
            .map(|(w, wa)| {
                (0..wa.alarms.len())
                    .map(|i| {
                        let Some(off) = (i > 0).then(|| wa.alarms[i - 1].off).flatten() else {
                            return false;
                        };
                        let gap = (off, wa.alarms[i].on);
                        all_gaps
                            .iter()
                            .enumerate()
                            .any(|(v, g)| v != w && !g.iter().any(|&o| intersects(gap, o)))
                    })
                    .collect()
            })
            .collect();
        for (wa, m) in self.windows.iter_mut().zip(&marks) {
            changed |= merge_marked(&mut wa.alarms, m);
        }
        changed
    }

    /// False-alarm exclusion: drops closed alarms shorter than the guaranteed
    /// appearance duration, and alarms that some other window does not echo.
    /// Returns whether anything changed.
    pub fn exclude_false(&mut self) -> bool {
        let mut changed = false;
        for wa in &mut self.windows {
            let marks: Vec<bool> = wa
                .alarms
                .iter()
                .map(|a| a.duration().is_some_and(|d| d < wa.min.min_app))
                .collect();
            changed |= drop_marked(&mut wa.alarms, &marks);
        }
        let horizon = self.horizon;
        let spans: Vec<Vec<(Time, Time)>> = self
            .windows
            .iter()
            .map(|wa| wa.alarms.iter().map(|a| a.span(horizon)).collect())
            .collect();
        let longest = self.windows.len().saturating_sub(1);
        for (w, wa) in self.windows.iter_mut().enumerate() {
            let marks: Vec<bool> = wa
                .alarms
                .iter()
                .map(|a| {
                    !a.is_open()
                        && spans.iter().enumerate().any(|(v, s)| {
                            v != w && !s.iter().any(|&o| intersects(a.span(horizon), o))
                        })
                })
                .collect();
            let latest_closed = wa.alarms.iter().rposition(|a| !a.is_open());
            if w == longest && latest_closed.is_some_and(|i| marks[i]) {
                self.reinitializations += 1;
            }
            changed |= drop_marked(&mut wa.alarms, &marks);
        }
        changed
    }

    /// Runs both phases until nothing changes. Returns the number of passes
    /// and whether the cap was hit before reaching a fixpoint.
    pub fn clean(&mut self, order: CleaningOrder, max_passes: usize) -> (usize, bool) {
        for pass in 1..=max_passes {
            let changed = match order {
                CleaningOrder::CompensateFirst => {
                    let a = self.compensate_missing();
                    self.exclude_false() | a
                }
                CleaningOrder::ExcludeFirst => {
                    let a = self.exclude_false();
                    self.compensate_missing() | a
                }
            };
            if !changed {
                return (pass, false);
            }
        }
        (max_passes, true)
    }
}

/// Closed interval `[lo, hi]`; `hi = None` means unbounded above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeInterval {
    pub lo: Time,
    pub hi: Option<Time>,
}

impl TimeInterval {
    pub fn new(lo: Time, hi: Time) -> Self {
        Self { lo, hi: Some(hi) }
    }

    pub fn is_empty(&self) -> bool {
        self.hi.is_some_and(|hi| hi < self.lo)
    }

    pub fn contains(&self, t: Time) -> bool {
        self.lo <= t && self.hi.is_none_or(|hi| t <= hi)
    }

    fn intersect(&self, other: &Self) -> Self {
        let hi = match (self.hi, other.hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Self { lo: self.lo.max(other.lo), hi }
    }
}

/// Bounds on one episode's appearance and disappearance from one window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowInference {
    pub alarm: Alarm,
    pub mu: TimeInterval,
    pub nu: TimeInterval,
    pub has_preceding: bool,
    pub has_following: bool,
}

/// Bounds from the `idx`-th alarm of a cleaned sequence.
pub fn infer_times(alarms: &[Alarm], idx: usize, delays: &AlarmDelays) -> Result<WindowInference> {
    let a = *alarms
        .get(idx)
        .ok_or_else(|| Error::InconsistentAlarms(format!("no alarm with index {idx}")))?;
    let prev_off = idx.checked_sub(1).and_then(|j| alarms[j].off);
    let next_on = alarms.get(idx + 1).map(|n| n.on);
    let w = delays.window as Time;
    let mu_d = delays.mu_delay as Time;
    let nu_d = delays.nu_delay as Time;

    let mut mu_lo = a.on - mu_d;
    if let Some(p) = prev_off {
        mu_lo = mu_lo.max(p + 1);
    }
    let mut mu_hi = a.on;
    if let Some(off) = a.off {
        mu_hi = mu_hi.min(off - mu_d - 1);
    }

    let mut nu_lo = a.on + 1 + (mu_d - nu_d).max(0);
    if let Some(off) = a.off {
        nu_lo = nu_lo.max(off - nu_d);
    }
    let nu_hi = a.off.map(|off| {
        let hi = off + (mu_d - nu_d).min(0);
        next_on.map_or(hi, |n| hi.min(n - w))
    });

    let inf = WindowInference {
        alarm: a,
        mu: TimeInterval::new(mu_lo, mu_hi),
        nu: TimeInterval { lo: nu_lo, hi: nu_hi },
        has_preceding: prev_off.is_some(),
        has_following: next_on.is_some(),
    };
    if inf.mu.is_empty() || inf.nu.is_empty() {
        return Err(Error::InconsistentAlarms(format!(
            "window {} alarm [{}, {:?}) yields empty bounds",
            delays.window, a.on, a.off
        )));
    }
    Ok(inf)
}

/// Coordinate-wise intersection of per-window `(μ, ν)` bounds.
pub fn intersect_inferences<'a, I>(per_window: I) -> Result<(TimeInterval, TimeInterval)>
where
    I: IntoIterator<Item = (&'a TimeInterval, &'a TimeInterval)>,
{
    let mut it = per_window.into_iter();
    let (m0, n0) = it
        .next()
        .ok_or_else(|| Error::InconsistentAlarms("no per-window bounds to intersect".into()))?;
    let (mu, nu) = it.fold((*m0, *n0), |(m, n), (mi, ni)| (m.intersect(mi), n.intersect(ni)));
    if mu.is_empty() || nu.is_empty() {
        return Err(Error::InconsistentAlarms(format!(
            "empty intersection: mu [{}, {:?}], nu [{}, {:?}]",
            mu.lo, mu.hi, nu.lo, nu.hi
        )));
    }
    Ok((mu, nu))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "window")]
pub enum EpisodeFlag {
    /// No earlier alarm bounds the appearance from below.
    NoPrecedingAlarm,
    /// No later alarm bounds the disappearance from above.
    NoFollowingAlarm,
    /// The stream ended while the alarm was still raised.
    OpenAlarm,
    /// This window has no alarm overlapping the episode.
    MissingWindow(usize),
    /// Several alarms of this window overlap the episode.
    AmbiguousPartner(usize),
    /// Per-window bounds were empty or did not intersect.
    InconsistentAlarms,
    /// Cleaning stopped at the pass cap.
    CleaningCapExceeded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeInference {
    pub q: usize,
    pub mu_lo: Time,
    pub mu_hi: Time,
    pub nu_lo: Time,
    pub nu_hi: Option<Time>,
    pub per_window: BTreeMap<usize, WindowInference>,
    pub flags: Vec<EpisodeFlag>,
    pub confirmed: bool,
}

impl EpisodeInference {
    pub fn mu(&self) -> TimeInterval {
        TimeInterval::new(self.mu_lo, self.mu_hi)
    }

    pub fn nu(&self) -> TimeInterval {
        TimeInterval { lo: self.nu_lo, hi: self.nu_hi }
    }

    pub fn contains(&self, mu: Time, nu: Time) -> bool {
        self.mu().contains(mu) && self.nu().contains(nu)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSummary {
    pub window: usize,
    pub mu_delay: usize,
    pub nu_delay: usize,
    pub min_durations: MinDurations,
    pub raw_alarms: AlarmSequence,
    pub cleaned_alarms: AlarmSequence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankReport {
    pub samples: usize,
    pub windows: Vec<WindowSummary>,
    pub episodes: Vec<EpisodeInference>,
    pub cleaning_passes: usize,
    pub cleaning_cap_exceeded: bool,
    pub reinitializations: usize,
}

impl BankReport {
    pub fn confirmed(&self) -> impl Iterator<Item = &EpisodeInference> {
        self.episodes.iter().filter(|e| e.confirmed)
    }
}

/// Windows `[W*, W#]` clipped to the admissible range, with their delays.
pub fn plan_windows(geometry: &FaultGeometry, d: &Durations) -> Result<Vec<AlarmDelays>> {
    let range = geometry.admissible_windows(d);
    let w_star = geometry.w_star().map_err(|_| Error::EmptyWindowSet)?;
    let lo = w_star.max(range.lo);
    let hi = d.w_sharp().min(range.hi);
    if range.is_empty() || lo > hi {
        return Err(Error::EmptyWindowSet);
    }
    (lo..=hi).map(|w| geometry.alarm_delays(w, d)).collect()
}

/// Online bank of moving charts with report-time cleaning and inference.
#[derive(Debug, Clone)]
pub struct Bank<T> {
    config: BankConfig,
    durations: Durations,
    plans: Vec<(AlarmDelays, MinDurations)>,
    charts: Vec<MovingChart<T>>,
    trackers: Vec<AlarmTracker>,
    samples: usize,
}

impl<T: Scalar> Bank<T> {
    /// Bank over `[W*, W#]` for the given fault parameters (or lower bounds).
    pub fn new(model: Arc<GaussianModel<T>>, params: &IfParams<T>, config: BankConfig) -> Result<Self> {
        let geometry = FaultGeometry::from_model(&model, &params.direction, params.magnitude, config.alpha)?;
        let d = params.durations();
        let plans = plan_windows(&geometry, &d)?;
        Self::from_plans(model, d, plans, config)
    }

    /// Bank over an explicit window list; every window must be admissible.
    pub fn with_windows(
        model: Arc<GaussianModel<T>>,
        params: &IfParams<T>,
        windows: &[usize],
        config: BankConfig,
    ) -> Result<Self> {
        if windows.is_empty() {
            return Err(Error::EmptyWindowSet);
        }
        let geometry = FaultGeometry::from_model(&model, &params.direction, params.magnitude, config.alpha)?;
        let d = params.durations();
        let mut ws = windows.to_vec();
        ws.sort_unstable();
        ws.dedup();
        let plans = ws.iter().map(|&w| geometry.alarm_delays(w, &d)).collect::<Result<_>>()?;
        Self::from_plans(model, d, plans, config)
    }

    fn from_plans(
        model: Arc<GaussianModel<T>>,
        durations: Durations,
        plans: Vec<AlarmDelays>,
        config: BankConfig,
    ) -> Result<Self> {
        let limits = ControlLimits::for_model(&model, config.alpha)?;
        let mut charts = Vec::with_capacity(plans.len());
        for p in &plans {
            let cfg = ChartConfig::new(config.alpha, p.window)?;
            charts.push(MovingChart::with_limit(model.clone(), cfg, T::of(limits.limit(p.window))));
        }
        let plans: Vec<_> = plans.into_iter().map(|p| (p, min_alarm_durations(&p, &durations))).collect();
        log::debug!(
            "bank windows {:?}",
            plans.iter().map(|(p, _)| p.window).collect::<Vec<_>>()
        );
        Ok(Self {
            config,
            durations,
            trackers: vec![AlarmTracker::new(); plans.len()],
            plans,
            charts,
            samples: 0,
        })
    }

    pub fn windows(&self) -> Vec<usize> {
        self.plans.iter().map(|(p, _)| p.window).collect()
    }

    pub fn delays(&self) -> Vec<AlarmDelays> {
        self.plans.iter().map(|(p, _)| *p).collect()
    }

    pub fn durations(&self) -> Durations {
        self.durations
    }

    pub fn charts(&self) -> &[MovingChart<T>] {
        &self.charts
    }

    /// Feeds one sample to every chart; returns each chart's output in
    /// window order (`None` while a window is still filling).
    pub fn push(&mut self, sample: &[T]) -> Result<Vec<Option<ChartOutput<T>>>> {
        let k = self.samples as Time + 1;
        let mut outs = Vec::with_capacity(self.charts.len());
        for (chart, tracker) in self.charts.iter_mut().zip(&mut self.trackers) {
            let out = chart.step(sample)?;
            if let Some(o) = out {
                tracker.push(k, o.alarm);
            }
            outs.push(out);
        }
        self.samples += 1;
        Ok(outs)
    }

    pub fn raw_alarms(&self) -> Vec<&AlarmSequence> {
        self.trackers.iter().map(AlarmTracker::sequence).collect()
    }

    fn cleaning_state(&self) -> CleaningState {
        CleaningState {
            windows: self
                .plans
                .iter()
                .zip(&self.trackers)
                .map(|(&(delays, min), t)| WindowAlarms {
                    delays,
                    min,
                    alarms: t.sequence().alarms().to_vec(),
                })
                .collect(),
            horizon: self.samples as Time + 1,
            reinitializations: 0,
        }
    }

    /// Cleans a snapshot of all alarm sequences and infers every episode.
    pub fn report(&self) -> BankReport {
        let mut state = self.cleaning_state();
        let (passes, cap_hit) = state.clean(self.config.order, self.config.max_passes);
        if cap_hit {
            log::warn!("alarm cleaning hit the {}-pass cap", self.config.max_passes);
        }
        let episodes = infer_episodes(&state, cap_hit);
        let windows = state
            .windows
            .iter()
            .zip(&self.trackers)
            .map(|(wa, t)| WindowSummary {
                window: wa.window(),
                mu_delay: wa.delays.mu_delay,
                nu_delay: wa.delays.nu_delay,
                min_durations: wa.min,
                raw_alarms: t.sequence().clone(),
                cleaned_alarms: AlarmSequence::from_alarms(wa.alarms.clone())
                    .expect("cleaning keeps sequences interleaved"),
            })
            .collect();
        BankReport {
            samples: self.samples,
            windows,
            episodes,
            cleaning_passes: passes,
            cleaning_cap_exceeded: cap_hit,
            reinitializations: state.reinitializations,
        }
    }

    /// Pushes a whole stream, then reports.
    pub fn run<S: AsRef<[T]>>(mut self, stream: &[S]) -> Result<BankReport> {
        for x in stream {
            self.push(x.as_ref())?;
        }
        Ok(self.report())
    }
}

/// Episodes anchored on the longest window's cleaned alarms.
pub fn infer_episodes(state: &CleaningState, cap_hit: bool) -> Vec<EpisodeInference> {
    let Some(anchor) = state.windows.last() else {
        return Vec::new();
    };
    let horizon = state.horizon;
    let mut episodes = Vec::new();
    for (idx, a) in anchor.alarms.iter().enumerate() {
        let span = a.span(horizon);
        let mut flags = Vec::new();
        if cap_hit {
            flags.push(EpisodeFlag::CleaningCapExceeded);
        }
        if a.is_open() {
            flags.push(EpisodeFlag::OpenAlarm);
        }
        let confirmed = a.duration().is_some_and(|d| d >= anchor.min.min_app);
        let mut per_window = BTreeMap::new();
        for wa in &state.windows {
            let partner = if std::ptr::eq(wa, anchor) {
                Some(idx)
            } else {
                let hits: Vec<(usize, Time)> = wa
                    .alarms
                    .iter()
                    .enumerate()
                    .map(|(i, b)| (i, overlap(span, b.span(horizon))))
                    .filter(|&(_, o)| o > 0)
                    .collect();
                if hits.len() > 1 {
                    flags.push(EpisodeFlag::AmbiguousPartner(wa.window()));
                }
                // largest overlap, earliest on ties
                hits.iter().rev().max_by_key(|&&(_, o)| o).map(|&(i, _)| i)
            };
            let Some(i) = partner else {
                flags.push(EpisodeFlag::MissingWindow(wa.window()));
                continue;
            };
            match infer_times(&wa.alarms, i, &wa.delays) {
                Ok(inf) => {
                    if !inf.has_preceding {
                        flags.push(EpisodeFlag::NoPrecedingAlarm);
                    }
                    if !inf.has_following {
                        flags.push(EpisodeFlag::NoFollowingAlarm);
                    }
                    per_window.insert(wa.window(), inf);
                }
                Err(e) => {
                    log::info!("episode {}: {e}", episodes.len() + 1);
                    flags.push(EpisodeFlag::InconsistentAlarms);
                }
            }
        }
        let combined = intersect_inferences(per_window.values().map(|i| (&i.mu, &i.nu)));
        let (mu, nu) = match combined {
            Ok(b) => b,
            Err(e) => {
                log::info!("episode {}: {e}", episodes.len() + 1);
                flags.push(EpisodeFlag::InconsistentAlarms);
                match per_window.get(&anchor.window()) {
                    Some(own) => (own.mu, own.nu),
                    None => (TimeInterval::new(span.0, span.0), TimeInterval { lo: span.0 + 1, hi: None }),
                }
            }
        };
        flags.sort();
        flags.dedup();
        episodes.push(EpisodeInference {
            q: episodes.len() + 1,
            mu_lo: mu.lo,
            mu_hi: mu.hi.unwrap_or(mu.lo),
            nu_lo: nu.lo,
            nu_hi: nu.hi,
            per_window,
            flags,
            confirmed,
        });
    }
    episodes
}

/// Convenience wrapper: bank over `[W*, W#]`, fed with `stream`.
pub fn run<T: Scalar, S: AsRef<[T]>>(
    model: Arc<GaussianModel<T>>,
    params: &IfParams<T>,
    config: BankConfig,
    stream: &[S],
) -> Result<BankReport> {
    Bank::new(model, params, config)?.run(stream)
}
