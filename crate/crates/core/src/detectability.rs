//! Guaranteed-detectability calculus for intermittent faults.
//!
//! A fault episode is summarised by its whitened shift `s = ‖S^{-1/2} ξ f‖`
//! and three integer durations: the quiet period before it (`τʳ_{q−1}`), its
//! active period (`τᵒ_q`) and the quiet period after it (`τʳ_q`). Every
//! verdict below is a closed-form function of `s`, the training size `N`, the
//! single-observation limit `δ²` and those durations. Decisions are made in
//! `f64` whatever scalar the model uses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stat_core::{ChartConfig, ControlLimits, GaussianModel};

/// Relative slack absorbed before rounding a real bound to an integer.
const INTEGER_SLACK: f64 = 1e-9;

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= INTEGER_SLACK * x.abs().max(1.0) {
        r
    } else {
        x
    }
}

/// `a > b` with ties inside the slack counted as equal.
fn strictly_above(a: f64, b: f64) -> bool {
    a - b > INTEGER_SLACK * a.abs().max(b.abs())
}

/// `[x]⁺`, the least integer not below `x`.
fn ceil_int(x: f64) -> i64 {
    snap(x).ceil() as i64
}

/// Least integer strictly above `x`.
fn first_int_above(x: f64) -> i64 {
    snap(x).floor() as i64 + 1
}

/// Greatest integer strictly below `x`.
fn last_int_below(x: f64) -> i64 {
    snap(x).ceil() as i64 - 1
}

/// Integer durations (in sampling intervals) around one fault episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Durations {
    pub tau_off_prev: usize,
    pub tau_on: usize,
    pub tau_off_next: usize,
}

impl Durations {
    pub fn new(tau_off_prev: usize, tau_on: usize, tau_off_next: usize) -> Result<Self> {
        if tau_off_prev == 0 || tau_on == 0 || tau_off_next == 0 {
            return Err(Error::Domain("fault durations must be at least one sample".into()));
        }
        Ok(Self { tau_off_prev, tau_on, tau_off_next })
    }

    /// `W# = min{τʳ_{q−1}, τᵒ_q, τʳ_q}`.
    pub fn w_sharp(&self) -> usize {
        optimal_window_sharp(self.tau_off_prev, self.tau_on, self.tau_off_next)
    }

    fn min_quiet(&self) -> usize {
        self.tau_off_prev.min(self.tau_off_next)
    }
}

/// One intermittent-fault episode, or lower bounds on its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct IfParams<T> {
    pub direction: Vec<T>,
    pub magnitude: T,
    pub tau_on: usize,
    pub tau_off_prev: usize,
    pub tau_off_next: usize,
    /// Parameters are lower bounds `f̃, τ̃` rather than exact values.
    pub is_lower_bound: bool,
}

impl<T: Scalar> IfParams<T> {
    pub fn new(
        direction: Vec<T>,
        magnitude: T,
        tau_off_prev: usize,
        tau_on: usize,
        tau_off_next: usize,
    ) -> Result<Self> {
        if direction.is_empty() {
            return Err(Error::Domain("fault direction must be non-empty".into()));
        }
        if direction.iter().all(|x| x.is_zero()) {
            return Err(Error::Domain("fault direction must be nonzero".into()));
        }
        if !(magnitude > T::zero()) {
            return Err(Error::Domain("fault magnitude must be positive".into()));
        }
        Durations::new(tau_off_prev, tau_on, tau_off_next)?;
        Ok(Self { direction, magnitude, tau_on, tau_off_prev, tau_off_next, is_lower_bound: false })
    }

    /// Lower bounds `f̃`, `τ̃` shared by every episode of a fault train.
    pub fn uniform_lower_bounds(direction: Vec<T>, magnitude: T, tau: usize) -> Result<Self> {
        Ok(Self { is_lower_bound: true, ..Self::new(direction, magnitude, tau, tau, tau)? })
    }

    pub fn durations(&self) -> Durations {
        Durations {
            tau_off_prev: self.tau_off_prev,
            tau_on: self.tau_on,
            tau_off_next: self.tau_off_next,
        }
    }

    pub fn shift_vector(&self) -> Vec<T> {
        self.direction.iter().map(|&x| x * self.magnitude).collect()
    }
}

/// Whitened shift `‖S^{-1/2} ξ f‖` of a fault direction and magnitude.
pub fn shift_norm<T: Scalar>(model: &GaussianModel<T>, direction: &[T], magnitude: T) -> Result<f64> {
    let v: Vec<T> = direction.iter().map(|&x| x * magnitude).collect();
    Ok(model.mahalanobis_sq(&v)?.to_f64_lossy().sqrt())
}

/// Whitened shift of an episode's parameters.
pub fn whitened_shift<T: Scalar>(model: &GaussianModel<T>, params: &IfParams<T>) -> Result<f64> {
    shift_norm(model, &params.direction, params.magnitude)
}

/// Integer window interval `[lo, hi]`; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowRange {
    pub lo: usize,
    pub hi: usize,
}

impl WindowRange {
    pub fn empty() -> Self {
        Self { lo: 1, hi: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, w: usize) -> bool {
        self.lo <= w && w <= self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.hi - self.lo + 1
        }
    }
}

/// Guaranteed alarm delays of one window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlarmDelays {
    pub window: usize,
    /// `μᵈ(W)`: appearance delay.
    pub mu_delay: usize,
    /// `νᵈ(W) = W − 1`: disappearance delay.
    pub nu_delay: usize,
    /// `k** − ν_q = νᵈ − μᵈ`, how long the appearance alarm outlives the fault.
    pub k_doublestar_offset: usize,
}

/// Scalars that drive every detectability condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultGeometry {
    n_train: f64,
    delta_sq: f64,
    shift: f64,
}

impl FaultGeometry {
    pub fn new(limits: &ControlLimits, shift: f64) -> Self {
        Self { n_train: limits.n_train() as f64, delta_sq: limits.base(), shift }
    }

    pub fn from_parts(n_train: usize, delta_sq: f64, shift: f64) -> Self {
        Self { n_train: n_train as f64, delta_sq, shift }
    }

    pub fn from_model<T: Scalar>(
        model: &GaussianModel<T>,
        direction: &[T],
        magnitude: T,
        alpha: f64,
    ) -> Result<Self> {
        let limits = ControlLimits::for_model(model, alpha)?;
        Ok(Self::new(&limits, shift_norm(model, direction, magnitude)?))
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn delta_sq(&self) -> f64 {
        self.delta_sq
    }

    /// `δ_W = δ √((N+W) / (W(N+1)))`.
    pub fn delta_w(&self, w: usize) -> f64 {
        let (n, w) = (self.n_train, w as f64);
        (self.delta_sq * (n + w) / (w * (n + 1.0))).sqrt()
    }

    /// `c = (N+1) s² / (4δ²)`.
    fn scaled_power(&self) -> f64 {
        (self.n_train + 1.0) * self.shift * self.shift / (4.0 * self.delta_sq)
    }

    /// `(N+1)/(4δ²) ‖S^{-1/2}ξf‖² − 1`, the left side of the IF condition.
    pub fn margin(&self) -> f64 {
        self.scaled_power() - 1.0
    }

    /// Appearance condition for `W ≤ τʳ_{q−1}`: the direct form when the
    /// window fits inside the active period, the diluted `τᵒ/W` form otherwise.
    pub fn appearance_holds(&self, w: usize, tau_on: usize) -> bool {
        let two_delta_w = 2.0 * self.delta_w(w);
        if w <= tau_on {
            strictly_above(self.shift, two_delta_w)
        } else {
            strictly_above(self.shift * tau_on as f64 / w as f64, two_delta_w)
        }
    }

    /// Per-window verdict from the disappearance and appearance conditions.
    pub fn detectable_with_window(&self, w: usize, d: &Durations) -> bool {
        w >= 1
            && disappearance_detectable(w, d.tau_off_prev)
            && disappearance_detectable(w, d.tau_off_next)
            && self.appearance_holds(w, d.tau_on)
    }

    /// `margin > N / min{τʳ_{q−1}, τᵒ_q, τʳ_q}`.
    pub fn if_detectable(&self, d: &Durations) -> bool {
        strictly_above(self.margin(), self.n_train / d.w_sharp() as f64)
    }

    /// Positive root in `1/W` of the diluted appearance condition.
    fn diluted_root(&self, tau_on: usize) -> f64 {
        let c = self.scaled_power();
        let t = tau_on as f64;
        let h = self.n_train / (2.0 * t);
        (h + (h * h + c).sqrt()) / (t * c)
    }

    /// Integer solutions `W` of the two-sided reciprocal window inequality.
    pub fn admissible_windows(&self, d: &Durations) -> WindowRange {
        let margin = self.margin();
        if !(margin > 0.0) {
            return WindowRange::empty();
        }
        // upper side: margin / N > 1 / W
        let lo = first_int_above(self.n_train / margin).max(1);
        // lower side: 1/W >(≥) max{root, 1/min τʳ}
        let quiet = d.min_quiet() as f64;
        let root = self.diluted_root(d.tau_on);
        let hi = if root >= 1.0 / quiet {
            last_int_below(1.0 / root)
        } else {
            quiet as i64
        };
        if hi < lo {
            return WindowRange::empty();
        }
        WindowRange { lo: lo as usize, hi: hi as usize }
    }

    /// `μᵈ(W) = [√(W(N+W)/(N+1)) · 2δ/s]⁺ − 1`.
    pub fn mu_delay(&self, w: usize) -> usize {
        let (n, wf) = (self.n_train, w as f64);
        let x = (wf * (n + wf) / (n + 1.0)).sqrt() * 2.0 * self.delta_sq.sqrt() / self.shift;
        (ceil_int(x) - 1).max(0) as usize
    }

    pub fn alarm_delays(&self, w: usize, d: &Durations) -> Result<AlarmDelays> {
        if !self.admissible_windows(d).contains(w) {
            return Err(Error::NotDetectableWithWindow { window: w });
        }
        let mu_delay = self.mu_delay(w);
        let nu_delay = w - 1;
        debug_assert!(mu_delay < w.min(d.tau_on), "appearance delay exceeds its guaranteed bound");
        Ok(AlarmDelays {
            window: w,
            mu_delay,
            nu_delay,
            k_doublestar_offset: nu_delay.saturating_sub(mu_delay),
        })
    }

    /// `W* = [N / margin]⁺`.
    pub fn w_star(&self) -> Result<usize> {
        let margin = self.margin();
        if !(margin > 0.0) {
            return Err(Error::NotPfDetectable);
        }
        Ok(ceil_int(self.n_train / margin).max(1) as usize)
    }

    /// Permanent-fault specialisation (all durations unbounded).
    pub fn permanent(&self) -> PfReport {
        let margin = self.margin();
        let detectable = margin > 0.0;
        let min_window = detectable.then(|| first_int_above(self.n_train / margin).max(1) as usize);
        PfReport { detectable, margin: margin / self.n_train, min_window, geometry: *self }
    }
}

/// Verdict for a permanent fault.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfReport {
    pub detectable: bool,
    /// `(1/N)((N+1)/(4δ²) s² − 1)`; detectable iff positive.
    pub margin: f64,
    /// Smallest window with `1/W` below `margin`.
    pub min_window: Option<usize>,
    geometry: FaultGeometry,
}

impl PfReport {
    /// Appearance delay at window `w`, if `w` guarantees detection.
    pub fn delay(&self, w: usize) -> Option<usize> {
        match self.min_window {
            Some(min) if w >= min => Some(self.geometry.mu_delay(w)),
            _ => None,
        }
    }
}

/// Disappearance is guaranteed detectable iff `W ≤ τʳ`.
pub fn disappearance_detectable(w: usize, tau_off: usize) -> bool {
    w <= tau_off
}

/// Appearance verdict for the window in `cfg`.
pub fn appearance_detectable<T: Scalar>(
    model: &GaussianModel<T>,
    params: &IfParams<T>,
    cfg: &ChartConfig,
) -> Result<bool> {
    if cfg.window > params.tau_off_prev {
        return Err(Error::WindowExceedsPrevQuiet {
            window: cfg.window,
            tau_off_prev: params.tau_off_prev,
        });
    }
    let g = FaultGeometry::from_model(model, &params.direction, params.magnitude, cfg.alpha)?;
    Ok(g.appearance_holds(cfg.window, params.tau_on))
}

pub fn if_detectable<T: Scalar>(model: &GaussianModel<T>, params: &IfParams<T>, alpha: f64) -> Result<bool> {
    let g = FaultGeometry::from_model(model, &params.direction, params.magnitude, alpha)?;
    Ok(g.if_detectable(&params.durations()))
}

pub fn admissible_windows<T: Scalar>(
    model: &GaussianModel<T>,
    params: &IfParams<T>,
    alpha: f64,
) -> Result<WindowRange> {
    let g = FaultGeometry::from_model(model, &params.direction, params.magnitude, alpha)?;
    Ok(g.admissible_windows(&params.durations()))
}

pub fn alarm_delays<T: Scalar>(
    model: &GaussianModel<T>,
    params: &IfParams<T>,
    w: usize,
    alpha: f64,
) -> Result<AlarmDelays> {
    let g = FaultGeometry::from_model(model, &params.direction, params.magnitude, alpha)?;
    g.alarm_delays(w, &params.durations())
}

pub fn pf_detectable<T: Scalar>(
    model: &GaussianModel<T>,
    direction: &[T],
    magnitude: T,
    alpha: f64,
) -> Result<PfReport> {
    Ok(FaultGeometry::from_model(model, direction, magnitude, alpha)?.permanent())
}

pub fn optimal_window_star<T: Scalar>(
    model: &GaussianModel<T>,
    direction: &[T],
    magnitude: T,
    alpha: f64,
) -> Result<usize> {
    FaultGeometry::from_model(model, direction, magnitude, alpha)?.w_star()
}

pub fn optimal_window_sharp(tau_off_prev: usize, tau_on: usize, tau_off_next: usize) -> usize {
    tau_off_prev.min(tau_on).min(tau_off_next)
}

/// Full verdict for one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectabilityReport {
    pub detectable: bool,
    pub whitened_shift: f64,
    pub delta_sq: f64,
    pub margin: f64,
    pub admissible_windows: WindowRange,
    pub delays: Vec<AlarmDelays>,
    pub w_star: Option<usize>,
    pub w_sharp: usize,
    /// Admissible windows sitting on `W = min{τʳ_{q−1}, τʳ_q}`, admitted
    /// through the non-strict branch of the window inequality.
    pub boundary_windows: Vec<usize>,
}

pub fn detectability_report<T: Scalar>(
    model: &GaussianModel<T>,
    params: &IfParams<T>,
    alpha: f64,
) -> Result<DetectabilityReport> {
    let g = FaultGeometry::from_model(model, &params.direction, params.magnitude, alpha)?;
    Ok(report_from_geometry(&g, &params.durations()))
}

pub fn report_from_geometry(g: &FaultGeometry, d: &Durations) -> DetectabilityReport {
    let admissible = g.admissible_windows(d);
    let delays = admissible
        .iter()
        .filter_map(|w| g.alarm_delays(w, d).ok())
        .collect();
    DetectabilityReport {
        detectable: g.if_detectable(d),
        whitened_shift: g.shift(),
        delta_sq: g.delta_sq(),
        margin: g.margin(),
        admissible_windows: admissible,
        delays,
        w_star: g.w_star().ok(),
        w_sharp: d.w_sharp(),
        boundary_windows: admissible.iter().filter(|&w| w == d.min_quiet()).collect(),
    }
}
