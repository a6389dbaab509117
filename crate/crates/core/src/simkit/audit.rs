//! Excursions of the fault-free window mean out of its acceptance region.
//!
//! Guaranteed alarm timing assumes the clean window mean stays inside
//! `(x̄* − x̄)ᵀ S⁻¹ (x̄* − x̄) ≤ δ²_W`. Running the charts on the fault-free
//! copy of a test stream shows exactly where that assumption failed.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::monitor::MovingChart;
use crate::scalar::Scalar;
use crate::stat_core::{ChartConfig, GaussianModel};
use crate::Time;

/// Consecutive samples `[start, end)` where the clean chart exceeded its limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Excursion {
    pub window: usize,
    pub start: Time,
    pub end: Time,
    pub peak_t2: f64,
    pub limit: f64,
}

pub fn condition_excursions<T: Scalar>(
    model: &Arc<GaussianModel<T>>,
    clean: &[Vec<T>],
    windows: &[usize],
    alpha: f64,
) -> Result<Vec<Excursion>> {
    let mut out = Vec::new();
    for &w in windows {
        let mut chart = MovingChart::new(model.clone(), ChartConfig::new(alpha, w)?)?;
        let limit = chart.limit().to_f64_lossy();
        let mut open: Option<Excursion> = None;
        for (i, x) in clean.iter().enumerate() {
            let k = i as Time + 1;
            let Some(o) = chart.step(x)? else { continue };
            let t2 = o.t2.to_f64_lossy();
            match (&mut open, o.alarm) {
                (Some(e), true) => e.peak_t2 = e.peak_t2.max(t2),
                (None, true) => open = Some(Excursion { window: w, start: k, end: k + 1, peak_t2: t2, limit }),
                (Some(e), false) => {
                    e.end = k;
                    out.push(*e);
                    open = None;
                }
                (None, false) => {}
            }
        }
        if let Some(mut e) = open {
            e.end = clean.len() as Time + 1;
            out.push(e);
        }
    }
    Ok(out)
}
