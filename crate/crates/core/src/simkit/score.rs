//! Scoring a bank report against the injected ground truth.

use serde::{Deserialize, Serialize};

use crate::bank::{BankReport, EpisodeInference};
use crate::scalar::Scalar;
use crate::simkit::audit::Excursion;
use crate::simkit::faults::FaultSchedule;
use crate::Time;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthScore {
    pub mu: Time,
    pub nu: Time,
    /// Confirmed episode `q` overlapping this fault, if any.
    pub matched: Option<usize>,
    pub mu_contained: bool,
    pub nu_contained: bool,
}

impl TruthScore {
    pub fn contained(&self) -> bool {
        self.matched.is_some() && self.mu_contained && self.nu_contained
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub truths: Vec<TruthScore>,
    /// Confirmed episodes that overlap no injected fault.
    pub spurious: Vec<usize>,
    pub confirmed: usize,
}

impl Score {
    /// Every fault found once, contained, and nothing spurious.
    pub fn perfect(&self) -> bool {
        self.confirmed == self.truths.len() && self.spurious.is_empty() && self.truths.iter().all(TruthScore::contained)
    }

    pub fn contained_count(&self) -> usize {
        self.truths.iter().filter(|t| t.contained()).count()
    }
}

fn anchor_span(e: &EpisodeInference, horizon: Time) -> (Time, Time) {
    e.per_window
        .values()
        .next_back()
        .map(|w| w.alarm.span(horizon))
        .unwrap_or((e.mu_lo, e.nu_hi.unwrap_or(horizon)))
}

/// Matches each fault `[μ, ν)` to the confirmed episode whose longest-window
/// alarm overlaps `[μ, ν + W_max)` the most.
pub fn score<T: Scalar>(report: &BankReport, schedule: &FaultSchedule<T>) -> Score {
    let horizon = report.samples as Time + 1;
    let w_max = report.windows.last().map_or(1, |w| w.window) as Time;
    let confirmed: Vec<&EpisodeInference> = report.confirmed().collect();
    let mut used = vec![false; confirmed.len()];
    let truths = schedule
        .episodes()
        .iter()
        .map(|t| {
            let reach = (t.mu, t.nu + w_max);
            let best = confirmed
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let s = anchor_span(e, horizon);
                    (i, (s.1.min(reach.1) - s.0.max(reach.0)).max(0))
                })
                .filter(|&(_, o)| o > 0)
                .max_by_key(|&(i, o)| (o, std::cmp::Reverse(i)));
            match best {
                Some((i, _)) => {
                    used[i] = true;
                    let e = confirmed[i];
                    TruthScore {
                        mu: t.mu,
                        nu: t.nu,
                        matched: Some(e.q),
                        mu_contained: e.mu().contains(t.mu),
                        nu_contained: e.nu().contains(t.nu),
                    }
                }
                None => TruthScore { mu: t.mu, nu: t.nu, matched: None, mu_contained: false, nu_contained: false },
            }
        })
        .collect();
    let spurious = confirmed.iter().zip(&used).filter(|(_, &u)| !u).map(|(e, _)| e.q).collect();
    Score { truths, spurious, confirmed: confirmed.len() }
}

/// Excursions that can account for a scoring miss: those overlapping a
/// missed or uncontained fault's neighbourhood `[μ − W_max, ν + 2 W_max)`,
/// or a spurious episode's alarm.
pub fn explaining_excursions<'a>(
    report: &BankReport,
    score: &Score,
    excursions: &'a [Excursion],
) -> Vec<&'a Excursion> {
    let horizon = report.samples as Time + 1;
    let w_max = report.windows.last().map_or(1, |w| w.window) as Time;
    let mut zones: Vec<(Time, Time)> = score
        .truths
        .iter()
        .filter(|t| !t.contained())
        .map(|t| (t.mu - w_max, t.nu + 2 * w_max))
        .collect();
    for q in &score.spurious {
        if let Some(e) = report.episodes.iter().find(|e| e.q == *q) {
            zones.push(anchor_span(e, horizon));
        }
    }
    excursions
        .iter()
        .filter(|x| zones.iter().any(|z| x.start < z.1 && z.0 < x.end))
        .collect()
}
