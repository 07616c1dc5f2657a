//! The full sweep pipeline and the stability walk along the delay axis.

use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use super::direction::{classify_direction, Direction};
use super::ladder::taus_from_crossing;
use super::refine::refine_crossing;
use super::scan::parallel_scan;
use crate::error::{Error, Result};
use crate::system::RetardedSystem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t_c: f64,
    pub omega_c: f64,
    pub direction: Direction,
    /// `tau_0 < tau_1 < ...`, spaced by `2 pi / omega_c`.
    pub taus: Vec<f64>,
}

impl Crossing {
    pub fn tau0(&self) -> f64 {
        self.taus[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayMargin {
    Finite(f64),
    /// Stable for every delay.
    Unbounded,
}

impl DelayMargin {
    pub fn finite(self) -> Option<f64> {
        match self {
            DelayMargin::Finite(t) => Some(t),
            DelayMargin::Unbounded => None,
        }
    }
}

/// A delay interval with no characteristic roots in the right half plane.
/// `hi = None` means the interval is still open at the end of the walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableWindow {
    pub lo: f64,
    pub hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Sorted by `tau_0`.
    pub crossings: Vec<Crossing>,
    pub delay_margin: DelayMargin,
    pub windows: Vec<StableWindow>,
    /// Delays beyond this value are not covered by every truncated ladder, so
    /// the walk stops here. `None` when no ladder was walked.
    pub walk_horizon: Option<f64>,
}

/// Refine, classify and attach delay ladders to the crossings found by the
/// scan, without the stability walk.
pub fn find_crossings(sys: &RetardedSystem, cfg: &SweepConfig) -> Result<Vec<Crossing>> {
    cfg.validate()?;
    if sys.check_zero_root() {
        return Err(Error::ZeroRoot);
    }
    let spectrum = sys.delay_free_spectrum()?;
    if spectrum.rhp_count > 0 {
        return Err(Error::UnstableDelayFree {
            max_real: spectrum.max_real(),
        });
    }

    let mut crossings: Vec<Crossing> = Vec::new();
    for candidate in parallel_scan(sys, cfg)? {
        for point in refine_crossing(sys, &candidate, cfg)? {
            let duplicate = crossings.iter().any(|c| {
                (c.t_c - point.t_c).abs() <= 10.0 * cfg.refine_tol
                    && (c.omega_c - point.omega_c).abs() <= 1e-9 * (1.0 + point.omega_c)
            });
            if duplicate {
                continue;
            }
            let direction = classify_direction(sys, point.t_c, point.omega_c, cfg)?;
            crossings.push(Crossing {
                t_c: point.t_c,
                omega_c: point.omega_c,
                direction,
                taus: taus_from_crossing(point.t_c, point.omega_c, cfg.k_max)?,
            });
        }
    }
    crossings.sort_by(|a, b| a.tau0().total_cmp(&b.tau0()).then(a.omega_c.total_cmp(&b.omega_c)));
    Ok(crossings)
}

/// Sweep, refine, classify and walk. The configured `T` range is first
/// widened to [`SweepConfig::t_bound`].
pub fn analyze(sys: &RetardedSystem, cfg: &SweepConfig) -> Result<StabilityReport> {
    let cfg = cfg.clone().widened_for(sys);
    let crossings = find_crossings(sys, &cfg)?;
    stability_walk(crossings)
}

/// Counts unstable pole pairs along the merged delay ladders: +1 for each
/// destabilizing delay, -1 for each stabilizing one. Inconclusive crossings
/// stay in the report but are not walked.
pub fn stability_walk(crossings: Vec<Crossing>) -> Result<StabilityReport> {
    let walked: Vec<&Crossing> = crossings
        .iter()
        .filter(|c| c.direction != Direction::Inconclusive)
        .collect();
    let horizon = walked
        .iter()
        .map(|c| *c.taus.last().expect("ladders are non-empty"))
        .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.min(t))));

    let mut events: Vec<(f64, Direction)> = walked
        .iter()
        .flat_map(|c| c.taus.iter().map(move |&t| (t, c.direction)))
        .filter(|&(t, _)| horizon.is_some_and(|h| t <= h))
        .collect();
    // Simultaneous events: count destabilizing ones first.
    events.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then((a.1 == Direction::Stabilizing).cmp(&(b.1 == Direction::Stabilizing)))
    });

    let mut windows = Vec::new();
    let mut unstable_pairs: i64 = 0;
    let mut open = Some(0.0);
    let mut margin = None;
    for (tau, dir) in events {
        let before = unstable_pairs;
        unstable_pairs += if dir == Direction::Destabilizing { 1 } else { -1 };
        if unstable_pairs < 0 {
            return Err(Error::InconsistentWalk { tau });
        }
        if before == 0 && unstable_pairs > 0 {
            margin.get_or_insert(tau);
            if let Some(lo) = open.take() {
                windows.push(StableWindow { lo, hi: Some(tau) });
            }
        } else if before > 0 && unstable_pairs == 0 {
            open = Some(tau);
        }
    }
    if let Some(lo) = open {
        windows.push(StableWindow { lo, hi: None });
    }

    let delay_margin = crossings
        .iter()
        .filter(|c| c.direction == Direction::Destabilizing)
        .map(|c| c.tau0())
        .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.min(t))))
        .map_or(DelayMargin::Unbounded, DelayMargin::Finite);
    debug_assert!(margin.is_none() || margin == delay_margin.finite());

    Ok(StabilityReport {
        crossings,
        delay_margin,
        windows,
        walk_horizon: horizon,
    })
}
