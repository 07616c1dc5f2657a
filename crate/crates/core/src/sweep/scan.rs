//! Coarse evaluation of the companion spectrum on the `T` grid.
//!
//! Grid points are `t_min + i * t_step`, computed from the index so that any
//! partition of the grid evaluates exactly the same `T` values. The point at
//! `T = 0` is skipped and no interval straddling zero is reported.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::companion::CompanionBuilder;
use super::config::SweepConfig;
use crate::error::{Error, Result};
use crate::system::{RetardedSystem, SpectrumSummary};

/// An eigenvalue counts as near the imaginary axis when `|Re| <= eps_imag`
/// and `|Re| <= NEAR_AXIS_SLOPE * Im`. The slope condition keeps the
/// eigenvalues that collapse onto `s = 0` as `|T|` grows from qualifying.
pub const NEAR_AXIS_SLOPE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CandidateKind {
    /// The right-half-plane count differs between the bracket ends.
    CountChange { rhp_lo: usize, rhp_hi: usize },
    /// An eigenvalue touched the axis at a grid point without changing the
    /// count at either neighbouring interval.
    Tangential,
}

/// A `T` interval that contains at least one imaginary-axis crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingCandidate {
    pub t_lo: f64,
    pub t_hi: f64,
    #[serde(flatten)]
    pub kind: CandidateKind,
}

#[derive(Debug, Clone, Copy)]
struct GridPoint {
    rhp: usize,
    near_axis: bool,
}

pub(crate) fn has_near_axis_eigenvalue(s: &SpectrumSummary, eps_imag: f64) -> bool {
    s.eigenvalues
        .iter()
        .any(|z| z.im > 0.0 && z.re.abs() <= eps_imag && z.re.abs() <= NEAR_AXIS_SLOPE * z.im)
}

#[derive(Debug, Clone, Copy)]
struct Grid {
    t_min: f64,
    t_step: f64,
    len: usize,
    zero_guard: f64,
}

impl Grid {
    fn new(cfg: &SweepConfig) -> Result<Self> {
        cfg.validate()?;
        let steps = ((cfg.t_max - cfg.t_min) / cfg.t_step + 1e-9).floor();
        if steps < 1.0 {
            return Err(Error::InvalidConfig("T grid has fewer than two points".into()));
        }
        if steps > 1e10 {
            return Err(Error::InvalidConfig(format!("T grid too large ({steps} steps)")));
        }
        Ok(Self {
            t_min: cfg.t_min,
            t_step: cfg.t_step,
            len: steps as usize + 1,
            zero_guard: 1e-6 * cfg.t_step,
        })
    }

    fn t(&self, i: usize) -> f64 {
        self.t_min + i as f64 * self.t_step
    }

    fn is_zero(&self, t: f64) -> bool {
        t.abs() < self.zero_guard
    }
}

fn evaluate_range(
    builder: &CompanionBuilder,
    grid: &Grid,
    eps_imag: f64,
    range: std::ops::Range<usize>,
) -> Result<Vec<Option<GridPoint>>> {
    range
        .map(|i| {
            let t = grid.t(i);
            if grid.is_zero(t) {
                return Ok(None);
            }
            let s = builder.spectrum(t)?;
            Ok(Some(GridPoint {
                rhp: s.rhp_count,
                near_axis: has_near_axis_eigenvalue(&s, eps_imag),
            }))
        })
        .collect()
}

fn candidates_from_points(grid: &Grid, points: &[Option<GridPoint>]) -> Vec<CrossingCandidate> {
    // Valid neighbouring pairs (same sign of T).
    let pair_ok = |i: usize| -> Option<(GridPoint, GridPoint)> {
        let (a, b) = (points[i]?, points[i + 1]?);
        (grid.t(i) * grid.t(i + 1) > 0.0).then_some((a, b))
    };
    let changes = |i: usize| pair_ok(i).is_some_and(|(a, b)| a.rhp != b.rhp);

    let len = points.len();
    let mut out = Vec::new();
    for i in 0..len.saturating_sub(1) {
        if changes(i) {
            let (a, b) = pair_ok(i).unwrap();
            out.push(CrossingCandidate {
                t_lo: grid.t(i),
                t_hi: grid.t(i + 1),
                kind: CandidateKind::CountChange {
                    rhp_lo: a.rhp,
                    rhp_hi: b.rhp,
                },
            });
        }
    }

    // Runs of near-axis points. A run touching a count change is the slow
    // approach of that crossing, not a separate touch.
    let near = |k: usize| points[k].is_some_and(|p| p.near_axis);
    let mut i = 0;
    while i < len {
        if !near(i) {
            i += 1;
            continue;
        }
        let start = i;
        let mut end = i;
        while end + 1 < len && pair_ok(end).is_some() && near(end + 1) {
            end += 1;
        }
        i = end + 1;
        let touches = (start.saturating_sub(1)..=end).any(|k| k + 1 < len && changes(k));
        if touches {
            continue;
        }
        let lo = if start > 0 && pair_ok(start - 1).is_some() { start - 1 } else { start };
        let hi = if end + 1 < len && pair_ok(end).is_some() { end + 1 } else { end };
        out.push(CrossingCandidate {
            t_lo: grid.t(lo),
            t_hi: grid.t(hi),
            kind: CandidateKind::Tangential,
        });
    }
    out.sort_by(|p, q| p.t_lo.total_cmp(&q.t_lo));
    out
}

/// Serial scan of the whole grid.
pub fn coarse_scan(sys: &RetardedSystem, cfg: &SweepConfig) -> Result<Vec<CrossingCandidate>> {
    let grid = Grid::new(cfg)?;
    let builder = CompanionBuilder::new(sys);
    let points = evaluate_range(&builder, &grid, cfg.eps_imag, 0..grid.len)?;
    Ok(candidates_from_points(&grid, &points))
}

/// Same result as [`coarse_scan`], with the grid split into `cfg.workers`
/// contiguous chunks evaluated concurrently and merged in grid order.
pub fn parallel_scan(sys: &RetardedSystem, cfg: &SweepConfig) -> Result<Vec<CrossingCandidate>> {
    let grid = Grid::new(cfg)?;
    if cfg.workers == 1 {
        return coarse_scan(sys, cfg);
    }
    let builder = CompanionBuilder::new(sys);
    let chunk = grid.len.div_ceil(cfg.workers);
    let ranges: Vec<_> = (0..grid.len)
        .step_by(chunk)
        .map(|start| start..(start + chunk).min(grid.len))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    let chunks: Vec<Vec<Option<GridPoint>>> = pool.install(|| {
        ranges
            .par_iter()
            .map(|r| {
                evaluate_range(&builder, &grid, cfg.eps_imag, r.clone()).map_err(|e| {
                    Error::ChunkFailed {
                        t_lo: grid.t(r.start),
                        t_hi: grid.t(r.end - 1),
                        source: Box::new(e),
                    }
                })
            })
            .collect::<Result<_>>()
    })?;
    let points: Vec<_> = chunks.into_iter().flatten().collect();
    Ok(candidates_from_points(&grid, &points))
}
