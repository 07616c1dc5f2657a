//! Fine search inside a coarse candidate bracket.
//!
//! The bracket is re-sampled on a fine grid; every sub-interval whose
//! right-half-plane count changes is bisected down to `refine_tol`, which
//! separates pairs crossing in the same coarse cell. Each narrow leaf is then
//! polished by regula falsi (Illinois variant) on the real part of the
//! crossing eigenvalue, tracked by nearest-neighbour matching.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::companion::CompanionBuilder;
use super::config::SweepConfig;
use super::scan::{CandidateKind, CrossingCandidate, NEAR_AXIS_SLOPE};
use crate::error::{Error, Result};
use crate::system::{RetardedSystem, SpectrumSummary};

const FINE_SUBDIVISIONS: usize = 16;
const MAX_POLISH_ITERATIONS: usize = 100;
const GOLDEN_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinedPoint {
    pub t_c: f64,
    pub omega_c: f64,
}

/// All crossings inside `candidate`, ordered by `T` and then by ascending
/// `omega` for pairs that share a bracket.
pub fn refine_crossing(
    sys: &RetardedSystem,
    candidate: &CrossingCandidate,
    cfg: &SweepConfig,
) -> Result<Vec<RefinedPoint>> {
    let builder = CompanionBuilder::new(sys);
    let (a, b) = (candidate.t_lo, candidate.t_hi);

    let fine: Vec<(f64, SpectrumSummary)> = (0..=FINE_SUBDIVISIONS)
        .map(|k| {
            let t = if k == FINE_SUBDIVISIONS {
                b
            } else {
                a + (b - a) * k as f64 / FINE_SUBDIVISIONS as f64
            };
            builder.spectrum(t).map(|s| (t, s))
        })
        .collect::<Result<_>>()?;

    let mut leaves = Vec::new();
    for w in fine.windows(2) {
        let ((lo, slo), (hi, shi)) = (&w[0], &w[1]);
        if slo.rhp_count != shi.rhp_count {
            split_bracket(&builder, *lo, slo.rhp_count, *hi, shi.rhp_count, cfg.refine_tol, &mut leaves)?;
        }
    }

    if leaves.is_empty() {
        if let CandidateKind::CountChange { .. } = candidate.kind {
            return Err(bracket_lost(&builder, a, b));
        }
        return tangential_minimum(&builder, &fine, cfg).map(|p| p.into_iter().collect());
    }

    let mut out = Vec::new();
    for (lo, hi) in leaves {
        let mut points = polish_leaf(&builder, lo, hi, cfg)?;
        points.sort_by(|p, q| p.omega_c.total_cmp(&q.omega_c));
        out.extend(points);
    }
    Ok(out)
}

fn bracket_lost(builder: &CompanionBuilder, lo: f64, hi: f64) -> Error {
    let spectrum = |t| builder.spectrum(t).map(|s| s.eigenvalues).unwrap_or_default();
    Error::BracketLost {
        t_lo: lo,
        t_hi: hi,
        spectrum_lo: spectrum(lo),
        spectrum_hi: spectrum(hi),
    }
}

/// Bisects on the count until every changing sub-interval is narrower than
/// `tol`. Leaves are pushed left to right.
fn split_bracket(
    builder: &CompanionBuilder,
    lo: f64,
    c_lo: usize,
    hi: f64,
    c_hi: usize,
    tol: f64,
    leaves: &mut Vec<(f64, f64)>,
) -> Result<()> {
    if c_lo == c_hi {
        return Ok(());
    }
    let mid = 0.5 * (lo + hi);
    if hi - lo <= tol || mid <= lo || mid >= hi {
        leaves.push((lo, hi));
        return Ok(());
    }
    let c_mid = builder.spectrum(mid)?.rhp_count;
    split_bracket(builder, lo, c_lo, mid, c_mid, tol, leaves)?;
    split_bracket(builder, mid, c_mid, hi, c_hi, tol, leaves)
}

fn tracked(builder: &CompanionBuilder, t: f64, guess: Complex64) -> Result<Complex64> {
    let s = builder.spectrum(t)?;
    Ok(s.nearest(guess).expect("non-empty spectrum"))
}

fn polish_leaf(
    builder: &CompanionBuilder,
    lo: f64,
    hi: f64,
    cfg: &SweepConfig,
) -> Result<Vec<RefinedPoint>> {
    let s_lo = builder.spectrum(lo)?;
    let s_hi = builder.spectrum(hi)?;
    let mut out: Vec<RefinedPoint> = Vec::new();
    for &z_lo in s_lo.eigenvalues.iter().filter(|z| z.im > 0.0) {
        let z_hi = s_hi.nearest(z_lo).expect("non-empty spectrum");
        if (z_lo.re > 0.0) == (z_hi.re > 0.0) {
            continue;
        }
        let (t_c, z) = regula_falsi(builder, lo, z_lo, hi, z_hi)?;
        if z.re.abs() > cfg.eps_imag || z.im <= 0.0 {
            return Err(bracket_lost(builder, lo, hi));
        }
        let duplicate = out
            .iter()
            .any(|p| (p.omega_c - z.im).abs() <= 1e-9 * (1.0 + z.im));
        if !duplicate {
            out.push(RefinedPoint { t_c, omega_c: z.im });
        }
    }
    if out.is_empty() {
        return Err(bracket_lost(builder, lo, hi));
    }
    Ok(out)
}

/// Root of `Re(s(T))` for the eigenvalue branch through `z_lo`/`z_hi`.
fn regula_falsi(
    builder: &CompanionBuilder,
    mut lo: f64,
    mut z_lo: Complex64,
    mut hi: f64,
    mut z_hi: Complex64,
) -> Result<(f64, Complex64)> {
    let (mut f_lo, mut f_hi) = (z_lo.re, z_hi.re);
    let mut side = 0i8;
    let mut best = if f_lo.abs() < f_hi.abs() { (lo, z_lo) } else { (hi, z_hi) };
    for _ in 0..MAX_POLISH_ITERATIONS {
        let mut t = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(t > lo && t < hi) {
            t = 0.5 * (lo + hi);
        }
        if t <= lo || t >= hi {
            break;
        }
        let w = (t - lo) / (hi - lo);
        let guess = z_lo + (z_hi - z_lo) * w;
        let z = tracked(builder, t, guess)?;
        if z.re.abs() < best.1.re.abs() {
            best = (t, z);
        }
        if z.re == 0.0 {
            break;
        }
        if (z.re > 0.0) == (f_lo > 0.0) {
            lo = t;
            z_lo = z;
            f_lo = z.re;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = t;
            z_hi = z;
            f_hi = z.re;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
        let floor = 4.0 * f64::EPSILON * (1.0 + z.norm());
        if z.re.abs() <= floor || hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
            break;
        }
    }
    Ok(best)
}

/// Golden-section minimisation of the distance to the axis around the best
/// fine-grid sample of a tangential candidate.
fn tangential_minimum(
    builder: &CompanionBuilder,
    fine: &[(f64, SpectrumSummary)],
    cfg: &SweepConfig,
) -> Result<Option<RefinedPoint>> {
    let distance = |s: &SpectrumSummary| -> (f64, Option<Complex64>) {
        s.eigenvalues
            .iter()
            .filter(|z| z.im > 0.0 && z.re.abs() <= NEAR_AXIS_SLOPE * z.im)
            .map(|z| (z.re.abs(), Some(*z)))
            .fold((f64::INFINITY, None), |a, b| if b.0 < a.0 { b } else { a })
    };
    let (k_best, _) = fine
        .iter()
        .enumerate()
        .map(|(k, (_, s))| (k, distance(s).0))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    // A minimum on the outer edge means the dip continues past the bracket.
    if k_best == 0 || k_best == fine.len() - 1 {
        return Ok(None);
    }
    let (mut best_t, mut best) = (fine[k_best].0, distance(&fine[k_best].1));

    let mut lo = fine[k_best.saturating_sub(1)].0;
    let mut hi = fine[(k_best + 1).min(fine.len() - 1)].0;
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = distance(&builder.spectrum(x1)?);
    let mut f2 = distance(&builder.spectrum(x2)?);
    for _ in 0..GOLDEN_ITERATIONS {
        for (x, f) in [(x1, f1), (x2, f2)] {
            if f.0 < best.0 {
                best_t = x;
                best = f;
            }
        }
        if hi - lo <= cfg.refine_tol {
            break;
        }
        if f1.0 <= f2.0 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = distance(&builder.spectrum(x1)?);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = distance(&builder.spectrum(x2)?);
        }
    }
    Ok(match best {
        (d, Some(z)) if d <= cfg.eps_imag => Some(RefinedPoint {
            t_c: best_t,
            omega_c: z.im,
        }),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{literature_example, scalar_example};

    fn candidate(lo: f64, hi: f64) -> CrossingCandidate {
        CrossingCandidate {
            t_lo: lo,
            t_hi: hi,
            kind: CandidateKind::CountChange { rhp_lo: 0, rhp_hi: 2 },
        }
    }

    #[test]
    fn scalar_crossing() {
        let sys = scalar_example();
        let cfg = SweepConfig::for_system(&sys);
        let p = refine_crossing(&sys, &candidate(0.95, 1.05), &cfg).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0].t_c - 1.0).abs() < 1e-10, "{p:?}");
        assert!((p[0].omega_c - 3f64.sqrt()).abs() < 1e-10, "{p:?}");
    }

    #[test]
    fn literature_crossings() {
        let sys = literature_example();
        let cfg = SweepConfig::for_system(&sys);
        let p = refine_crossing(&sys, &candidate(0.082, 0.083), &cfg).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0].t_c - 0.0829).abs() < 1e-3);
        assert!((p[0].omega_c - 3.0347).abs() < 1e-3);

        let p = refine_crossing(&sys, &candidate(-0.427, -0.426), &cfg).unwrap();
        assert!((p[0].t_c + 0.4269).abs() < 1e-3);
        assert!((p[0].omega_c - 15.5032).abs() < 1e-3);
    }

    #[test]
    fn two_crossings_in_one_bracket_are_split() {
        // Both literature crossings near T = 0.09 share one wide bracket; the
        // counts at its ends agree, so scan it as a tangential candidate.
        let sys = literature_example();
        let cfg = SweepConfig::for_system(&sys);
        let wide = CrossingCandidate {
            t_lo: 0.07,
            t_hi: 0.11,
            kind: CandidateKind::Tangential,
        };
        let p = refine_crossing(&sys, &wide, &cfg).unwrap();
        assert_eq!(p.len(), 2, "{p:?}");
        assert!((p[0].omega_c - 3.0352).abs() < 1e-3);
        assert!((p[1].omega_c - 2.9124).abs() < 1e-3);
    }

    #[test]
    fn lost_bracket_is_reported_with_spectra() {
        let sys = scalar_example();
        let cfg = SweepConfig::for_system(&sys);
        match refine_crossing(&sys, &candidate(2.0, 3.0), &cfg) {
            Err(Error::BracketLost { spectrum_lo, spectrum_hi, .. }) => {
                assert_eq!(spectrum_lo.len(), 2);
                assert_eq!(spectrum_hi.len(), 2);
            }
            r => panic!("unexpected {r:?}"),
        }
    }
}
