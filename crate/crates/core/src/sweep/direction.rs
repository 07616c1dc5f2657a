use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::companion::CompanionBuilder;
use super::config::SweepConfig;
use crate::error::Result;
use crate::system::RetardedSystem;

/// Effect of a crossing on stability. The label holds for every delay in the
/// crossing's ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// The pole pair moves into the right half plane as the delay grows.
    Destabilizing,
    /// The pole pair moves back into the left half plane.
    Stabilizing,
    /// The tracked eigenvalue touches the axis without changing side, or its
    /// real part is lost in rounding on both sides. Needs manual review.
    Inconclusive,
}

/// Reads the side of the tracked eigenvalue at `t_c - delta` and
/// `t_c + delta` with `delta = 10 refine_tol`, widening `delta` tenfold up
/// to twice when the real parts are too small to sign. Negative to positive
/// as `T` increases is destabilizing.
pub fn classify_direction(
    sys: &RetardedSystem,
    t_c: f64,
    omega_c: f64,
    cfg: &SweepConfig,
) -> Result<Direction> {
    let builder = CompanionBuilder::new(sys);
    let target = Complex64::new(0.0, omega_c);
    let mut delta = 10.0 * cfg.refine_tol;
    for _ in 0..3 {
        let d = delta.min(0.5 * t_c.abs());
        let left = builder.spectrum(t_c - d)?;
        let right = builder.spectrum(t_c + d)?;
        let (zl, zr) = (
            left.nearest(target).expect("non-empty spectrum"),
            right.nearest(target).expect("non-empty spectrum"),
        );
        let noise = 64.0 * f64::EPSILON * (1.0 + omega_c + 1.0 / t_c.abs() + sys.scale());
        let sign = |v: f64| {
            if v > noise {
                1
            } else if v < -noise {
                -1
            } else {
                0
            }
        };
        match (sign(zl.re), sign(zr.re)) {
            (-1, 1) => return Ok(Direction::Destabilizing),
            (1, -1) => return Ok(Direction::Stabilizing),
            (l, r) if l == r && l != 0 => return Ok(Direction::Inconclusive),
            _ => delta *= 10.0,
        }
    }
    Ok(Direction::Inconclusive)
}
