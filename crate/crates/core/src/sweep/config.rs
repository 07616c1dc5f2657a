use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::RetardedSystem;

/// Grid and tolerance settings of the Rekasius-parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub t_step: f64,
    /// Bracket width at which the count bisection stops.
    pub refine_tol: f64,
    /// Largest |Re(s)| still accepted as an imaginary-axis eigenvalue.
    pub eps_imag: f64,
    /// Ladder depth: delays tau_0..=tau_k_max are reported per crossing.
    pub k_max: usize,
    pub workers: usize,
}

pub const DEFAULT_T_BOUND: f64 = 1000.0;
pub const DEFAULT_T_STEP: f64 = 1e-3;
pub const DEFAULT_K_MAX: usize = 10;

impl SweepConfig {
    /// Defaults scaled to `sys`: `T` in `[-1000, 1000]` step `1e-3`,
    /// `eps_imag = 1e-6 (1 + ‖A0‖ + ‖A1‖)`, `refine_tol = 1e-9 (t_max - t_min)`.
    pub fn for_system(sys: &RetardedSystem) -> Self {
        Self {
            t_min: -DEFAULT_T_BOUND,
            t_max: DEFAULT_T_BOUND,
            t_step: DEFAULT_T_STEP,
            refine_tol: 1e-9 * 2.0 * DEFAULT_T_BOUND,
            eps_imag: 1e-6 * sys.scale(),
            k_max: DEFAULT_K_MAX,
            workers: 1,
        }
        .widened_for(sys)
    }

    /// Smallest |T| bound at which the `T` terms of the companion matrix are
    /// negligible: `10 max(‖A0 + A1‖, 1 / ‖A0 - A1‖)`.
    pub fn t_bound(sys: &RetardedSystem) -> f64 {
        let sum = sys.delay_free_matrix().norm();
        let diff = (sys.a0() - sys.a1()).norm();
        let inv_diff = if diff > f64::EPSILON * sys.scale() {
            1.0 / diff
        } else {
            0.0
        };
        10.0 * sum.max(inv_diff)
    }

    /// Extends `[t_min, t_max]` symmetrically to cover [`Self::t_bound`].
    pub fn widened_for(mut self, sys: &RetardedSystem) -> Self {
        let bound = Self::t_bound(sys);
        if self.t_max < bound {
            self.t_max = bound;
        }
        if self.t_min > -bound {
            self.t_min = -bound;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.t_min, self.t_max, self.t_step, self.refine_tol, self.eps_imag]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidConfig("non-finite sweep parameter".into()));
        }
        if self.t_min >= self.t_max {
            return Err(Error::InvalidConfig(format!(
                "empty T range [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        if !(self.t_min < 0.0 && self.t_max > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "T range [{}, {}] must straddle zero",
                self.t_min, self.t_max
            )));
        }
        if self.t_step <= 0.0 || self.refine_tol <= 0.0 || self.eps_imag <= 0.0 {
            return Err(Error::InvalidConfig(
                "t_step, refine_tol and eps_imag must be positive".into(),
            ));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{literature_example, scalar_example};

    #[test]
    fn defaults_for_literature_example_keep_the_unit_grid() {
        let cfg = SweepConfig::for_system(&literature_example());
        assert_eq!((cfg.t_min, cfg.t_max, cfg.t_step), (-1000.0, 1000.0, 1e-3));
        assert!((cfg.refine_tol - 2e-6).abs() < 1e-18);
        cfg.validate().unwrap();
    }

    #[test]
    fn widening_for_large_matrices() {
        let sys = RetardedSystem::from_rows(1, &[-500.0], &[-200.0]).unwrap();
        let cfg = SweepConfig::for_system(&sys);
        assert_eq!(cfg.t_max, 7000.0);
        assert_eq!(cfg.t_min, -7000.0);
        // A0 - A1 tiny: 1/‖A0 - A1‖ dominates.
        let sys = RetardedSystem::from_rows(1, &[-1.0], &[-1.0 + 1e-5]).unwrap();
        assert!((SweepConfig::t_bound(&sys) - 1e6).abs() < 1.0);
        let _ = scalar_example();
    }

    #[test]
    fn rejects_degenerate_ranges() {
        let mut cfg = SweepConfig::for_system(&scalar_example());
        cfg.t_min = 5.0;
        cfg.t_max = 5.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SweepConfig::for_system(&scalar_example());
        cfg.t_min = 0.5;
        assert!(cfg.validate().is_err());
        let mut cfg = SweepConfig::for_system(&scalar_example());
        cfg.workers = 0;
        assert!(cfg.validate().is_err());
    }
}
