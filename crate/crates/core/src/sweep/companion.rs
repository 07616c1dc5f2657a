//! The `2n x 2n` companion matrix of the Rekasius-substituted characteristic
//! equation
//!
//! ```text
//! det(T s² I + (I - T A0 + T A1) s - (A0 + A1)) = 0,
//! ```
//!
//! which is `det(sI - C(T)) = 0` with
//!
//! ```text
//! C(T) = [ 0              I                    ]
//!        [ (A0 + A1) / T  -(I / T - A0 + A1)   ]
//! ```

use nalgebra::DMatrix;

use crate::eigen;
use crate::error::{Error, Result};
use crate::system::{RetardedSystem, SpectrumSummary};

pub fn build_companion(sys: &RetardedSystem, t: f64) -> Result<DMatrix<f64>> {
    CompanionBuilder::new(sys).build(t)
}

/// Eigenvalues of `C(T)`. `rhp_count` counts strictly positive real parts.
pub fn spectrum_at(sys: &RetardedSystem, t: f64) -> Result<SpectrumSummary> {
    CompanionBuilder::new(sys).spectrum(t)
}

/// Caches `A0 + A1` and `A0 - A1` for repeated evaluation along a grid.
#[derive(Debug, Clone)]
pub struct CompanionBuilder {
    n: usize,
    sum: DMatrix<f64>,
    diff: DMatrix<f64>,
}

impl CompanionBuilder {
    pub fn new(sys: &RetardedSystem) -> Self {
        Self {
            n: sys.dim(),
            sum: sys.a0() + sys.a1(),
            diff: sys.a0() - sys.a1(),
        }
    }

    pub fn build(&self, t: f64) -> Result<DMatrix<f64>> {
        if t == 0.0 || !t.is_finite() {
            return Err(Error::ZeroRekasiusParameter);
        }
        let n = self.n;
        let inv_t = 1.0 / t;
        let mut c = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            c[(i, n + i)] = 1.0;
            for j in 0..n {
                c[(n + i, j)] = inv_t * self.sum[(i, j)];
                c[(n + i, n + j)] = self.diff[(i, j)];
            }
            c[(n + i, n + i)] -= inv_t;
        }
        Ok(c)
    }

    pub fn spectrum(&self, t: f64) -> Result<SpectrumSummary> {
        let c = self.build(t)?;
        let eigs = eigen::eigenvalues(&c).map_err(|e| match e {
            Error::EigenNoConvergence { context } => Error::EigenNoConvergence {
                context: format!("{context} at T={t}"),
            },
            e => e,
        })?;
        Ok(SpectrumSummary::from_eigenvalues(eigs, 0.0))
    }
}
