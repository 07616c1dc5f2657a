//! The retarded system `x'(t) = A0 x(t) + A1 x(t - tau)` and delay-free checks.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Error, Result};
use crate::matrix_io;

/// All eigenvalues of `A0 + A1` must have real part below `-STABILITY_MARGIN`
/// for the delay-free system to count as stable.
pub const STABILITY_MARGIN: f64 = 1e-9;

/// Relative threshold of the singularity test on `det(A0 + A1)`.
pub const ZERO_ROOT_TOLERANCE: f64 = 1e-10;

/// A pair of real `n x n` state matrices: undelayed `A0` and delayed `A1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RetardedSystem {
    a0: DMatrix<f64>,
    a1: DMatrix<f64>,
}

impl RetardedSystem {
    pub fn new(a0: DMatrix<f64>, a1: DMatrix<f64>) -> Result<Self> {
        for m in [&a0, &a1] {
            if !m.is_square() {
                return Err(Error::NotSquare {
                    rows: m.nrows(),
                    cols: m.ncols(),
                });
            }
        }
        if a0.nrows() != a1.nrows() {
            return Err(Error::DimensionMismatch {
                a0: a0.nrows(),
                a1: a1.nrows(),
            });
        }
        if a0.nrows() == 0 {
            return Err(Error::Empty);
        }
        for m in [&a0, &a1] {
            if let Some(k) = m.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    row: k % m.nrows() + 1,
                    column: k / m.nrows() + 1,
                });
            }
        }
        Ok(Self { a0, a1 })
    }

    /// Builds a system from row-major entry slices of length `n * n`.
    pub fn from_rows(n: usize, a0: &[f64], a1: &[f64]) -> Result<Self> {
        if a0.len() != n * n || a1.len() != n * n {
            return Err(Error::InvalidConfig(format!(
                "expected {} entries per matrix, got {} and {}",
                n * n,
                a0.len(),
                a1.len()
            )));
        }
        Self::new(
            DMatrix::from_row_slice(n, n, a0),
            DMatrix::from_row_slice(n, n, a1),
        )
    }

    /// Reads `A0` and `A1` from text files (plain rows or Matrix Market).
    pub fn load(path_a0: impl AsRef<Path>, path_a1: impl AsRef<Path>) -> Result<Self> {
        let a0 = matrix_io::read_matrix(path_a0)?;
        let a1 = matrix_io::read_matrix(path_a1)?;
        Self::new(a0, a1)
    }

    pub fn dim(&self) -> usize {
        self.a0.nrows()
    }

    pub fn a0(&self) -> &DMatrix<f64> {
        &self.a0
    }

    pub fn a1(&self) -> &DMatrix<f64> {
        &self.a1
    }

    /// `A0 + A1`, the closed-loop matrix at zero delay.
    pub fn delay_free_matrix(&self) -> DMatrix<f64> {
        &self.a0 + &self.a1
    }

    /// `1 + ‖A0‖_F + ‖A1‖_F`, the magnitude used to scale tolerances.
    pub fn scale(&self) -> f64 {
        1.0 + self.a0.norm() + self.a1.norm()
    }

    pub fn delay_free_spectrum(&self) -> Result<SpectrumSummary> {
        let eigs = eigen::eigenvalues(&self.delay_free_matrix())?;
        Ok(SpectrumSummary::from_eigenvalues(eigs, -STABILITY_MARGIN))
    }

    /// True when `det(A0 + A1)` is numerically zero, i.e. `s = 0` is a root
    /// of the characteristic equation for every delay.
    pub fn check_zero_root(&self) -> bool {
        let sum = self.delay_free_matrix();
        let norm = sum.norm();
        let det = sum.clone().lu().determinant();
        det.abs() <= ZERO_ROOT_TOLERANCE * norm.powi(self.dim() as i32)
    }
}

/// Eigenvalues of some matrix together with the counts the sweeps need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub eigenvalues: Vec<Complex64>,
    /// Eigenvalues with real part strictly above the threshold used to build
    /// the summary.
    pub rhp_count: usize,
    pub min_abs_real: f64,
}

impl SpectrumSummary {
    pub fn from_eigenvalues(eigenvalues: Vec<Complex64>, threshold: f64) -> Self {
        let rhp_count = eigenvalues.iter().filter(|z| z.re > threshold).count();
        let min_abs_real = eigenvalues
            .iter()
            .map(|z| z.re.abs())
            .fold(f64::INFINITY, f64::min);
        Self {
            eigenvalues,
            rhp_count,
            min_abs_real,
        }
    }

    pub fn max_real(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The eigenvalue nearest to `target` in the complex plane.
    pub fn nearest(&self, target: Complex64) -> Option<Complex64> {
        self.eigenvalues
            .iter()
            .copied()
            .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{literature_example, random_matrix};
    use proptest::prelude::*;

    #[test]
    fn literature_example_entries() {
        let sys = literature_example();
        assert_eq!(sys.dim(), 3);
        assert_eq!(sys.a0()[(0, 1)], 13.5);
        assert_eq!(sys.a1()[(0, 2)], -70.3);
    }

    #[test]
    fn rejects_bad_shapes() {
        let r = RetardedSystem::new(DMatrix::zeros(2, 2), DMatrix::zeros(3, 3));
        assert!(matches!(r, Err(Error::DimensionMismatch { a0: 2, a1: 3 })));
        let r = RetardedSystem::new(DMatrix::zeros(2, 3), DMatrix::zeros(2, 3));
        assert!(matches!(r, Err(Error::NotSquare { rows: 2, cols: 3 })));
        let r = RetardedSystem::from_rows(1, &[f64::NAN], &[0.0]);
        assert!(matches!(r, Err(Error::NonFinite { row: 1, column: 1 })));
    }

    #[test]
    fn scalar_delay_free_spectrum() {
        let s = RetardedSystem::from_rows(1, &[-1.0], &[-2.0]).unwrap();
        let spectrum = s.delay_free_spectrum().unwrap();
        assert_eq!(spectrum.eigenvalues, vec![Complex64::new(-3.0, 0.0)]);
        assert_eq!(spectrum.rhp_count, 0);

        let s = RetardedSystem::from_rows(1, &[1.0], &[0.0]).unwrap();
        assert_eq!(s.delay_free_spectrum().unwrap().rhp_count, 1);
    }

    #[test]
    fn literature_example_is_delay_free_stable() {
        // eig(A0 + A1) = {-2.9, -2 ± 2j}
        let spectrum = literature_example().delay_free_spectrum().unwrap();
        assert_eq!(spectrum.rhp_count, 0);
        assert!((spectrum.max_real() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_root_detection() {
        let s = RetardedSystem::from_rows(1, &[-1.0], &[1.0]).unwrap();
        assert!(s.check_zero_root());
        let s = RetardedSystem::from_rows(1, &[-1.0], &[-2.0]).unwrap();
        assert!(!s.check_zero_root());
        // det(A0 + A1) = -23.2 for the literature example.
        assert!(!literature_example().check_zero_root());
    }

    proptest! {
        #[test]
        fn zero_delay_matrix_gives_spectrum_of_a0(seed in any::<u64>(), n in 1usize..6) {
            let a0 = random_matrix(n, seed);
            let sys = RetardedSystem::new(a0.clone(), DMatrix::zeros(n, n)).unwrap();
            let mut got = sys.delay_free_spectrum().unwrap().eigenvalues;
            let mut want = eigen::eigenvalues(&a0).unwrap();
            let key = |z: &Complex64| (z.re, z.im);
            got.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            want.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            for (g, w) in got.iter().zip(&want) {
                prop_assert!((g - w).norm() < 1e-12);
            }
        }

        #[test]
        fn delay_free_spectrum_is_conjugate_symmetric(seed in any::<u64>(), n in 1usize..7) {
            let sys = RetardedSystem::new(random_matrix(n, seed), random_matrix(n, seed ^ 0xabc)).unwrap();
            let eigs = sys.delay_free_spectrum().unwrap().eigenvalues;
            prop_assert_eq!(eigs.len(), n);
            for z in &eigs {
                let partner = eigs.iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(partner < 1e-9 * (1.0 + z.norm()));
            }
        }
    }
}
