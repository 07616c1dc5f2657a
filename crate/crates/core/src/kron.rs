//! Kronecker-product baseline.
//!
//! Every crossing frequency `omega` of the delay system is a purely imaginary
//! root of `det(lambda(s)) = 0` with
//!
//! ```text
//! lambda(s) = s² I + s (I ⊗ A0 - A0 ⊗ I) + (A1 ⊗ A1 - A0 ⊗ A0),
//! ```
//!
//! found as eigenvalues of one dense `2n² x 2n²` companion matrix, independent
//! of any delay or `T` grid. The delay belonging to each frequency comes from
//! the unit-modulus generalized eigenvalue `z = e^{-j omega tau}` of the pencil
//! `(A0 - j omega I, -A1)`. Memory grows as `n⁴`, so this path is meant as an
//! oracle for small systems.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Error, Result};
use crate::system::RetardedSystem;

/// Default cap on the dense companion matrix: 2 GB.
pub const DEFAULT_MEMORY_CAP: u64 = 2_000_000_000;

/// `||z| - 1|` accepted for the delay-recovery eigenvalue.
pub const UNIT_CIRCLE_TOLERANCE: f64 = 1e-6;

/// Standard Kronecker product: block `(i, j)` of the result is `a[(i, j)] * b`.
pub fn kron_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (p, q) = a.shape();
    let (r, c) = b.shape();
    let mut out = DMatrix::zeros(p * r, q * c);
    for i in 0..p {
        for j in 0..q {
            let aij = a[(i, j)];
            if aij == 0.0 {
                continue;
            }
            for k in 0..r {
                for l in 0..c {
                    out[(i * r + k, j * c + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Stacks the columns of `m` into one vector, so that
/// `vec(P1 P2 P3) = (P3ᵀ ⊗ P1) vec(P2)`.
pub fn vectorize(m: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(m.len(), 1, m.as_slice())
}

/// Bytes needed to store the dense `2n² x 2n²` companion matrix.
pub fn estimate_memory(n: u64, bytes_per_element: u64) -> u64 {
    let side = 2 * n * n;
    side.saturating_mul(side).saturating_mul(bytes_per_element)
}

/// Coefficients of `lambda(s) = g0 s² + g1 s + g2`, each `n² x n²`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    pub g0: DMatrix<f64>,
    pub g1: DMatrix<f64>,
    pub g2: DMatrix<f64>,
}

impl MatrixPolynomial {
    pub fn dim(&self) -> usize {
        self.g0.nrows()
    }

    pub fn evaluate(&self, s: Complex64) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            s * s * self.g0[(i, j)] + s * self.g1[(i, j)] + self.g2[(i, j)]
        })
    }

    /// `[[0, I], [-g2, -g1]]`; valid because `g0` is the identity.
    pub fn companion(&self) -> DMatrix<f64> {
        let m = self.dim();
        let mut c = DMatrix::zeros(2 * m, 2 * m);
        c.view_mut((0, m), (m, m)).fill_with_identity();
        c.view_mut((m, 0), (m, m)).copy_from(&(-&self.g2));
        c.view_mut((m, m), (m, m)).copy_from(&(-&self.g1));
        c
    }
}

/// Options for the baseline path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KronOptions {
    pub eps_imag: f64,
    pub memory_cap: u64,
}

impl KronOptions {
    pub fn for_system(sys: &RetardedSystem) -> Self {
        Self {
            eps_imag: 1e-6 * sys.scale(),
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }
}

fn guard(n: usize, cap: u64) -> Result<()> {
    let required = estimate_memory(n as u64, std::mem::size_of::<f64>() as u64);
    if required > cap {
        return Err(Error::ResourceGuard { required, cap });
    }
    Ok(())
}

pub fn build_lambda(sys: &RetardedSystem) -> Result<MatrixPolynomial> {
    build_lambda_capped(sys, DEFAULT_MEMORY_CAP)
}

pub fn build_lambda_capped(sys: &RetardedSystem, memory_cap: u64) -> Result<MatrixPolynomial> {
    let n = sys.dim();
    guard(n, memory_cap)?;
    let id = DMatrix::<f64>::identity(n, n);
    let (a0, a1) = (sys.a0(), sys.a1());
    Ok(MatrixPolynomial {
        g0: DMatrix::identity(n * n, n * n),
        g1: kron_product(&id, a0) - kron_product(a0, &id),
        g2: kron_product(a1, a1) - kron_product(a0, a0),
    })
}

/// Distinct positive crossing frequencies, ascending.
pub fn kron_crossings(sys: &RetardedSystem, opts: &KronOptions) -> Result<Vec<f64>> {
    let poly = build_lambda_capped(sys, opts.memory_cap)?;
    let eigs = eigen::eigenvalues(&poly.companion())?;
    let mut omegas: Vec<f64> = eigs
        .iter()
        .filter(|z| z.im > 0.0 && z.re.abs() <= opts.eps_imag)
        .map(|z| z.im)
        .collect();
    omegas.sort_by(f64::total_cmp);
    omegas.dedup_by(|a, b| (*a - *b).abs() <= 1e-8 * (1.0 + b.abs()));
    Ok(omegas)
}

/// One delay family recovered at a crossing frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KronDelay {
    pub omega: f64,
    /// Unit-modulus generalized eigenvalue `e^{-j omega tau_0}`.
    pub z: Complex64,
    /// Smallest positive delay first, then steps of `2 pi / omega`.
    pub taus: Vec<f64>,
}

/// Delay ladders at `omega`, one per unit-modulus generalized eigenvalue of
/// `(A0 - j omega I, -A1)`, sorted by `tau_0`.
pub fn delays_from_crossing(sys: &RetardedSystem, omega: f64, k_max: usize) -> Result<Vec<KronDelay>> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::NonPositiveFrequency(omega));
    }
    let n = sys.dim();
    let a = DMatrix::from_fn(n, n, |i, j| {
        let jw = if i == j { Complex64::new(0.0, omega) } else { Complex64::new(0.0, 0.0) };
        Complex64::new(sys.a0()[(i, j)], 0.0) - jw
    });
    let b = sys.a1().map(|v| Complex64::new(-v, 0.0));
    let period = 2.0 * PI / omega;
    let mut out: Vec<KronDelay> = eigen::generalized_eigenvalues(&a, &b)?
        .into_iter()
        .filter(|z| (z.norm() - 1.0).abs() <= UNIT_CIRCLE_TOLERANCE)
        .map(|z| {
            // e^{-j omega tau} = z  =>  omega tau = -arg z (mod 2 pi)
            let mut tau0 = (-z.arg()).rem_euclid(2.0 * PI) / omega;
            if tau0 == 0.0 {
                tau0 = period;
            }
            KronDelay {
                omega,
                z,
                taus: (0..=k_max).map(|k| tau0 + period * k as f64).collect(),
            }
        })
        .collect();
    if out.is_empty() {
        return Err(Error::SpuriousCrossing { omega });
    }
    out.sort_by(|p, q| p.taus[0].total_cmp(&q.taus[0]));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{literature_example, scalar_example};
    use crate::testing::random_matrix;
    use proptest::prelude::*;

    #[test]
    fn identity_and_scalar_products() {
        let i2 = DMatrix::<f64>::identity(2, 2);
        assert_eq!(kron_product(&i2, &i2), DMatrix::identity(4, 4));
        let b = DMatrix::from_row_slice(2, 3, &[1., 2., 3., 4., 5., 6.]);
        assert_eq!(kron_product(&DMatrix::from_element(1, 1, 2.0), &b), &b * 2.0);
    }

    #[test]
    fn block_layout_matches_nalgebra() {
        let a = DMatrix::from_row_slice(2, 3, &[1., -2., 0., 3., 0.5, 4.]);
        let b = DMatrix::from_row_slice(3, 2, &[7., 1., -1., 2., 0., 3.]);
        assert_eq!(kron_product(&a, &b), a.kronecker(&b));
    }

    #[test]
    fn scalar_lambda() {
        let p = build_lambda(&scalar_example()).unwrap();
        assert_eq!(p.g0, DMatrix::from_element(1, 1, 1.0));
        assert_eq!(p.g1, DMatrix::from_element(1, 1, 0.0));
        assert_eq!(p.g2, DMatrix::from_element(1, 1, 3.0));
    }

    #[test]
    fn zero_delay_matrix_lambda() {
        let a0 = random_matrix(3, 5);
        let sys = RetardedSystem::new(a0.clone(), DMatrix::zeros(3, 3)).unwrap();
        let p = build_lambda(&sys).unwrap();
        assert_eq!(p.g2, -kron_product(&a0, &a0));
    }

    #[test]
    fn scalar_crossing_and_delay() {
        let sys = scalar_example();
        let w = kron_crossings(&sys, &KronOptions::for_system(&sys)).unwrap();
        assert_eq!(w.len(), 1);
        assert!((w[0] - 3f64.sqrt()).abs() < 1e-12);

        let d = delays_from_crossing(&sys, w[0], 2).unwrap();
        assert_eq!(d.len(), 1);
        let z_expected = Complex64::new(-0.5, -0.5 * 3f64.sqrt());
        assert!((d[0].z - z_expected).norm() < 1e-12);
        let tau0 = 2.0 * PI / (3.0 * 3f64.sqrt());
        assert!((d[0].taus[0] - tau0).abs() < 1e-12);
        // The principal-value arctangent would land on 3.023 s instead.
        assert!((d[0].taus[0] - 1.2092).abs() < 1e-4);
    }

    #[test]
    fn literature_frequencies() {
        let sys = literature_example();
        let w = kron_crossings(&sys, &KronOptions::for_system(&sys)).unwrap();
        let table = [0.8407, 2.1109, 2.9123, 3.0347, 15.5032];
        assert_eq!(w.len(), table.len(), "{w:?}");
        for (got, want) in w.iter().zip(table) {
            assert!((got - want).abs() < 1e-3, "{got} vs {want}");
        }
        let d = delays_from_crossing(&sys, w[3], 1).unwrap();
        assert!((d[0].taus[0] - 0.1624).abs() < 1e-3);
    }

    #[test]
    fn no_delay_coupling() {
        let sys = RetardedSystem::from_rows(1, &[-1.0], &[0.0]).unwrap();
        assert!(kron_crossings(&sys, &KronOptions::for_system(&sys)).unwrap().is_empty());
    }

    #[test]
    fn spurious_crossing_without_unit_circle_root() {
        // A1 singular; the only finite z is far from the unit circle.
        let sys = RetardedSystem::from_rows(2, &[-1.0, 0.0, 0.0, -2.0], &[-0.1, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            delays_from_crossing(&sys, 1.0, 0),
            Err(Error::SpuriousCrossing { .. })
        ));
        assert!(delays_from_crossing(&sys, 0.0, 0).is_err());
    }

    #[test]
    fn memory_model() {
        assert_eq!(estimate_memory(200, 8), 51_200_000_000);
        assert_eq!(estimate_memory(1, 8), 32);
        assert!(estimate_memory(428, 8) > 1_000_000_000_000);
        let sys = RetardedSystem::new(DMatrix::identity(20, 20) * -1.0, DMatrix::zeros(20, 20)).unwrap();
        assert!(matches!(
            build_lambda_capped(&sys, 1_000_000),
            Err(Error::ResourceGuard { required: 5_120_000, cap: 1_000_000 })
        ));
    }

    fn complex_det(m: DMatrix<Complex64>) -> Complex64 {
        m.determinant()
    }

    /// Product of row norms, an upper bound on |det m|.
    fn hadamard(m: &DMatrix<Complex64>) -> f64 {
        m.row_iter().map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).product()
    }

    proptest! {
        #[test]
        fn vectorized_triple_product(seed in any::<u64>(), n in 1usize..=3) {
            let (p1, p2, p3) = (random_matrix(n, seed), random_matrix(n, seed + 1), random_matrix(n, seed + 2));
            let lhs = vectorize(&(&p1 * &p2 * &p3));
            let rhs = kron_product(&p3.transpose(), &p1) * vectorize(&p2);
            prop_assert!((lhs - rhs).abs().max() < 1e-12);
        }

        #[test]
        fn companion_determinant_identity(
            seed in any::<u64>(),
            n in 1usize..=3,
            re in -3.0..3.0f64,
            im in -3.0..3.0f64,
        ) {
            let sys = RetardedSystem::new(random_matrix(n, seed), random_matrix(n, seed ^ 7)).unwrap();
            let poly = build_lambda(&sys).unwrap();
            let s = Complex64::new(re, im);
            let c = poly.companion();
            let m = c.nrows();
            let shifted = DMatrix::from_fn(m, m, |i, j| {
                (if i == j { s } else { Complex64::new(0.0, 0.0) }) - c[(i, j)]
            });
            let scale = hadamard(&shifted).max(1.0);
            let lhs = complex_det(shifted);
            let rhs = complex_det(poly.evaluate(s));
            prop_assert!((lhs - rhs).norm() < 1e-6 * scale, "{} vs {} (scale {})", lhs, rhs, scale);
        }

        #[test]
        fn spectrum_is_symmetric_about_the_imaginary_axis(seed in any::<u64>(), n in 1usize..=3) {
            let sys = RetardedSystem::new(random_matrix(n, seed), random_matrix(n, seed ^ 99)).unwrap();
            let eigs = eigen::eigenvalues(&build_lambda(&sys).unwrap().companion()).unwrap();
            for z in &eigs {
                let mirror = -z.conj();
                let gap = eigs.iter().map(|w| (w - mirror).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(gap < 1e-5 * (1.0 + z.norm()), "z={} gap={}", z, gap);
            }
        }
    }
}
