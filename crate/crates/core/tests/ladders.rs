//! Every delay in a reported ladder must put a root on the imaginary axis.

use std::f64::consts::PI;

use delay_margin::reference::literature_example;
use delay_margin::sweep::{find_crossings, Crossing, SweepConfig};
use delay_margin::RetardedSystem;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

/// |det(j w I - A0 - A1 e^{-j w tau})| and the Hadamard bound of the matrix.
fn characteristic_residual(sys: &RetardedSystem, omega: f64, tau: f64) -> (f64, f64) {
    let n = sys.dim();
    let jw = Complex64::new(0.0, omega);
    let e = (-jw * tau).exp();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { jw } else { Complex64::new(0.0, 0.0) };
        diag - sys.a0()[(i, j)] - e * sys.a1()[(i, j)]
    });
    let bound: f64 = m
        .row_iter()
        .map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .product();
    (m.determinant().norm(), bound.max(1.0))
}

fn check_ladders(sys: &RetardedSystem, crossings: &[Crossing]) -> Result<(), String> {
    for c in crossings {
        let period = 2.0 * PI / c.omega_c;
        for pair in c.taus.windows(2) {
            let step = pair[1] - pair[0];
            if (step - period).abs() > 1e-12 * pair[1].max(1.0) {
                return Err(format!("omega {}: step {step} vs period {period}", c.omega_c));
            }
        }
        for &tau in &c.taus {
            let (residual, scale) = characteristic_residual(sys, c.omega_c, tau);
            if residual > 1e-6 * scale {
                return Err(format!("omega {} tau {tau}: residual {residual:e}, scale {scale:e}", c.omega_c));
            }
        }
    }
    Ok(())
}

#[test]
fn literature_ladders_are_periodic_roots() {
    let sys = literature_example();
    let cfg = SweepConfig {
        t_min: -1.0,
        t_max: 1.0,
        ..SweepConfig::for_system(&sys)
    };
    let crossings = find_crossings(&sys, &cfg).unwrap();
    assert_eq!(crossings.len(), 5);
    check_ladders(&sys, &crossings).unwrap();
}

fn stable_system(a0: Vec<f64>, a1: Vec<f64>, n: usize, shift: f64) -> Option<RetardedSystem> {
    let a0 = DMatrix::from_row_slice(n, n, &a0) - DMatrix::identity(n, n) * shift;
    let sys = RetardedSystem::new(a0, DMatrix::from_row_slice(n, n, &a1)).ok()?;
    let stable = sys.delay_free_spectrum().ok()?.rhp_count == 0;
    (stable && !sys.check_zero_root()).then_some(sys)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_ladders_are_periodic_roots(
        (n, a0, a1) in (1usize..=3).prop_flat_map(|n| (
            Just(n),
            prop::collection::vec(-1.0..1.0f64, n * n),
            prop::collection::vec(-3.0..3.0f64, n * n),
        )),
        shift in 0.5..2.5f64,
    ) {
        let Some(sys) = stable_system(a0, a1, n, shift) else {
            return Ok(());
        };
        let bound = SweepConfig::t_bound(&sys);
        let cfg = SweepConfig { t_min: -bound, t_max: bound, ..SweepConfig::for_system(&sys) };
        let crossings = find_crossings(&sys, &cfg).unwrap();
        prop_assert!(check_ladders(&sys, &crossings).is_ok(), "{:?}", check_ladders(&sys, &crossings));
    }
}
