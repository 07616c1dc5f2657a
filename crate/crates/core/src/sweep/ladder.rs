//! Delays associated with a crossing `(T, omega)` through the Rekasius map
//! `e^{-j omega tau} = (1 - j omega T) / (1 + j omega T)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `tau_0 <= tau_1 <= ...` with `tau_0 = (2 / omega)(atan(omega T) + l pi)`
/// for the unique integer `l` giving the smallest non-negative value, and
/// `tau_k = tau_0 + 2 pi k / omega`.
pub fn taus_from_crossing(t_c: f64, omega_c: f64, k_max: usize) -> Result<Vec<f64>> {
    if !(omega_c > 0.0) || !omega_c.is_finite() {
        return Err(Error::NonPositiveFrequency(omega_c));
    }
    let phase = (omega_c * t_c).atan();
    let phase = if phase < 0.0 { phase + PI } else { phase };
    let tau0 = 2.0 * phase / omega_c;
    let period = 2.0 * PI / omega_c;
    Ok((0..=k_max).map(|k| tau0 + period * k as f64).collect())
}

/// The right-hand side of the Rekasius substitution at `s = j omega`.
pub fn rekasius_factor(t: f64, omega: f64) -> Complex64 {
    let jwt = Complex64::new(0.0, omega * t);
    (1.0 - jwt) / (1.0 + jwt)
}

/// Inverse map: the Rekasius parameter that represents delay `tau` at
/// frequency `omega`.
pub fn rekasius_parameter(tau: f64, omega: f64) -> f64 {
    (omega * tau / 2.0).tan() / omega
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn literature_ladders() {
        let taus = taus_from_crossing(0.0829, 3.0347, 1).unwrap();
        assert!((taus[0] - 0.1624).abs() < 1e-3);
        assert!((taus[1] - 2.233).abs() < 1e-3);
        // Negative T needs the shifted branch.
        let taus = taus_from_crossing(-0.4269, 15.5032, 1).unwrap();
        assert!((taus[0] - 0.2219).abs() < 1e-3);
        assert!((taus[1] - 0.6272).abs() < 1e-3);
    }

    #[test]
    fn scalar_phase_equation() {
        // -1 - 2 e^{-j w tau} = j w at w = sqrt(3) gives e^{-j w tau} = -(1 + j sqrt 3) / 2,
        // i.e. w tau = 2 pi / 3.
        let w = 3f64.sqrt();
        let taus = taus_from_crossing(1.0, w, 0).unwrap();
        assert_eq!(taus.len(), 1);
        assert!((taus[0] - 2.0 * PI / (3.0 * w)).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive_frequency() {
        assert!(taus_from_crossing(1.0, 0.0, 3).is_err());
        assert!(taus_from_crossing(1.0, -2.0, 3).is_err());
        assert!(taus_from_crossing(1.0, f64::NAN, 3).is_err());
    }

    proptest! {
        #[test]
        fn rekasius_identity(t in -1e3..1e3f64, omega in 1e-3..1e3f64, k_max in 0usize..5) {
            let f = rekasius_factor(t, omega);
            prop_assert!((f.norm() - 1.0).abs() < 1e-12);
            let taus = taus_from_crossing(t, omega, k_max).unwrap();
            prop_assert!(taus[0] >= 0.0);
            prop_assert!((Complex64::from_polar(1.0, -omega * taus[0]) - f).norm() < 1e-12);
            for tau in &taus {
                let e = Complex64::from_polar(1.0, -omega * tau);
                prop_assert!((e - f).norm() < 1e-12 * (1.0 + omega * tau), "tau={}", tau);
            }
            let period = 2.0 * PI / omega;
            for w in taus.windows(2) {
                prop_assert!(((w[1] - w[0]) - period).abs() <= 1e-9 * period);
            }
            prop_assert!((rekasius_parameter(taus[0], omega) - t).abs() < 1e-8 * (1.0 + t.abs()) * (1.0 + (omega * t).powi(2)));
        }
    }
}
