//! Dense eigenvalue routines over nalgebra's Schur decomposition.

use nalgebra::{Complex, DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SCHUR_ITERATIONS: usize = 20_000;

/// Eigenvalues of a real square matrix.
///
/// Balancing, Householder reduction to Hessenberg form and the Francis
/// double-shift QR iteration, without accumulating Schur vectors. Should the
/// iteration stall, nalgebra's Schur decomposition is tried on the balanced
/// matrix before giving up.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let balanced = balance(m);
    let mut h = balanced.clone();
    reduce_to_hessenberg(&mut h);
    if let Some(eigs) = hessenberg_qr(&mut h) {
        return Ok(eigs);
    }
    Schur::try_new(balanced, f64::EPSILON, MAX_SCHUR_ITERATIONS)
        .map(|schur| schur.complex_eigenvalues().iter().copied().collect())
        .ok_or_else(|| Error::EigenNoConvergence {
            context: format!("{n}x{n} real matrix"),
        })
}

/// Orthogonal similarity to upper Hessenberg form; entries below the first
/// subdiagonal are zeroed.
fn reduce_to_hessenberg(h: &mut DMatrix<f64>) {
    let n = h.nrows();
    let mut ort = vec![0.0; n];
    for m in 1..n.saturating_sub(1) {
        let scale: f64 = (m..n).map(|i| h[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut norm2 = 0.0;
        for i in (m..n).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            norm2 += ort[i] * ort[i];
        }
        let g = if ort[m] > 0.0 { -norm2.sqrt() } else { norm2.sqrt() };
        let hh = norm2 - ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let f = (m..n).rev().map(|i| ort[i] * h[(i, j)]).sum::<f64>() / hh;
            for i in m..n {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..n {
            let f = (m..n).rev().map(|j| ort[j] * h[(i, j)]).sum::<f64>() / hh;
            for j in m..n {
                h[(i, j)] -= f * ort[j];
            }
        }
        h[(m, m - 1)] = scale * g;
        for i in m + 1..n {
            h[(i, m - 1)] = 0.0;
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR
/// iteration with exceptional shifts every tenth iteration (EISPACK `hqr`).
/// `None` when an eigenvalue needs more than `MAX_QR_ITERATIONS` sweeps.
fn hessenberg_qr(h: &mut DMatrix<f64>) -> Option<Vec<Complex64>> {
    const MAX_QR_ITERATIONS: usize = 60;
    let n = h.nrows();
    // 1-based indexing keeps the classic formulation readable.
    let a = |h: &DMatrix<f64>, i: usize, j: usize| h[(i - 1, j - 1)];
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a(h, i, j).abs();
        }
    }
    let mut nn = n;
    let mut shift = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            // Look for a negligible subdiagonal element.
            let mut l = nn;
            while l >= 2 {
                let mut s = a(h, l - 1, l - 1).abs() + a(h, l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a(h, l, l - 1).abs() + s == s {
                    h[(l - 1, l - 2)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a(h, nn, nn);
            if l == nn {
                out[nn] = Complex64::new(x + shift, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a(h, nn - 1, nn - 1);
            let mut w = a(h, nn, nn - 1) * a(h, nn - 1, nn);
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += shift;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    out[nn - 1] = Complex64::new(x + z, 0.0);
                    out[nn] = Complex64::new(if z != 0.0 { x - w / z } else { x + z }, 0.0);
                } else {
                    out[nn - 1] = Complex64::new(x + p, -z);
                    out[nn] = Complex64::new(x + p, z);
                }
                if nn < 2 {
                    return None;
                }
                nn -= 2;
                break;
            }
            if its == MAX_QR_ITERATIONS {
                return None;
            }
            if its > 0 && its % 10 == 0 {
                shift += x;
                for i in 1..=nn {
                    h[(i - 1, i - 1)] -= x;
                }
                let s = a(h, nn, nn - 1).abs() + a(h, nn - 1, nn - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            // Two consecutive small subdiagonal elements.
            let mut m = nn - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a(h, m, m);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a(h, m + 1, m) + a(h, m, m + 1);
                q = a(h, m + 1, m + 1) - z - rr - ss;
                r = a(h, m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a(h, m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (a(h, m - 1, m - 1).abs() + z.abs() + a(h, m + 1, m + 1).abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                h[(i - 1, i - 3)] = 0.0;
                if i != m + 2 {
                    h[(i - 1, i - 4)] = 0.0;
                }
            }

            // Double QR step on rows l..=nn and columns m..=nn.
            for k in m..nn {
                if k != m {
                    p = a(h, k, k - 1);
                    q = a(h, k + 1, k - 1);
                    r = if k != nn - 1 { a(h, k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        h[(k - 1, k - 2)] = -a(h, k, k - 1);
                    }
                } else {
                    h[(k - 1, k - 2)] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..=nn {
                    let mut pp = a(h, k, j) + q * a(h, k + 1, j);
                    if k != nn - 1 {
                        pp += r * a(h, k + 2, j);
                        h[(k + 1, j - 1)] -= pp * z;
                    }
                    h[(k, j - 1)] -= pp * y;
                    h[(k - 1, j - 1)] -= pp * x;
                }
                let mmin = nn.min(k + 3);
                for i in l..=mmin {
                    let mut pp = x * a(h, i, k) + y * a(h, i, k + 1);
                    if k != nn - 1 {
                        pp += z * a(h, i, k + 2);
                        h[(i - 1, k + 1)] -= pp * r;
                    }
                    h[(i - 1, k)] -= pp * q;
                    h[(i - 1, k - 1)] -= pp;
                }
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    out.remove(0);
    Some(out)
}

/// Eigenvalues of a complex square matrix.
pub fn complex_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    Schur::try_new(m.clone(), f64::EPSILON, MAX_SCHUR_ITERATIONS)
        .and_then(|schur| schur.eigenvalues())
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::EigenNoConvergence {
            context: format!("{}x{} complex matrix", m.nrows(), m.ncols()),
        })
}

/// Finite generalized eigenvalues `z` of the pencil `(a, b)`, i.e. the roots
/// of `det(a - z b) = 0`.
///
/// The pencil is reduced to a standard problem through whichever of `a` or
/// `b` factors with the better pivot ratio: `eig(b⁻¹a)` directly, or the
/// reciprocals of `eig(a⁻¹b)` with zero eigenvalues (infinite `z`) dropped.
pub fn generalized_eigenvalues(
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    let a_lu = a.clone().lu();
    let b_lu = b.clone().lu();
    let a_ratio = pivot_ratio(a_lu.u().diagonal().iter());
    let b_ratio = pivot_ratio(b_lu.u().diagonal().iter());
    if a_ratio == 0.0 && b_ratio == 0.0 {
        return Err(Error::EigenNoConvergence {
            context: format!("singular {n}x{n} pencil"),
        });
    }
    if b_ratio >= a_ratio {
        let m = b_lu.solve(a).ok_or_else(|| Error::EigenNoConvergence {
            context: "pencil reduction".into(),
        })?;
        complex_eigenvalues(&m)
    } else {
        let m = a_lu.solve(b).ok_or_else(|| Error::EigenNoConvergence {
            context: "pencil reduction".into(),
        })?;
        let mu = complex_eigenvalues(&m)?;
        let scale = mu.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
        Ok(mu
            .into_iter()
            .filter(|v| v.norm() > 1e-14 * scale)
            .map(|v| Complex::new(1.0, 0.0) / v)
            .collect())
    }
}

fn pivot_ratio<'a>(diag: impl Iterator<Item = &'a Complex64>) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for d in diag {
        let v = d.norm();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi == 0.0 {
        0.0
    } else {
        lo / hi
    }
}

/// Parlett–Reinsch diagonal balancing with power-of-two scaling.
fn balance(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut b = m.clone();
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += b[(j, i)].abs();
                    r += b[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    b[(i, j)] /= f;
                    b[(j, i)] *= f;
                }
            }
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn rotation_has_imaginary_pair() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]);
        let e = sorted(eigenvalues(&m).unwrap());
        assert!((e[0] - Complex::new(0.0, -2.0)).norm() < 1e-14);
        assert!((e[1] - Complex::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn matches_nalgebra_schur_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 1..12 {
            for _ in 0..20 {
                let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
                let ours = sorted(eigenvalues(&m).unwrap());
                let theirs = sorted(
                    Schur::new(m.clone()).complex_eigenvalues().iter().copied().collect(),
                );
                assert_eq!(ours.len(), n);
                // Match each eigenvalue to its nearest counterpart.
                for z in &ours {
                    let d = theirs.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
                    assert!(d < 1e-8 * (1.0 + z.norm()), "n={n} z={z} d={d}");
                }
            }
        }
    }

    #[test]
    fn companion_of_known_polynomial() {
        // (s - 1)(s - 2)(s - 3)(s² + 1)
        let coeffs = [-6.0, 11.0, -12.0, 12.0, -6.0];
        let mut c = DMatrix::zeros(5, 5);
        for i in 0..4 {
            c[(i, i + 1)] = 1.0;
        }
        for j in 0..5 {
            c[(4, j)] = coeffs[j] * -1.0;
        }
        let e = sorted(eigenvalues(&c).unwrap());
        let want = [
            Complex::new(0.0, -1.0),
            Complex::new(0.0, 1.0),
            Complex::new(1.0, 0.0),
            Complex::new(2.0, 0.0),
            Complex::new(3.0, 0.0),
        ];
        for (g, w) in e.iter().zip(want) {
            assert!((g - w).norm() < 1e-9, "{g} vs {w}");
        }
    }

    #[test]
    fn balancing_preserves_spectrum() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 1e6, 0.0, 1e-6, 2.0, 1e4, 0.0, 1e-4, 3.0]);
        let direct = sorted(eigenvalues(&m).unwrap());
        let balanced = sorted(eigenvalues(&balance(&m)).unwrap());
        for (a, b) in direct.iter().zip(&balanced) {
            assert!((a - b).norm() < 1e-8 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn generalized_handles_singular_b() {
        // det(a - z b) with b = diag(1, 0): one finite root z = a11.
        let c = |re: f64| Complex::new(re, 0.0);
        let a = DMatrix::from_row_slice(2, 2, &[c(3.0), c(0.0), c(0.0), c(5.0)]);
        let b = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let z = generalized_eigenvalues(&a, &b).unwrap();
        assert_eq!(z.len(), 1);
        assert!((z[0] - c(3.0)).norm() < 1e-14);
    }

    #[test]
    fn generalized_matches_standard_when_b_is_identity() {
        let c = |re: f64, im: f64| Complex::new(re, im);
        let a = DMatrix::from_row_slice(2, 2, &[c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0), c(-3.0, 0.5)]);
        let b = DMatrix::identity(2, 2);
        let z = sorted(generalized_eigenvalues(&a, &b).unwrap());
        let e = sorted(complex_eigenvalues(&a).unwrap());
        for (x, y) in z.iter().zip(&e) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}
