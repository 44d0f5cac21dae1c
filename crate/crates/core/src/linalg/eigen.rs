//! Eigenvalues of small dense complex matrices: Householder reduction to
//! upper Hessenberg form followed by shifted QR with Givens rotations.

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{dim_err, Error, Result};
use crate::linalg::dense::{DenseComplexMatrix, Matrix};

pub const MAX_EIGEN_DIM: usize = 64;

/// Reduces `a` to upper Hessenberg form by a unitary similarity.
pub fn hessenberg(a: &DenseComplexMatrix) -> DenseComplexMatrix {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // Left: rows k+1.., H <- (I - 2 v v^H) H
        for j in k..n {
            let dot: Complex64 = (k + 1..n).map(|i| v[i - k - 1].conj() * h[(i, j)]).sum();
            for i in k + 1..n {
                h[(i, j)] -= v[i - k - 1] * dot * 2.0;
            }
        }
        // Right: columns k+1.., H <- H (I - 2 v v^H)
        for i in 0..n {
            let dot: Complex64 = (k + 1..n).map(|j| h[(i, j)] * v[j - k - 1]).sum();
            for j in k + 1..n {
                h[(i, j)] -= dot * v[j - k - 1].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::zero();
        }
    }
    h
}

fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if norm == 0.0 {
        return (1.0, Complex64::zero());
    }
    if a.norm() == 0.0 {
        return (0.0, b.conj() / b.norm());
    }
    let c = a.norm() / norm;
    let s = (a / a.norm()) * b.conj() / norm;
    (c, s)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of a square complex matrix (order of deflation, bottom first).
pub fn eigenvalues(m: &DenseComplexMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(dim_err("eigenvalues", "square matrix", format!("{:?}", m.shape())));
    }
    let n = m.rows();
    if n > MAX_EIGEN_DIM {
        return Err(dim_err("eigenvalues", format!("<= {MAX_EIGEN_DIM}"), n));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NoConvergence {
            iterations: 0,
            matrix: format!("{m:?}"),
        });
    }
    let mut h = hessenberg(m);
    let scale = h.max_abs();
    let mut eig = vec![Complex64::zero(); n];
    let mut hi = n - 1;
    let mut its = 0usize;
    let mut total = 0usize;
    let cap = 100 * n;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        // Find the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= f64::EPSILON * diag {
                h[(lo, lo - 1)] = Complex64::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > cap {
            return Err(Error::NoConvergence {
                iterations: total,
                matrix: format!("{m:?}"),
            });
        }
        let shift = if its % 11 == 10 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.3 * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
    Ok(eig)
}

fn qr_sweep(h: &mut DenseComplexMatrix, lo: usize, hi: usize, shift: Complex64) {
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = a * c + s * b;
            h[(k + 1, j)] = -s.conj() * a + b * c;
        }
        h[(k + 1, k)] = Complex64::zero();
        rots.push((c, s));
    }
    for (off, &(c, s)) in rots.iter().enumerate() {
        let k = lo + off;
        for i in lo..=(k + 1).min(hi) {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a * c + b * s.conj();
            h[(i, k + 1)] = -a * s + b * c;
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}

pub fn spectral_radius(m: &DenseComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().fold(0.0, |r, z| r.max(z.norm())))
}

/// Monic characteristic polynomial `det(zI - A)`, highest degree first, by
/// Faddeev-LeVerrier. Only intended for the small (n <= 12) stability matrices.
pub fn characteristic_polynomial(a: &DenseComplexMatrix) -> Vec<Complex64> {
    let n = a.rows();
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut mk: DenseComplexMatrix = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a.matmul(&mk);
        let prev = coeffs[k - 1];
        for i in 0..n {
            next[(i, i)] += prev;
        }
        mk = next;
        let am = a.matmul(&mk);
        let tr: Complex64 = (0..n).map(|i| am[(i, i)]).sum();
        coeffs.push(-tr / k as f64);
    }
    coeffs
}
