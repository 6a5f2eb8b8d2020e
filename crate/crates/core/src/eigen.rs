//! Eigenvalues of Hermitian matrices.
//!
//! A Hermitian `H = X + iY` is embedded as the real symmetric block matrix
//! `[[X, -Y], [Y, X]]`, whose spectrum is that of `H` with every eigenvalue
//! doubled. The embedding is diagonalized with cyclic Jacobi rotations.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::ComplexSquareMatrix;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of the Hermitian part `(H + H*)/2`, sorted ascending.
pub fn hermitian_eigenvalues(h: &ComplexSquareMatrix) -> Vec<f64> {
    let n = h.dim();
    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = (h.get(i, j) + h.get(j, i).conj()) * 0.5;
            a[i * m + j] = z.re;
            a[(i + n) * m + (j + n)] = z.re;
            a[i * m + (j + n)] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    let mut eig = symmetric_jacobi_eigenvalues(&mut a, m);
    eig.sort_by(f64::total_cmp);
    eig.into_iter().step_by(2).collect()
}

/// Smallest eigenvalue of the Hermitian part of `h`.
pub fn smallest_hermitian_eigenvalue(h: &ComplexSquareMatrix) -> f64 {
    hermitian_eigenvalues(h)[0]
}

fn symmetric_jacobi_eigenvalues(a: &mut [f64], m: usize) -> Vec<f64> {
    let scale = a.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    if scale == 0.0 {
        return vec![0.0; m];
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * m + j] * a[i * m + j])
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|i| a[i * m + i]).collect()
}
