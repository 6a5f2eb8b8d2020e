//! Herglotz matrices: complex square matrices whose operator imaginary part
//! `Im C = (C - C*)/2i` is positive definite.
//!
//! The class is closed under `C -> -C^{-1}` and under principal restriction,
//! and the Schur complement of the last pivot of a Herglotz matrix inverts to
//! the leading block of its inverse. All of these are exposed here so they can
//! be checked directly.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eigen::smallest_hermitian_eigenvalue;
use crate::error::{Error, Result};
use crate::matrix::ComplexSquareMatrix;

/// Operator imaginary part `(C - C*)/2i`, Hermitian bit for bit.
pub fn imag_part(c: &ComplexSquareMatrix) -> ComplexSquareMatrix {
    let n = c.dim();
    let raw = ComplexSquareMatrix::from_fn(n, |i, j| {
        let d = c.get(i, j) - c.get(j, i).conj();
        // d / 2i
        Complex64::new(0.5 * d.im, -0.5 * d.re)
    });
    ComplexSquareMatrix::from_fn(n, |i, j| {
        if i == j {
            Complex64::new(raw.get(i, i).re, 0.0)
        } else if i < j {
            (raw.get(i, j) + raw.get(j, i).conj()) * 0.5
        } else {
            ((raw.get(j, i) + raw.get(i, j).conj()) * 0.5).conj()
        }
    })
}

/// Default strictness margin for `Im C > 0`: `1e-12 * (1 + max|Im C|)`.
pub fn default_tolerance(imag: &ComplexSquareMatrix) -> f64 {
    1e-12 * (1.0 + imag.max_abs())
}

/// `true` iff the smallest eigenvalue of `Im C` exceeds `tol`.
pub fn is_herglotz(c: &ComplexSquareMatrix, tol: f64) -> bool {
    let min_eig = smallest_hermitian_eigenvalue(&imag_part(c));
    min_eig.is_finite() && min_eig > tol
}

/// A matrix with certified positive definite imaginary part.
#[derive(Clone, Debug, PartialEq)]
pub struct HerglotzMatrix {
    matrix: ComplexSquareMatrix,
    certified_min_eig: f64,
}

impl HerglotzMatrix {
    /// Certifies `matrix` with the default tolerance.
    pub fn new(matrix: ComplexSquareMatrix) -> Result<Self> {
        let imag = imag_part(&matrix);
        let tol = default_tolerance(&imag);
        Self::certify(matrix, &imag, tol)
    }

    pub fn with_tolerance(matrix: ComplexSquareMatrix, tol: f64) -> Result<Self> {
        let imag = imag_part(&matrix);
        Self::certify(matrix, &imag, tol)
    }

    fn certify(matrix: ComplexSquareMatrix, imag: &ComplexSquareMatrix, tol: f64) -> Result<Self> {
        let min_eig = smallest_hermitian_eigenvalue(imag);
        if !(min_eig > tol) {
            return Err(Error::NotHerglotz { min_eig, tol });
        }
        Ok(Self { matrix, certified_min_eig: min_eig })
    }

    pub fn matrix(&self) -> &ComplexSquareMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexSquareMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Smallest eigenvalue of `Im C`, computed at construction.
    pub fn certified_min_eig(&self) -> f64 {
        self.certified_min_eig
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix.get(i, j)
    }

    /// `-C^{-1}`, again Herglotz.
    ///
    /// A conditioning failure here means the certificate of `C` was too weak
    /// to survive inversion in double precision.
    pub fn neg_inverse(&self) -> Result<HerglotzMatrix> {
        let inv = self.matrix.inverse()?;
        let neg = inv.scale(Complex64::new(-1.0, 0.0))?;
        HerglotzMatrix::new(neg)
    }

    /// Principal restriction, which stays Herglotz.
    pub fn restrict(&self, indices: &[usize]) -> Result<HerglotzMatrix> {
        HerglotzMatrix::new(restrict(&self.matrix, indices)?)
    }

    /// Schur complement of the last pivot; Herglotz because its inverse is the
    /// leading block of `C^{-1}`.
    pub fn schur_complement_last(&self) -> Result<HerglotzMatrix> {
        HerglotzMatrix::new(schur_complement_last(&self.matrix)?)
    }

    /// `self - diag(shift)` for a real shift, which leaves `Im C` unchanged.
    pub fn sub_real_diagonal(&self, shift: &[f64]) -> Result<HerglotzMatrix> {
        let matrix = self.matrix.sub_real_diagonal(shift)?;
        Ok(HerglotzMatrix { matrix, certified_min_eig: self.certified_min_eig })
    }
}

/// Principal submatrix on 0-based `indices`.
pub fn restrict(c: &ComplexSquareMatrix, indices: &[usize]) -> Result<ComplexSquareMatrix> {
    c.principal_submatrix(indices)
}

fn leading_indices(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// `B = Ĉ - c_nn^{-1} (c_V ⊗ c_H)` for the `(n-1, 1)` block split of `C`.
pub fn schur_complement_last(c: &ComplexSquareMatrix) -> Result<ComplexSquareMatrix> {
    let n = c.dim();
    if n < 2 {
        return Err(Error::InvalidInput(format!("Schur complement needs n >= 2, got {n}")));
    }
    let m = n - 1;
    let pivot = c.get(m, m);
    if pivot.norm() <= 1e-12 * c.max_abs() || pivot.norm() == 0.0 {
        return Err(Error::SingularPivot(pivot.norm()));
    }
    let inv_pivot = pivot.inv();
    let b = ComplexSquareMatrix::from_fn(m, |i, j| c.get(i, j) - c.get(i, m) * c.get(m, j) * inv_pivot);
    Ok(b)
}

/// `((C^{-1})_nn · det C, det Ĉ)`; the two agree for invertible `C`.
///
/// For `n = 1` the restricted determinant is the empty product `1`.
pub fn cofactor_ratio_identity(c: &ComplexSquareMatrix) -> Result<(Complex64, Complex64)> {
    let n = c.dim();
    let lu = c.lu()?;
    let last = lu.inverse_column(n - 1)[n - 1];
    let lhs = last * lu.log_det().value();
    let rhs = if n == 1 { Complex64::new(1.0, 0.0) } else { restrict(c, &leading_indices(n - 1))?.det() };
    Ok((lhs, rhs))
}

/// `(det C, c_nn · det Ĉ)` for a Hermitian positive definite `C`; the first
/// never exceeds the second.
pub fn last_pivot_bound(c: &ComplexSquareMatrix) -> Result<(f64, f64)> {
    let n = c.dim();
    if !c.is_exactly_hermitian() {
        return Err(Error::InvalidInput("matrix must be Hermitian".into()));
    }
    let det = c.det().re;
    let minor = if n == 1 { 1.0 } else { restrict(c, &leading_indices(n - 1))?.det().re };
    Ok((det, c.get(n - 1, n - 1).re * minor))
}

/// Random Herglotz test matrix `A = R + i(L L* + ε I)` with `ε = 0.05·spread`.
///
/// `R` is real symmetric with independent uniform entries in `[-spread, spread]`
/// on and above the diagonal; `L` has independent complex entries uniform in
/// the square of half-width `spread`. Then `Im A = L L* + ε I >= ε I`.
pub fn sample_random_herglotz(n: usize, seed: u64, spread: f64) -> Result<HerglotzMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if !(spread > 0.0 && spread.is_finite()) {
        return Err(Error::InvalidInput(format!("spread must be positive, got {spread}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let x = rng.random_range(-spread..=spread);
            r[i * n + j] = x;
            r[j * n + i] = x;
        }
    }
    let l: Vec<Complex64> = (0..n * n)
        .map(|_| Complex64::new(rng.random_range(-spread..=spread), rng.random_range(-spread..=spread)))
        .collect();
    let eps = 0.05 * spread;
    // P = L L* + eps I, Hermitian by construction of the upper triangle
    let p = ComplexSquareMatrix::from_fn(n, |i, j| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        let mut s = Complex64::new(0.0, 0.0);
        for k in 0..n {
            s += l[a * n + k] * l[b * n + k].conj();
        }
        if a == b {
            s = Complex64::new(s.re + eps, 0.0);
        }
        if i <= j {
            s
        } else {
            s.conj()
        }
    });
    let a = ComplexSquareMatrix::from_fn(n, |i, j| {
        Complex64::new(r[i * n + j], 0.0) + Complex64::new(0.0, 1.0) * p.get(i, j)
    });
    HerglotzMatrix::with_tolerance(a, 0.5 * eps)
}
