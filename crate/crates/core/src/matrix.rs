//! Dense complex square matrices.
//!
//! [`ComplexSquareMatrix`] stores its entries row-major and refuses non-finite
//! values at construction, so every later operation can assume finite input.
//! Determinants come out of an LU factorization with partial pivoting as a
//! [`LogDet`] (log-magnitude plus unit phase), which stays representable for the
//! box sizes used by the lattice module.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

/// Inversion is refused above this 1-norm condition estimate.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSquareMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexSquareMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        if data.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput(format!("non-finite entry at ({}, {})", pos / n, pos % n)));
        }
        Ok(Self { n, data })
    }

    /// Builds a matrix from separate real and imaginary row-major parts.
    pub fn from_parts(n: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::InvalidInput("real and imaginary parts differ in length".into()));
        }
        let data = re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        Self::new(n, data)
    }

    /// Builds a matrix entrywise. Panics if `n == 0` or `f` yields a non-finite value.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self::new(n, data).expect("from_fn produced an invalid matrix")
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Complex64::new(1.0, 0.0))
    }

    /// `value * I`.
    pub fn scalar(n: usize, value: Complex64) -> Self {
        Self::from_fn(n, |i, j| if i == j { value } else { Complex64::new(0.0, 0.0) })
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { Complex64::new(0.0, 0.0) })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Returns a copy with entry `(i, j)` replaced.
    pub fn with_entry(mut self, i: usize, j: usize, value: Complex64) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite entry".into()));
        }
        self.data[i * self.n + j] = value;
        Ok(self)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Self::new(self.n, self.data.iter().map(|&z| f(z)).collect())
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| self.get(j, i))
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::InvalidInput(format!("dimension mismatch: {} vs {}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Self::new(self.n, self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Self::new(self.n, self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, factor: Complex64) -> Result<Self> {
        self.map(|z| z * factor)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Self::new(n, out)
    }

    /// `self - diag(shift)` with a real diagonal.
    pub fn sub_real_diagonal(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "diagonal of length {} for a {}x{} matrix",
                shift.len(),
                self.n,
                self.n
            )));
        }
        let mut out = self.clone();
        for (i, s) in shift.iter().enumerate() {
            out.data[i * self.n + i] -= Complex64::new(*s, 0.0);
        }
        Self::new(out.n, out.data)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let n = self.n;
        (0..n).map(|j| (0..n).map(|i| self.get(i, j).norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `true` iff `self == self*` bit for bit.
    pub fn is_exactly_hermitian(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (i..n).all(|j| self.get(i, j) == self.get(j, i).conj()))
    }

    /// `true` iff `self == selfᵀ` bit for bit.
    pub fn is_exactly_symmetric(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (i + 1..n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Principal submatrix on the given 0-based indices, in the given order.
    pub fn principal_submatrix(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidInput("index set must be nonempty".into()));
        }
        for (k, &i) in indices.iter().enumerate() {
            if i >= self.n {
                return Err(Error::InvalidInput(format!("index {i} out of range for dimension {}", self.n)));
            }
            if indices[..k].contains(&i) {
                return Err(Error::InvalidInput(format!("duplicate index {i}")));
            }
        }
        let m = indices.len();
        Ok(Self::from_fn(m, |a, b| self.get(indices[a], indices[b])))
    }

    pub fn lu(&self) -> Result<Lu> {
        Lu::factor(self)
    }

    pub fn log_det(&self) -> LogDet {
        match Lu::factor(self) {
            Ok(lu) => lu.log_det(),
            Err(_) => LogDet::ZERO,
        }
    }

    pub fn det(&self) -> Complex64 {
        self.log_det().value()
    }

    /// Inverse, refused when the 1-norm condition estimate exceeds [`CONDITION_LIMIT`].
    pub fn inverse(&self) -> Result<Self> {
        let lu = self.lu()?;
        let inv = lu.inverse()?;
        let cond = self.norm_one() * inv.norm_one();
        if !(cond <= CONDITION_LIMIT) {
            return Err(Error::IllConditioned { cond, limit: CONDITION_LIMIT });
        }
        Ok(inv)
    }
}

impl Index<(usize, usize)> for ComplexSquareMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

/// A determinant stored as `exp(log_abs) * phase` with `|phase| = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    pub phase: Complex64,
}

impl LogDet {
    pub const ZERO: LogDet = LogDet { log_abs: f64::NEG_INFINITY, phase: Complex64 { re: 0.0, im: 0.0 } };

    pub fn value(&self) -> Complex64 {
        if self.log_abs == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        self.phase * self.log_abs.exp()
    }

    pub fn abs(&self) -> f64 {
        self.log_abs.exp()
    }
}

/// LU factorization `P C = L U` with partial pivoting, packed in one buffer.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    odd: bool,
}

impl Lu {
    pub fn factor(c: &ComplexSquareMatrix) -> Result<Self> {
        let n = c.n;
        let mut lu = c.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd = false;
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == 0.0 {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                odd = !odd;
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let ukj = lu[k * n + j];
                    lu[i * n + j] -= factor * ukj;
                }
            }
        }
        Ok(Self { n, lu, perm, odd })
    }

    pub fn log_det(&self) -> LogDet {
        let n = self.n;
        let mut log_abs = 0.0;
        let mut phase = Complex64::new(if self.odd { -1.0 } else { 1.0 }, 0.0);
        for k in 0..n {
            let d = self.lu[k * n + k];
            let r = d.norm();
            log_abs += r.ln();
            phase *= d / r;
        }
        let r = phase.norm();
        LogDet { log_abs, phase: phase / r }
    }

    /// Solves `C x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s = row.iter().zip(&x[..i]).fold(x[i], |s, (l, xj)| s - l * xj);
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s = row.iter().zip(&x[i + 1..]).fold(x[i], |s, (u, xj)| s - u * xj);
            x[i] = s / self.lu[i * n + i];
        }
        b.copy_from_slice(&x);
    }

    /// Column `j` of `C^{-1}`.
    pub fn inverse_column(&self, j: usize) -> Vec<Complex64> {
        let mut e = vec![Complex64::new(0.0, 0.0); self.n];
        e[j] = Complex64::new(1.0, 0.0);
        self.solve_in_place(&mut e);
        e
    }

    /// Full inverse without a conditioning check.
    pub fn inverse(&self) -> Result<ComplexSquareMatrix> {
        let n = self.n;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let col = self.inverse_column(j);
            for (i, v) in col.into_iter().enumerate() {
                data[i * n + j] = v;
            }
        }
        ComplexSquareMatrix::new(n, data).map_err(|_| Error::Singular)
    }
}

/// Determinant of a small dense matrix held in a stack buffer (row-major, `n <= 4`).
pub(crate) fn small_det(n: usize, src: &[Complex64; 16]) -> Complex64 {
    let mut m = *src;
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut p = k;
        let mut best = m[k * n + k].norm_sqr();
        for i in k + 1..n {
            let v = m[i * n + k].norm_sqr();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let pivot = m[k * n + k];
        det *= pivot;
        for i in k + 1..n {
            let f = m[i * n + k] / pivot;
            for j in k + 1..n {
                let ukj = m[k * n + j];
                m[i * n + j] -= f * ukj;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_ragged_and_non_finite() {
        assert!(ComplexSquareMatrix::new(2, vec![c(1.0, 0.0); 3]).is_err());
        assert!(ComplexSquareMatrix::new(0, vec![]).is_err());
        assert!(ComplexSquareMatrix::new(1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(ComplexSquareMatrix::new(1, vec![c(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn determinant_of_small_matrices() {
        let m = ComplexSquareMatrix::from_diagonal(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert!((m.det() - c(6.0, 0.0)).norm() < 1e-14);
        // [[0,1],[1,0]] needs a pivot swap: det = -1
        let p = ComplexSquareMatrix::new(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((p.det() - c(-1.0, 0.0)).norm() < 1e-15);
        let mut buf = [Complex64::new(0.0, 0.0); 16];
        buf[..4].copy_from_slice(p.entries());
        assert!((small_det(2, &buf) - c(-1.0, 0.0)).norm() < 1e-15);
        let q = ComplexSquareMatrix::new(2, vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, 3.0), c(4.0, -1.0)]).unwrap();
        // (1+i)(4-i) - 2*3i = 5 + 3i - 6i
        assert!((q.det() - c(5.0, -3.0)).norm() < 1e-13);
    }

    #[test]
    fn log_det_does_not_overflow() {
        let m = ComplexSquareMatrix::scalar(64, c(1e10, 0.0));
        let ld = m.log_det();
        assert!((ld.log_abs - 640.0 * 10f64.ln()).abs() < 1e-9);
        assert!((ld.phase - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn inverse_round_trip() {
        let m = ComplexSquareMatrix::new(
            3,
            vec![
                c(2.0, 1.0),
                c(0.5, 0.0),
                c(0.0, -1.0),
                c(1.0, 0.0),
                c(3.0, 0.0),
                c(0.2, 0.2),
                c(0.0, 0.0),
                c(-1.0, 0.5),
                c(1.0, 2.0),
            ],
        )
        .unwrap();
        let inv = m.inverse().unwrap();
        let prod = m.matmul(&inv).unwrap();
        assert!(prod.sub(&ComplexSquareMatrix::identity(3)).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn singular_and_ill_conditioned_inverse_are_refused() {
        let z = ComplexSquareMatrix::zeros(2);
        assert_eq!(z.inverse(), Err(Error::Singular));
        let m = ComplexSquareMatrix::from_real_diagonal(&[1.0, 1e-13]);
        assert!(matches!(m.inverse(), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn principal_submatrix_checks_indices() {
        let m = ComplexSquareMatrix::from_fn(3, |i, j| c((3 * i + j) as f64, 0.0));
        let s = m.principal_submatrix(&[2, 0]).unwrap();
        assert_eq!(s.get(0, 0), c(8.0, 0.0));
        assert_eq!(s.get(0, 1), c(6.0, 0.0));
        assert_eq!(s.get(1, 0), c(2.0, 0.0));
        assert!(m.principal_submatrix(&[0, 0]).is_err());
        assert!(m.principal_submatrix(&[3]).is_err());
        assert!(m.principal_submatrix(&[]).is_err());
    }
}
