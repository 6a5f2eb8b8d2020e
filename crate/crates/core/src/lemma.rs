//! Closed form of the two-dimensional Minami integral
//! `∫ dv₁ dv₂ det Im[diag(v₁, v₂) - A]^{-1}` for a 2×2 Herglotz matrix `A`.

use alloc::format;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::herglotz::HerglotzMatrix;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Lemma1Report {
    pub det_im_a: f64,
    /// Discriminant of the quadratic left after the inner Cauchy integral.
    pub delta: f64,
    pub value: f64,
    pub bound: f64,
    /// `value / bound`.
    pub ratio: f64,
}

fn require_2x2(a: &HerglotzMatrix) -> Result<()> {
    if a.dim() != 2 {
        return Err(Error::InvalidInput(format!("expected a 2x2 matrix, got {0}x{0}", a.dim())));
    }
    Ok(())
}

fn relative_gap(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE)
}

/// `det Im A = (Im a₁₁)(Im a₂₂) - ¼|a₁₂ - conj(a₂₁)|²`.
pub fn det_im_2x2(a: &HerglotzMatrix) -> Result<f64> {
    require_2x2(a)?;
    let (a11, a12, a21, a22) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    Ok(a11.im * a22.im - 0.25 * (a12 - a21.conj()).norm_sqr())
}

/// `Δ = (2 Im a₁₁ Im a₂₂ + Re(a₁₂a₂₁))² - |a₁₂a₂₁|²`, evaluated after moving
/// `Re a_ii` to zero.
///
/// Cross-checked against `4[d² + ½d(|a₁₂|²+|a₂₁|²) + (|a₁₂|²-|a₂₁|²)²/16]`
/// with `d = det Im A`; disagreement beyond `1e-10` relative, or `Δ <= 0`,
/// is reported as an inconsistency.
pub fn discriminant_2x2(a: &HerglotzMatrix) -> Result<f64> {
    require_2x2(a)?;
    let a = a.sub_real_diagonal(&[a.get(0, 0).re, a.get(1, 1).re])?;
    let (a11, a12, a21, a22) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    let product: Complex64 = a12 * a21;
    let lead = 2.0 * a11.im * a22.im + product.re;
    let delta = lead * lead - product.norm_sqr();
    if !(delta > 0.0) {
        return Err(Error::Inconsistent(format!("discriminant {delta:e} is not positive")));
    }
    let radicand = radicand_2x2(&a)?;
    let gap = relative_gap(delta, 4.0 * radicand);
    if gap > 1e-10 {
        return Err(Error::Inconsistent(format!(
            "discriminant {delta:e} disagrees with 4x radicand {:e} (relative gap {gap:e})",
            4.0 * radicand
        )));
    }
    Ok(delta)
}

/// The expression under the square root of the closed form.
fn radicand_2x2(a: &HerglotzMatrix) -> Result<f64> {
    let d = det_im_2x2(a)?;
    let s12 = a.get(0, 1).norm_sqr();
    let s21 = a.get(1, 0).norm_sqr();
    Ok(d * d + 0.5 * d * (s12 + s21) + (s12 - s21) * (s12 - s21) / 16.0)
}

/// Full closed-form report; `value = 2π² det Im A / √Δ`.
pub fn lemma1_value(a: &HerglotzMatrix) -> Result<Lemma1Report> {
    let det_im_a = det_im_2x2(a)?;
    let delta = discriminant_2x2(a)?;
    let bound = PI * PI;
    let value = 2.0 * bound * det_im_a / delta.sqrt();
    let direct = bound * det_im_a / radicand_2x2(a)?.sqrt();
    let gap = relative_gap(value, direct);
    if gap > 1e-10 {
        return Err(Error::Inconsistent(format!(
            "discriminant route {value:e} and radical route {direct:e} differ by {gap:e}"
        )));
    }
    Ok(Lemma1Report { det_im_a, delta, value, bound, ratio: value / bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herglotz::{imag_part, sample_random_herglotz};
    use crate::matrix::ComplexSquareMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn herglotz(entries: [Complex64; 4]) -> HerglotzMatrix {
        HerglotzMatrix::new(ComplexSquareMatrix::new(2, entries.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn identity_times_i() {
        let a = herglotz([c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(det_im_2x2(&a).unwrap(), 1.0);
        assert_eq!(discriminant_2x2(&a).unwrap(), 4.0);
        let r = lemma1_value(&a).unwrap();
        assert!((r.value - PI * PI).abs() < 1e-14);
        assert!((r.ratio - 1.0).abs() < 1e-15);
    }

    #[test]
    fn upper_jordan_block() {
        let a = herglotz([c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(det_im_2x2(&a).unwrap(), 0.75);
        assert_eq!(discriminant_2x2(&a).unwrap(), 4.0);
        let r = lemma1_value(&a).unwrap();
        assert!((r.value - 0.75 * PI * PI).abs() < 1e-14);
    }

    #[test]
    fn symmetric_off_diagonal() {
        let a = herglotz([c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(det_im_2x2(&a).unwrap(), 1.0);
        assert_eq!(discriminant_2x2(&a).unwrap(), 8.0);
        let r = lemma1_value(&a).unwrap();
        assert!((r.value - PI * PI / 2f64.sqrt()).abs() < 1e-13);
        // symmetric case: delta/4 = d² + d|a₁₂|²
        assert!((r.delta / 4.0 - (1.0 + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn symmetric_hermitian_off_diagonal_at_zero() {
        let a = herglotz([c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(det_im_2x2(&a).unwrap(), 1.0);
        let cc = c(0.3, 0.4);
        let a = herglotz([c(0.0, 1.0), cc, cc.conj(), c(0.0, 1.0)]);
        // a₁₂ - conj(a₂₁) = 0, so det Im A = 1 regardless of c
        assert!((det_im_2x2(&a).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_wrong_dimension() {
        let a = HerglotzMatrix::new(ComplexSquareMatrix::scalar(3, c(0.0, 1.0))).unwrap();
        assert!(det_im_2x2(&a).is_err());
        assert!(lemma1_value(&a).is_err());
    }

    #[test]
    fn agrees_with_dense_determinant_and_is_bounded() {
        for seed in 0..200 {
            let a = sample_random_herglotz(2, seed, 1.0 + (seed % 5) as f64).unwrap();
            let d = det_im_2x2(&a).unwrap();
            let dense = imag_part(a.matrix()).det().re;
            assert!(relative_gap(d, dense) < 1e-12, "seed {seed}: {d} vs {dense}");
            let r = lemma1_value(&a).unwrap();
            assert!(r.value > 0.0 && r.value <= r.bound);
        }
    }

    #[test]
    fn invariant_under_real_diagonal_shift() {
        let a = sample_random_herglotz(2, 99, 1.0).unwrap();
        let base = lemma1_value(&a).unwrap().value;
        for (r1, r2) in [(1e3, -1e3), (-250.5, 3.25), (0.0, 999.0)] {
            let shifted = a.sub_real_diagonal(&[r1, r2]).unwrap();
            let v = lemma1_value(&shifted).unwrap().value;
            assert!(relative_gap(base, v) <= 1e-10);
        }
    }
}
