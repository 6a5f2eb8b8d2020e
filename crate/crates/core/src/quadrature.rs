//! Numerical oracle for the Minami-type integrals.
//!
//! One-dimensional integrals use globally adaptive 7/15-point Gauss–Kronrod
//! panels (QUADPACK error heuristic). Integrals over the real line are mapped
//! onto `(-π/2, π/2)` with `v = tan θ`; the integrands here decay like `|v|^-2`
//! per axis, so the mapped integrand is bounded. Multi-dimensional integrals
//! are tensorized: each axis is an adaptive 1D integral of the next one.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::herglotz::{imag_part, HerglotzMatrix};
use crate::matrix::{small_det, ComplexSquareMatrix};
use crate::summation::pairwise_sum;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

/// Largest dimension handled by the tensorized integrator.
pub const MAX_QUADRATURE_DIM: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Transform {
    /// `v = tan θ`, mapping the real line onto `(-π/2, π/2)`.
    Tangent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub max_panels_per_axis: usize,
    pub transform: Transform,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-7, max_panels_per_axis: 2048, transform: Transform::Tangent }
    }
}

impl QuadratureConfig {
    pub fn new(rel_tol: f64, max_panels_per_axis: usize) -> Result<Self> {
        let cfg = Self { rel_tol, max_panels_per_axis, transform: Transform::Tangent };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 1e-12 && self.rel_tol < 1e-2) {
            return Err(Error::InvalidInput(format!("rel_tol {} outside (1e-12, 1e-2)", self.rel_tol)));
        }
        if self.max_panels_per_axis < 8 {
            return Err(Error::InvalidInput(format!("max_panels_per_axis {} is below 8", self.max_panels_per_axis)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntegralResult {
    pub value: f64,
    pub est_error: f64,
    pub panels_used: usize,
    pub converged: bool,
}

// 15-point Kronrod abscissae (descending, last is the centre) and weights,
// with the embedded 7-point Gauss weights for the odd-indexed abscissae.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.a.total_cmp(&self.a))
    }
}

#[allow(clippy::needless_range_loop)]
fn gauss_kronrod_15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..3 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let (f1, f2) = (f(centre - dx), f(centre + dx));
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let (f1, f2) = (f(centre - dx), f(centre + dx));
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h = half.abs();
    let value = res_k * half;
    res_abs *= h;
    res_asc *= h;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Panel { a, b, value, error }
}

/// Sorted, deduplicated panel boundaries inside `[a, b]` including both ends.
fn panel_boundaries(a: f64, b: f64, hints: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = hints.iter().copied().filter(|x| x.is_finite() && *x > a && *x < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    let min_gap = 1e-12 * (b - a);
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last() {
            Some(&last) if p - last <= min_gap && p != b => {}
            Some(&last) if p - last <= min_gap => {
                out.pop();
                out.push(p);
            }
            _ => out.push(p),
        }
    }
    if out.len() < 2 {
        out = alloc::vec![a, b];
    }
    out
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`, with the
/// initial panels split at `hints`.
pub fn integrate_interval<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    hints: &[f64],
    rel_tol: f64,
    max_panels: usize,
) -> IntegralResult {
    let bounds = panel_boundaries(a, b, hints);
    let mut heap: BinaryHeap<Panel> = bounds.windows(2).map(|w| gauss_kronrod_15(&mut f, w[0], w[1])).collect();
    let max_panels = max_panels.max(heap.len());
    let mut total: f64 = heap.iter().map(|p| p.value).sum();
    let mut err: f64 = heap.iter().map(|p| p.error).sum();
    let mut converged = false;
    loop {
        if !(err.is_finite() && total.is_finite()) || err <= rel_tol * total.abs() {
            // resynchronize the running sums before trusting them
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.error).sum();
            if err <= rel_tol * total.abs() {
                converged = true;
                break;
            }
        }
        if heap.len() >= max_panels {
            break;
        }
        let worst = heap.pop().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            heap.push(worst);
            break;
        }
        let left = gauss_kronrod_15(&mut f, worst.a, mid);
        let right = gauss_kronrod_15(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
    let errors: Vec<f64> = panels.iter().map(|p| p.error).collect();
    let value = pairwise_sum(&values);
    let est_error = pairwise_sum(&errors);
    IntegralResult {
        value,
        est_error,
        panels_used: panels.len(),
        converged: converged && est_error <= rel_tol * value.abs(),
    }
}

/// Adaptive integral of `g` over the real line through `v = tan θ`.
/// `hints` are points on the real line where `g` has structure.
pub fn integrate_real_line<G: FnMut(f64) -> f64>(
    mut g: G,
    hints: &[f64],
    rel_tol: f64,
    max_panels: usize,
) -> IntegralResult {
    let mapped: Vec<f64> = hints.iter().map(|v| v.atan()).collect();
    integrate_interval(
        |theta| {
            let c = theta.cos();
            g(theta.tan()) / (c * c)
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        &mapped,
        rel_tol,
        max_panels,
    )
}

/// `∫ dx / |a x + b|² = π / Im(conj(b) a)`.
pub fn cauchy_integral_closed(a: Complex64, b: Complex64) -> Result<f64> {
    let s = (b.conj() * a).im;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("Im(conj(b) a) = {s:e} must be positive")));
    }
    Ok(PI / s)
}

/// `∫ dx / (a x² + b x + c) = 2π / √(4ac - b²)`.
pub fn quadratic_integral_closed(a: f64, b: f64, c: f64) -> Result<f64> {
    let delta = 4.0 * a * c - b * b;
    if !(a > 0.0) || !(delta > 0.0) {
        return Err(Error::Domain(format!("need a > 0 and 4ac - b^2 > 0, got a = {a}, 4ac - b^2 = {delta}")));
    }
    Ok(2.0 * PI / delta.sqrt())
}

fn check_vector(a: &HerglotzMatrix, v: &[f64]) -> Result<()> {
    if v.len() != a.dim() {
        return Err(Error::InvalidInput(format!("point of length {} for a {}x{} matrix", v.len(), a.dim(), a.dim())));
    }
    Ok(())
}

fn det_im(a: &HerglotzMatrix) -> f64 {
    imag_part(a.matrix()).det().re
}

/// `det Im[diag(v) - A]^{-1}`, evaluated as `det Im A · |det(A - diag v)|^{-2}`.
///
/// Debug builds also evaluate the resolvent route and assert agreement to `1e-8`.
pub fn minami_integrand(a: &HerglotzMatrix, v: &[f64]) -> Result<f64> {
    check_vector(a, v)?;
    let d = a.matrix().sub_real_diagonal(v)?.log_det();
    let value = det_im(a) * (-2.0 * d.log_abs).exp();
    #[cfg(debug_assertions)]
    if let Ok(other) = minami_integrand_via_resolvent(a, v) {
        let gap = (value - other).abs() / value.abs().max(other.abs());
        debug_assert!(gap <= 1e-8, "integrand routes disagree: {value:e} vs {other:e}");
    }
    Ok(value)
}

/// `det Im[(diag(v) - A)^{-1}]` computed from the explicit resolvent.
pub fn minami_integrand_via_resolvent(a: &HerglotzMatrix, v: &[f64]) -> Result<f64> {
    check_vector(a, v)?;
    let x = ComplexSquareMatrix::from_real_diagonal(v).sub(a.matrix())?;
    let inv = x.lu()?.inverse()?;
    Ok(imag_part(&inv).det().re)
}

/// Single-site measure used on every axis of a Minami integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SiteMeasure {
    /// Plain Lebesgue measure on the real line.
    Lebesgue,
    /// Uniform probability density `1/width` on `[-width/2, width/2]`.
    Uniform { width: f64 },
    /// Centered normal density with standard deviation `sigma`.
    Gaussian { sigma: f64 },
}

impl SiteMeasure {
    fn density(&self, v: f64) -> f64 {
        match *self {
            SiteMeasure::Lebesgue => 1.0,
            SiteMeasure::Uniform { width } => 1.0 / width,
            SiteMeasure::Gaussian { sigma } => {
                let z = v / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            SiteMeasure::Lebesgue => Ok(()),
            SiteMeasure::Uniform { width: s } | SiteMeasure::Gaussian { sigma: s } => {
                if s > 0.0 && s.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidInput(format!("measure scale must be positive, got {s}")))
                }
            }
        }
    }
}

struct NestedMinami {
    n: usize,
    a: [Complex64; 16],
    det_im: f64,
    measure: SiteMeasure,
    rel_tol: f64,
    max_panels: usize,
    hints: [[f64; 7]; MAX_QUADRATURE_DIM],
}

impl NestedMinami {
    fn new(a: &HerglotzMatrix, measure: SiteMeasure, cfg: &QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        measure.validate()?;
        let n = a.dim();
        if n > MAX_QUADRATURE_DIM {
            return Err(Error::UnsupportedDimension { n, max: MAX_QUADRATURE_DIM });
        }
        let mut buf = [Complex64::new(0.0, 0.0); 16];
        for i in 0..n {
            for j in 0..n {
                buf[i * n + j] = a.get(i, j);
            }
        }
        let width = a.certified_min_eig();
        let mut hints = [[0.0; 7]; MAX_QUADRATURE_DIM];
        for (k, h) in hints.iter_mut().enumerate().take(n) {
            let c = a.get(k, k).re;
            *h = [c, c - width, c + width, c - 10.0 * width, c + 10.0 * width, c - a.get(k, k).im, c + a.get(k, k).im];
        }
        Ok(Self {
            n,
            a: buf,
            det_im: det_im(a),
            measure,
            rel_tol: cfg.rel_tol,
            max_panels: cfg.max_panels_per_axis,
            hints,
        })
    }

    /// `(α, β)` with `det(A_m - diag(v, t)) = α - t β`, where `A_m` is the
    /// leading `m×m` block and `v` holds its first `m - 1` diagonal shifts.
    fn linear_split(&self, m: usize, v: &[f64]) -> (Complex64, Complex64) {
        let n = self.n;
        let mut full = [Complex64::new(0.0, 0.0); 16];
        for i in 0..m {
            for j in 0..m {
                full[i * m + j] = self.a[i * n + j];
            }
        }
        for (i, vi) in v.iter().enumerate().take(m - 1) {
            full[i * m + i] -= Complex64::new(*vi, 0.0);
        }
        let alpha = small_det(m, &full);
        let beta = if m == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            let k = m - 1;
            let mut minor = [Complex64::new(0.0, 0.0); 16];
            for i in 0..k {
                for j in 0..k {
                    minor[i * k + j] = full[i * m + j];
                }
            }
            small_det(k, &minor)
        };
        (alpha, beta)
    }

    fn axis_hints(&self, level: usize, v: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.hints[level].to_vec();
        // pole of the leading (level+1)-minor in the current variable
        let (alpha, beta) = self.linear_split(level + 1, v);
        if beta.norm() > 0.0 {
            let w = alpha / beta;
            let r = w.im.abs();
            out.extend_from_slice(&[w.re, w.re - r, w.re + r, w.re - 10.0 * r, w.re + 10.0 * r]);
        }
        if let SiteMeasure::Gaussian { sigma } = self.measure {
            out.extend_from_slice(&[0.0, -sigma, sigma, -3.0 * sigma, 3.0 * sigma]);
        }
        out
    }

    fn integrate_axis<G: FnMut(f64) -> f64>(&self, mut g: G, hints: &[f64], rel_tol: f64) -> IntegralResult {
        let measure = self.measure;
        match measure {
            SiteMeasure::Uniform { width } => integrate_interval(
                |t| measure.density(t) * g(t),
                -0.5 * width,
                0.5 * width,
                hints,
                rel_tol,
                self.max_panels,
            ),
            _ => integrate_real_line(|t| measure.density(t) * g(t), hints, rel_tol, self.max_panels),
        }
    }

    /// Integral over axes `level..n` with the first `level` coordinates fixed.
    /// `converged` covers every inner integral as well.
    fn level(&self, level: usize, v: &mut [f64; MAX_QUADRATURE_DIM]) -> IntegralResult {
        let n = self.n;
        let rel_tol = if level == 0 { 0.5 * self.rel_tol } else { 0.05 * self.rel_tol };
        let hints = self.axis_hints(level, &v[..level]);
        if level + 1 == n {
            let (alpha, beta) = self.linear_split(n, &v[..level]);
            let det_im = self.det_im;
            return self.integrate_axis(|t| det_im / (alpha - beta * t).norm_sqr(), &hints, rel_tol);
        }
        let mut point = *v;
        let mut inner_ok = true;
        let res = self.integrate_axis(
            |t| {
                point[level] = t;
                let r = self.level(level + 1, &mut point);
                inner_ok &= r.converged;
                r.value
            },
            &hints,
            rel_tol,
        );
        IntegralResult { converged: res.converged && inner_ok, ..res }
    }
}

fn nested_integral(a: &HerglotzMatrix, measure: SiteMeasure, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    let problem = NestedMinami::new(a, measure, cfg)?;
    let mut v = [0.0; MAX_QUADRATURE_DIM];
    Ok(problem.level(0, &mut v))
}

/// `π^n`, the bound on the `n`-dimensional Minami integral.
pub fn minami_bound(n: usize) -> f64 {
    PI.powi(n as i32)
}

/// `∫ dv₁…dvₙ det Im[diag(v) - A]^{-1}` over `ℝⁿ`, for `n <= 4`.
pub fn integrate_minami_nd(a: &HerglotzMatrix, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    nested_integral(a, SiteMeasure::Lebesgue, cfg)
}

/// `∫ ρ(v₁)…ρ(vₙ) det Im[diag(v) - A]^{-1} dv` for a product single-site measure.
pub fn integrate_minami_weighted(
    a: &HerglotzMatrix,
    measure: SiteMeasure,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    nested_integral(a, measure, cfg)
}

/// Both sides of the inductive inequality
/// `∫ dv det Im[diag(v_fixed, v) - A]^{-1} <= π det Im(-B^{-1})`,
/// with `B` the last-pivot Schur complement of `A - diag(v_fixed, 0)`.
pub fn verify_induction_step(a: &HerglotzMatrix, v_fixed: &[f64], cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    let n = a.dim();
    if n < 2 {
        return Err(Error::InvalidInput("induction step needs n >= 2".into()));
    }
    if v_fixed.len() != n - 1 {
        return Err(Error::InvalidInput(format!("v_fixed must have length {}, got {}", n - 1, v_fixed.len())));
    }
    let mut shift: Vec<f64> = v_fixed.to_vec();
    shift.push(0.0);
    let shifted = a.sub_real_diagonal(&shift)?;

    let lu_minor = shifted.restrict(&(0..n - 1).collect::<Vec<_>>())?.matrix().det();
    let alpha = shifted.matrix().det();
    let mut hints = Vec::new();
    if lu_minor.norm() > 0.0 {
        let w = alpha / lu_minor;
        let r = w.im.abs();
        hints.extend_from_slice(&[w.re, w.re - r, w.re + r, w.re - 10.0 * r, w.re + 10.0 * r]);
    }
    let mut point = alloc::vec![0.0; n];
    let lhs = integrate_real_line(
        |t| {
            point[n - 1] = t;
            minami_integrand(&shifted, &point).unwrap_or(f64::NAN)
        },
        &hints,
        0.1 * cfg.rel_tol,
        cfg.max_panels_per_axis,
    );
    if !lhs.converged {
        return Err(Error::Inconsistent(format!("inner quadrature did not converge (value {:e})", lhs.value)));
    }
    let b = shifted.schur_complement_last()?;
    let neg_b_inv = b.neg_inverse()?;
    let rhs = PI * imag_part(neg_b_inv.matrix()).det().re;
    Ok((lhs.value, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herglotz::sample_random_herglotz;
    use crate::lemma::lemma1_value;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn herglotz(n: usize, entries: &[Complex64]) -> HerglotzMatrix {
        HerglotzMatrix::new(ComplexSquareMatrix::new(n, entries.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::new(1e-7, 2048).is_ok());
        assert!(QuadratureConfig::new(1e-13, 2048).is_err());
        assert!(QuadratureConfig::new(0.1, 2048).is_err());
        assert!(QuadratureConfig::new(1e-7, 4).is_err());
    }

    #[test]
    fn closed_form_examples() {
        assert!((cauchy_integral_closed(c(1.0, 0.0), c(0.0, -1.0)).unwrap() - PI).abs() < 1e-15);
        assert!((cauchy_integral_closed(c(2.0, 0.0), c(0.0, -2.0)).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!(matches!(cauchy_integral_closed(c(1.0, 0.0), c(0.0, 1.0)), Err(Error::Domain(_))));
        assert!((quadratic_integral_closed(1.0, 0.0, 1.0).unwrap() - PI).abs() < 1e-15);
        assert!((quadratic_integral_closed(1.0, 2.0, 2.0).unwrap() - PI).abs() < 1e-15);
        assert!(matches!(quadratic_integral_closed(1.0, 0.0, 0.0), Err(Error::Domain(_))));
        assert!(quadratic_integral_closed(-1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn adaptive_rule_on_known_integrals() {
        let r = integrate_interval(|x| x.exp(), 0.0, 1.0, &[], 1e-12, 64);
        assert!(r.converged);
        assert!((r.value - (1f64.exp() - 1.0)).abs() < 1e-14);
        let r = integrate_real_line(|x| 1.0 / (1.0 + x * x), &[], 1e-10, 256);
        assert!((r.value - PI).abs() < 1e-12);
        // narrow Lorentzian found through hints
        let w = 1e-4;
        let r = integrate_real_line(|x| w / ((x - 3.0) * (x - 3.0) + w * w), &[3.0, 3.0 - w, 3.0 + w], 1e-10, 2048);
        assert!(r.converged && (r.value - PI).abs() < 1e-9);
    }

    #[test]
    fn non_convergence_is_reported() {
        let r = integrate_interval(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &[], 1e-11, 8);
        assert!(!r.converged);
        assert_eq!(r.panels_used, 8);
    }

    #[test]
    fn integrand_examples() {
        let a = herglotz(2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        assert!((minami_integrand(&a, &[0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        let a1 = herglotz(1, &[c(0.0, 1.0)]);
        for t in [-3.0, 0.0, 0.5, 10.0] {
            assert!((minami_integrand(&a1, &[t]).unwrap() - 1.0 / (t * t + 1.0)).abs() < 1e-15);
        }
        let j = herglotz(2, &[c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        assert!((minami_integrand(&j, &[0.0, 0.0]).unwrap() - 0.75).abs() < 1e-15);
        assert!(minami_integrand(&j, &[0.0]).is_err());
    }

    #[test]
    fn integrand_routes_agree() {
        for seed in 0..50 {
            let a = sample_random_herglotz(1 + (seed as usize % 4), seed, 1.0).unwrap();
            let v: Vec<f64> = (0..a.dim()).map(|k| (seed as f64 * 0.37 + k as f64).sin() * 3.0).collect();
            let x = minami_integrand(&a, &v).unwrap();
            let y = minami_integrand_via_resolvent(&a, &v).unwrap();
            assert!(x > 0.0);
            assert!((x - y).abs() <= 1e-8 * x, "seed {seed}: {x} vs {y}");
        }
    }

    #[test]
    fn one_dimensional_minami_integral_is_pi() {
        let cfg = QuadratureConfig::default();
        for a in [c(0.0, 1.0), c(3.0, 0.01), c(-20.0, 50.0)] {
            let r = integrate_minami_nd(&herglotz(1, &[a]), &cfg).unwrap();
            assert!(r.converged);
            assert!((r.value - PI).abs() <= 1e-8 * PI, "{a}: {}", r.value);
        }
    }

    #[test]
    fn two_dimensional_matches_closed_form() {
        let cfg = QuadratureConfig::default();
        let j = herglotz(2, &[c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        let r = integrate_minami_nd(&j, &cfg).unwrap();
        assert!(r.converged);
        assert!((r.value - 0.75 * PI * PI).abs() <= 5e-7 * r.value);
        for seed in 0..10 {
            let a = sample_random_herglotz(2, seed, 1.0).unwrap();
            let q = integrate_minami_nd(&a, &cfg).unwrap();
            let exact = lemma1_value(&a).unwrap().value;
            assert!((q.value - exact).abs() <= 5.0 * cfg.rel_tol * exact, "seed {seed}: {} vs {exact}", q.value);
        }
    }

    #[test]
    fn three_dimensional_diagonal_is_pi_cubed() {
        let cfg = QuadratureConfig::default();
        let a = HerglotzMatrix::new(ComplexSquareMatrix::scalar(3, c(0.0, 1.0))).unwrap();
        let r = integrate_minami_nd(&a, &cfg).unwrap();
        assert!((r.value - PI.powi(3)).abs() <= cfg.rel_tol * PI.powi(3));
    }

    #[test]
    fn dimension_cap() {
        let a = HerglotzMatrix::new(ComplexSquareMatrix::scalar(5, c(0.0, 1.0))).unwrap();
        assert_eq!(
            integrate_minami_nd(&a, &QuadratureConfig::default()),
            Err(Error::UnsupportedDimension { n: 5, max: 4 })
        );
    }

    #[test]
    fn induction_step_examples() {
        let cfg = QuadratureConfig::default();
        let a = HerglotzMatrix::new(ComplexSquareMatrix::scalar(2, c(0.0, 1.0))).unwrap();
        let (lhs, rhs) = verify_induction_step(&a, &[0.0], &cfg).unwrap();
        assert!((lhs - PI).abs() < 1e-8 && (rhs - PI).abs() < 1e-12);
        assert!(verify_induction_step(&a, &[], &cfg).is_err());
        let one = HerglotzMatrix::new(ComplexSquareMatrix::scalar(1, c(0.0, 1.0))).unwrap();
        assert!(verify_induction_step(&one, &[], &cfg).is_err());
    }

    #[test]
    fn weighted_uniform_matches_arctan() {
        // n = 1, A = a: ∫_{-W/2}^{W/2} (1/W) Im a / |v - a|² dv
        let cfg = QuadratureConfig::default();
        let a = c(0.3, 0.2);
        let w = 4.0;
        let r = integrate_minami_weighted(&herglotz(1, &[a]), SiteMeasure::Uniform { width: w }, &cfg).unwrap();
        let exact = (((0.5 * w - a.re) / a.im).atan() - ((-0.5 * w - a.re) / a.im).atan()) / w;
        assert!((r.value - exact).abs() <= 1e-9 * exact);
    }
}
