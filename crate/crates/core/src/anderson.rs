//! Finite-box Anderson Hamiltonians `H = K + V` with nearest-neighbour
//! hopping, optional magnetic flux (Peierls phases in Landau gauge), their
//! resolvent blocks, and the Krein reduction to a Herglotz matrix.
//!
//! Sites are indexed row-major: for sides `(s₀, …, s_{d-1})` the coordinate
//! `(c₀, …, c_{d-1})` has index `((c₀ s₁ + c₁) s₂ + …)`. In two dimensions `c₀`
//! is the row and `c₁` the column; bonds along a row carry the phase
//! `e^{-2πiφ c₀}` on the matrix element `K(x, x + ê₁)`, bonds along a column
//! carry none. With this choice the ordered product of matrix elements
//! `K(r₀,r₁)K(r₁,r₂)K(r₂,r₃)K(r₃,r₀)` around a unit plaquette traversed
//! `(c₀,c₁) → (c₀,c₁+1) → (c₀+1,c₁+1) → (c₀+1,c₁)` equals `t⁴ e^{2πiφ}`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::herglotz::{imag_part, HerglotzMatrix};
use crate::matrix::ComplexSquareMatrix;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

/// Largest supported box; the resolvent is computed densely.
pub const MAX_SITES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBox {
    sides: Vec<usize>,
    boundary: Boundary,
}

impl LatticeBox {
    pub fn new(sides: Vec<usize>, boundary: Boundary) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::InvalidConfig("lattice dimension must be at least 1".into()));
        }
        if sides.contains(&0) {
            return Err(Error::InvalidConfig("every side must be positive".into()));
        }
        let count = sides.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s));
        match count {
            Some(c) if c <= MAX_SITES => Ok(Self { sides, boundary }),
            _ => Err(Error::InvalidConfig(format!("box exceeds {MAX_SITES} sites"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[usize] {
        &self.sides
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn site_count(&self) -> usize {
        self.sides.iter().product()
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.sides).fold(0, |acc, (c, s)| acc * s + c)
    }

    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for (slot, s) in out.iter_mut().zip(&self.sides).rev() {
            *slot = index % s;
            index /= s;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Gauge {
    Landau,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HoppingSpec {
    /// `t >= 0`; zero switches hopping off.
    pub amplitude: f64,
    /// Flux per plaquette in units of the flux quantum, in `[0, 1)`.
    pub flux_per_plaquette: f64,
    pub gauge: Gauge,
    /// Adds `2 d t` on the diagonal so that `K = -Δ` at zero flux.
    pub laplacian_shift: bool,
}

impl HoppingSpec {
    pub fn new(amplitude: f64, flux_per_plaquette: f64) -> Self {
        Self { amplitude, flux_per_plaquette, gauge: Gauge::Landau, laplacian_shift: true }
    }

    fn validate(&self, lattice: &LatticeBox) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "hopping amplitude must be non-negative, got {}",
                self.amplitude
            )));
        }
        let phi = self.flux_per_plaquette;
        if !(0.0..1.0).contains(&phi) {
            return Err(Error::InvalidConfig(format!("flux {phi} outside [0, 1)")));
        }
        if phi != 0.0 && lattice.dim() != 2 {
            return Err(Error::InvalidConfig("magnetic flux is only supported for d = 2".into()));
        }
        if phi != 0.0 && lattice.boundary() == Boundary::Periodic {
            let rows = lattice.sides()[0] as f64;
            let q = phi * rows;
            if (q - q.round()).abs() > 1e-9 {
                return Err(Error::InvalidConfig(format!(
                    "periodic Landau gauge needs flux x rows to be an integer, got {phi} x {rows}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum PotentialDistribution {
    /// Uniform on `[-width/2, width/2]`.
    Uniform { width: f64 },
    /// Centered normal.
    Gaussian { sigma: f64 },
}

impl PotentialDistribution {
    pub fn validate(&self) -> Result<()> {
        let s = match *self {
            PotentialDistribution::Uniform { width } => width,
            PotentialDistribution::Gaussian { sigma } => sigma,
        };
        if s > 0.0 && s.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("distribution scale must be positive, got {s}")))
        }
    }

    /// `‖ρ‖∞`.
    pub fn density_sup(&self) -> f64 {
        match *self {
            PotentialDistribution::Uniform { width } => 1.0 / width,
            PotentialDistribution::Gaussian { sigma } => 1.0 / (sigma * (2.0 * PI).sqrt()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            PotentialDistribution::Uniform { width } => width * (rng.random::<f64>() - 0.5),
            PotentialDistribution::Gaussian { sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                sigma * z
            }
        }
    }
}

/// Complex energy with strictly positive imaginary part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralParameter(Complex64);

impl SpectralParameter {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.im > 0.0 && z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidConfig(format!("spectral parameter needs Im z > 0, got {z}")));
        }
        Ok(Self(z))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

/// Dense `H = K + diag(V)`, Hermitian bit for bit.
pub fn build_hamiltonian(lattice: &LatticeBox, hop: &HoppingSpec, potential: &[f64]) -> Result<ComplexSquareMatrix> {
    hop.validate(lattice)?;
    let n = lattice.site_count();
    if potential.len() != n {
        return Err(Error::InvalidConfig(format!("{} potential values for {n} sites", potential.len())));
    }
    if potential.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("potential values must be finite".into()));
    }
    let d = lattice.dim();
    let t = hop.amplitude;
    let shift = if hop.laplacian_shift { 2.0 * d as f64 * t } else { 0.0 };
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for x in 0..n {
        data[x * n + x] = Complex64::new(potential[x] + shift, 0.0);
        let coords = lattice.coords(x);
        for axis in 0..d {
            let side = lattice.sides()[axis];
            let mut next = coords.clone();
            if coords[axis] + 1 < side {
                next[axis] += 1;
            } else if lattice.boundary() == Boundary::Periodic && side >= 3 {
                next[axis] = 0;
            } else {
                continue;
            }
            let y = lattice.index(&next);
            let phase = if d == 2 && axis == 1 { -2.0 * PI * hop.flux_per_plaquette * coords[0] as f64 } else { 0.0 };
            let element = Complex64::from_polar(-t, phase);
            data[x * n + y] += element;
            data[y * n + x] += element.conj();
        }
    }
    ComplexSquareMatrix::new(n, data)
}

/// Normalized product `K(r₀,r₁)K(r₁,r₂)K(r₂,r₃)K(r₃,r₀) / |…|` around the
/// plaquette whose lower-left corner is `(row, col)`.
pub fn plaquette_phase(lattice: &LatticeBox, h: &ComplexSquareMatrix, row: usize, col: usize) -> Result<Complex64> {
    if lattice.dim() != 2 {
        return Err(Error::InvalidInput("plaquettes need a two-dimensional box".into()));
    }
    let (rows, cols) = (lattice.sides()[0], lattice.sides()[1]);
    let wrap = lattice.boundary() == Boundary::Periodic;
    let step = |c: usize, side: usize| -> Option<usize> {
        if c + 1 < side {
            Some(c + 1)
        } else if wrap && side >= 3 {
            Some(0)
        } else {
            None
        }
    };
    let (r1, c1) = match (row < rows, col < cols, step(row, rows), step(col, cols)) {
        (true, true, Some(r), Some(c)) => (r, c),
        _ => return Err(Error::InvalidInput(format!("no plaquette at ({row}, {col})"))),
    };
    let corners =
        [lattice.index(&[row, col]), lattice.index(&[row, c1]), lattice.index(&[r1, c1]), lattice.index(&[r1, col])];
    let mut prod = Complex64::new(1.0, 0.0);
    for k in 0..4 {
        prod *= h.get(corners[k], corners[(k + 1) % 4]);
    }
    let r = prod.norm();
    if r == 0.0 {
        return Err(Error::InvalidInput("plaquette has a missing bond".into()));
    }
    Ok(prod / r)
}

fn check_sites(lattice: &LatticeBox, sites: &[usize]) -> Result<()> {
    if sites.is_empty() {
        return Err(Error::InvalidConfig("site subset must be nonempty".into()));
    }
    let n = lattice.site_count();
    for (k, &s) in sites.iter().enumerate() {
        if s >= n {
            return Err(Error::InvalidConfig(format!("site {s} outside the box of {n} sites")));
        }
        if sites[..k].contains(&s) {
            return Err(Error::InvalidConfig(format!("site {s} listed twice")));
        }
    }
    Ok(())
}

/// The `S×S` block of `(H - z)^{-1}`.
pub fn green_block(h: &ComplexSquareMatrix, z: SpectralParameter, sites: &[usize]) -> Result<ComplexSquareMatrix> {
    let n = h.dim();
    for (k, &s) in sites.iter().enumerate() {
        if s >= n || sites[..k].contains(&s) {
            return Err(Error::InvalidInput(format!("invalid site {s}")));
        }
    }
    if sites.is_empty() {
        return Err(Error::InvalidInput("site subset must be nonempty".into()));
    }
    let shifted = h.sub(&ComplexSquareMatrix::scalar(n, z.value()))?;
    let lu = shifted.lu()?;
    let m = sites.len();
    let mut data = vec![Complex64::new(0.0, 0.0); m * m];
    for (j, &sj) in sites.iter().enumerate() {
        let col = lu.inverse_column(sj);
        for (i, &si) in sites.iter().enumerate() {
            data[i * m + j] = col[si];
        }
    }
    ComplexSquareMatrix::new(m, data)
}

/// The Herglotz matrix `A` with `-A^{-1}` equal to the `S×S` block of
/// `(Ĥ - z)^{-1}`, where `Ĥ` is `H` with the potential on `S` set to zero.
pub fn krein_matrix(
    lattice: &LatticeBox,
    hop: &HoppingSpec,
    potential: &[f64],
    z: SpectralParameter,
    sites: &[usize],
) -> Result<HerglotzMatrix> {
    check_sites(lattice, sites)?;
    let mut reduced = potential.to_vec();
    if reduced.len() != lattice.site_count() {
        return Err(Error::InvalidConfig(format!(
            "{} potential values for {} sites",
            reduced.len(),
            lattice.site_count()
        )));
    }
    for &s in sites {
        reduced[s] = 0.0;
    }
    let h_hat = build_hamiltonian(lattice, hop, &reduced)?;
    let block = green_block(&h_hat, z, sites)?;
    HerglotzMatrix::new(block)?.neg_inverse()
}

/// `(Im G_S, Im[diag(V_S) - A]^{-1})`, which agree entrywise.
pub fn krein_consistency(
    lattice: &LatticeBox,
    hop: &HoppingSpec,
    potential: &[f64],
    z: SpectralParameter,
    sites: &[usize],
) -> Result<(ComplexSquareMatrix, ComplexSquareMatrix)> {
    check_sites(lattice, sites)?;
    let h = build_hamiltonian(lattice, hop, potential)?;
    let lhs = imag_part(&green_block(&h, z, sites)?);
    let a = krein_matrix(lattice, hop, potential, z, sites)?;
    let v_s: Vec<f64> = sites.iter().map(|&s| potential[s]).collect();
    let resolvent = ComplexSquareMatrix::from_real_diagonal(&v_s).sub(a.matrix())?.inverse()?;
    Ok((lhs, imag_part(&resolvent)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herglotz::is_herglotz;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn indexing_is_row_major_and_bijective() {
        let b = LatticeBox::new(vec![3, 4, 2], Boundary::Open).unwrap();
        assert_eq!(b.site_count(), 24);
        assert_eq!(b.index(&[1, 2, 1]), (4 + 2) * 2 + 1);
        for i in 0..b.site_count() {
            assert_eq!(b.index(&b.coords(i)), i);
        }
        assert!(LatticeBox::new(vec![], Boundary::Open).is_err());
        assert!(LatticeBox::new(vec![2, 0], Boundary::Open).is_err());
        assert!(LatticeBox::new(vec![100, 100], Boundary::Open).is_err());
    }

    #[test]
    fn two_site_chain() {
        let b = LatticeBox::new(vec![2], Boundary::Open).unwrap();
        let h = build_hamiltonian(&b, &HoppingSpec::new(1.0, 0.0), &[0.0, 0.0]).unwrap();
        let expected = ComplexSquareMatrix::new(2, vec![c(2.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert_eq!(h, expected);
        let mut hop = HoppingSpec::new(1.0, 0.0);
        hop.laplacian_shift = false;
        let h = build_hamiltonian(&b, &hop, &[0.5, 0.0]).unwrap();
        assert_eq!(h.get(0, 0), c(0.5, 0.0));
    }

    #[test]
    fn periodic_ring_wraps() {
        let b = LatticeBox::new(vec![4], Boundary::Periodic).unwrap();
        let h = build_hamiltonian(&b, &HoppingSpec::new(1.0, 0.0), &[0.0; 4]).unwrap();
        assert_eq!(h.get(0, 3), c(-1.0, 0.0));
        assert_eq!(h.get(3, 0), c(-1.0, 0.0));
    }

    #[test]
    fn zero_flux_is_real_symmetric() {
        let b = LatticeBox::new(vec![2, 2], Boundary::Open).unwrap();
        let h = build_hamiltonian(&b, &HoppingSpec::new(1.0, 0.0), &[0.1, -0.2, 0.3, 0.0]).unwrap();
        assert!(h.is_exactly_symmetric());
        assert!(h.is_exactly_hermitian());
        assert!(h.entries().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn flux_breaks_symmetry_but_not_hermiticity() {
        let b = LatticeBox::new(vec![3, 3], Boundary::Open).unwrap();
        let h = build_hamiltonian(&b, &HoppingSpec::new(1.0, 0.25), &[0.0; 9]).unwrap();
        assert!(h.is_exactly_hermitian());
        assert!(!h.is_exactly_symmetric());
    }

    #[test]
    fn plaquette_phase_equals_flux() {
        for (sides, boundary, phi) in [
            (vec![2, 2], Boundary::Open, 0.25),
            (vec![4, 5], Boundary::Open, 0.125),
            (vec![4, 4], Boundary::Periodic, 0.25),
            (vec![3, 3], Boundary::Open, 0.0),
        ] {
            let b = LatticeBox::new(sides.clone(), boundary).unwrap();
            let h = build_hamiltonian(&b, &HoppingSpec::new(0.7, phi), &vec![0.0; b.site_count()]).unwrap();
            let expected = Complex64::from_polar(1.0, 2.0 * PI * phi);
            let (rows, cols) = (sides[0], sides[1]);
            let (pr, pc) = if boundary == Boundary::Periodic { (rows, cols) } else { (rows - 1, cols - 1) };
            for r in 0..pr {
                for col in 0..pc {
                    let p = plaquette_phase(&b, &h, r, col).unwrap();
                    assert!((p - expected).norm() < 1e-12, "{sides:?} at ({r},{col}): {p}");
                }
            }
        }
    }

    #[test]
    fn flux_validation() {
        let b1 = LatticeBox::new(vec![4], Boundary::Open).unwrap();
        assert!(build_hamiltonian(&b1, &HoppingSpec::new(1.0, 0.25), &[0.0; 4]).is_err());
        let bp = LatticeBox::new(vec![3, 3], Boundary::Periodic).unwrap();
        assert!(build_hamiltonian(&bp, &HoppingSpec::new(1.0, 0.25), &[0.0; 9]).is_err());
        let b2 = LatticeBox::new(vec![2, 2], Boundary::Open).unwrap();
        assert!(build_hamiltonian(&b2, &HoppingSpec::new(1.0, 1.0), &[0.0; 4]).is_err());
        assert!(build_hamiltonian(&b2, &HoppingSpec::new(-1.0, 0.0), &[0.0; 4]).is_err());
        assert!(build_hamiltonian(&b2, &HoppingSpec::new(1.0, 0.0), &[0.0; 3]).is_err());
    }

    #[test]
    fn distributions() {
        assert_eq!(PotentialDistribution::Uniform { width: 4.0 }.density_sup(), 0.25);
        let g = PotentialDistribution::Gaussian { sigma: 2.0 }.density_sup();
        assert!((g - 1.0 / (2.0 * (2.0 * PI).sqrt())).abs() < 1e-16);
        assert!(PotentialDistribution::Uniform { width: 0.0 }.validate().is_err());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        use rand::SeedableRng;
        let u = PotentialDistribution::Uniform { width: 2.0 };
        assert!((0..1000).map(|_| u.sample(&mut rng)).all(|v| (-1.0..=1.0).contains(&v)));
    }

    #[test]
    fn single_site_green_function() {
        let h = ComplexSquareMatrix::zeros(1);
        let z = SpectralParameter::new(c(0.0, 1.0)).unwrap();
        let g = green_block(&h, z, &[0]).unwrap();
        assert!((g.get(0, 0) - c(0.0, 1.0)).norm() < 1e-15);
        assert!(SpectralParameter::new(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn diagonal_hamiltonian_green_block() {
        let h = ComplexSquareMatrix::from_real_diagonal(&[1.0, -2.0, 0.5]);
        let z = SpectralParameter::new(c(0.3, 0.7)).unwrap();
        let g = green_block(&h, z, &[2, 0]).unwrap();
        assert!((g.get(0, 0) - (c(0.5, 0.0) - z.value()).inv()).norm() < 1e-15);
        assert!((g.get(1, 1) - (c(1.0, 0.0) - z.value()).inv()).norm() < 1e-15);
        assert_eq!(g.get(0, 1), c(0.0, 0.0));
    }

    #[test]
    fn single_site_krein_matrix_is_z() {
        let b = LatticeBox::new(vec![1], Boundary::Open).unwrap();
        let mut hop = HoppingSpec::new(1.0, 0.0);
        hop.laplacian_shift = false;
        let z = SpectralParameter::new(c(0.4, 0.9)).unwrap();
        let a = krein_matrix(&b, &hop, &[1.7], z, &[0]).unwrap();
        assert!((a.get(0, 0) - z.value()).norm() < 1e-14);
    }

    #[test]
    fn krein_consistency_on_chain() {
        let b = LatticeBox::new(vec![8], Boundary::Open).unwrap();
        let v = [0.3, -1.2, 1.9, 0.4, -0.8, 1.1, -1.7, 0.2];
        let z = SpectralParameter::new(c(1.0, 0.5)).unwrap();
        let (lhs, rhs) = krein_consistency(&b, &HoppingSpec::new(1.0, 0.0), &v, z, &[2, 5]).unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-10);
        let h = build_hamiltonian(&b, &HoppingSpec::new(1.0, 0.0), &v).unwrap();
        let g = green_block(&h, z, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert!(is_herglotz(&g, 1e-12));
    }

    #[test]
    fn krein_consistency_full_box() {
        let b = LatticeBox::new(vec![3, 3], Boundary::Open).unwrap();
        let v: Vec<f64> = (0..9).map(|i| (i as f64 * 0.7).sin()).collect();
        let z = SpectralParameter::new(c(4.0, 0.5)).unwrap();
        let all: Vec<usize> = (0..9).collect();
        let hop = HoppingSpec::new(1.0, 0.25);
        let (lhs, rhs) = krein_consistency(&b, &hop, &v, z, &all).unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-10);
        // with S = Λ, A = z - K
        let a = krein_matrix(&b, &hop, &v, z, &all).unwrap();
        let k = build_hamiltonian(&b, &hop, &[0.0; 9]).unwrap();
        let expected = ComplexSquareMatrix::scalar(9, z.value()).sub(&k).unwrap();
        assert!(a.matrix().sub(&expected).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn krein_with_no_hopping_is_diagonal() {
        let b = LatticeBox::new(vec![3], Boundary::Open).unwrap();
        let v = [0.5, -0.25, 1.0];
        let hop = HoppingSpec::new(0.0, 0.0);
        let z = SpectralParameter::new(c(0.0, 1.0)).unwrap();
        let (lhs, rhs) = krein_consistency(&b, &hop, &v, z, &[0, 2]).unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-15);
        assert_eq!(lhs.get(0, 1), c(0.0, 0.0));
    }

    #[test]
    fn site_validation() {
        let b = LatticeBox::new(vec![4], Boundary::Open).unwrap();
        let z = SpectralParameter::new(c(0.0, 1.0)).unwrap();
        let hop = HoppingSpec::new(1.0, 0.0);
        assert!(krein_matrix(&b, &hop, &[0.0; 4], z, &[]).is_err());
        assert!(krein_matrix(&b, &hop, &[0.0; 4], z, &[1, 1]).is_err());
        assert!(krein_matrix(&b, &hop, &[0.0; 4], z, &[4]).is_err());
    }
}
