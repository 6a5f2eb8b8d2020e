//! Numerics for Minami-type determinant bounds on Green's functions of
//! (magnetic) Anderson Hamiltonians.
//!
//! - [`herglotz`]: operator imaginary part, Herglotz certification, `-C^{-1}`,
//!   restriction, Schur complement, cofactor identity.
//! - [`lemma`]: closed form of the two-dimensional Minami integral.
//! - [`quadrature`]: adaptive Gauss–Kronrod oracle for the `n`-dimensional
//!   integral and the inductive inequality.
//! - [`anderson`]: finite-box Hamiltonians with Peierls phases, resolvent
//!   blocks and the Krein matrix.
//! - [`montecarlo`]: crude and conditional (Rao–Blackwell) estimators of the
//!   disorder average.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod anderson;
pub mod eigen;
pub mod error;
pub mod herglotz;
pub mod lemma;
pub mod matrix;
pub mod montecarlo;
pub mod quadrature;
pub mod summation;

pub use error::{Error, Result};
pub use herglotz::HerglotzMatrix;
pub use matrix::ComplexSquareMatrix;
pub use num_complex::Complex64;
