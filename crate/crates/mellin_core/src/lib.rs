//! Matrix-polynomial algebra in the Mellin covariable for cone operators
//! `A = x^{-m} Σ_k a_k(x) (x D_x)^k` with `D_x = -i ∂_x`.
//!
//! The Mellin transform is `M[u](σ) = ∫ x^{-iσ} u(x) dx/x`, so that
//! `M[(x D_x) u](σ) = σ M[u](σ)` and `M[x^k u](σ) = M[u](σ + ik)`.
//!
//! Besides the conormal symbols, boundary spectra and Laurent data this crate
//! carries the shared error type, scalar aliases, Taylor jets and dense
//! linear-algebra helpers used by the rest of the workspace.

pub mod error;
pub mod jet;
pub mod laurent;
pub mod linalg;
pub mod poly;
pub mod problem;
pub mod spectrum;

pub use error::{Error, Result};
pub use laurent::{laurent_inverse, LaurentSeries};
pub use poly::{eval_symbol, MatPoly};
pub use problem::{conjugate_weight, conormal_family, ConeProblem, ConormalFamily};
pub use spectrum::{boundary_spectrum, BoundarySpectrum, Region, SpectralPoint};

/// Complex scalar used throughout.
pub type Cx = num_complex::Complex64;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<Cx>;
/// Dense complex column vector.
pub type CVec = nalgebra::DVector<Cx>;

/// Shorthand for building a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

/// The imaginary unit.
pub const I: Cx = Cx { re: 0.0, im: 1.0 };
