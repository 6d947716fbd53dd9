//! Exact arithmetic: dense univariate polynomials, rational functions,
//! Laurent polynomials, matrices, fraction-free linear solving,
//! characteristic polynomials and rational spectra, and complex root
//! isolation for Weil weight checks.
//!
//! Everything here is exact over ℚ (via `num_rational::BigRational`) except
//! [`roots`], which deliberately works in floating point under an explicit
//! tolerance.

pub mod charpoly;
pub mod interp;
pub mod laurent;
pub mod matrix;
pub mod poly;
pub mod ratfunc;
pub mod roots;
pub mod solve;

pub use charpoly::{char_poly, rational_eigenvalues};
pub use laurent::LaurentPoly;
pub use matrix::Matrix;
pub use poly::UniPoly;
pub use ratfunc::RatFunc;
pub use solve::solve_linear;

/// Exact rational scalar used across the crate.
pub type Rat = num_rational::BigRational;

/// Shorthand for building a rational from an integer pair.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// Shorthand for an integer rational.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(n.into())
}
