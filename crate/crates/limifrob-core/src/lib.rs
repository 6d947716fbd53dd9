//! Exact and p-adic algorithms for computing the limiting Frobenius structure
//! of a one-parameter degeneration of smooth projective hypersurfaces.
//!
//! Given a pencil `P_t = (1−t)·P₀ + t·P₁` over 𝔽_p with `P₁` diagonal and the
//! fiber at `t = 0` degenerate, the pipeline computes, to prescribed p-adic
//! precision, the data `(H₀, N₀, Fr₀, e)`: the limit of the middle primitive
//! cohomology at `t = 0` after pulling back by `t = s^e`, the nilpotent
//! residue `N₀` of the normalized connection, and the limiting Frobenius
//! `Fr₀` satisfying `N₀·Fr₀ = p·Fr₀·N₀`.  The stages:
//!
//! 1. [`dwork`] — monomial basis of primitive middle cohomology and
//!    Griffiths–Dwork reduction; the Gauss–Manin connection matrix `N(t)`
//!    over ℚ(t).
//! 2. [`connection`] — normalization of `N(t)` at `t = 0`: regularization via
//!    a cyclic vector when the pole is not simple, ramified pullback
//!    `t = s^e`, and shearing to a nilpotent residue.
//! 3. [`frobenius`] — the Frobenius matrix of the diagonal fiber at `t = 1`
//!    via Gauss/Jacobi sums, p-adic solution of the deformation equation,
//!    rational reconstruction with an exact residual check, and
//!    specialization to `s = 0`.
//! 4. [`limit`] — monodromy weight filtration of `N₀`, graded Frobenius
//!    factors recognized as integer polynomials, and Weil weight checks.
//! 5. [`counting`] — brute-force point counting oracles and zeta-function
//!    consistency checks used to verify the p-adic computation.
//!
//! [`algebra`] and [`padic`] supply the exact rational and precision-tracked
//! p-adic arithmetic underneath.

pub mod algebra;
pub mod connection;
pub mod counting;
pub mod dwork;
pub mod error;
pub mod family;
pub mod frobenius;
pub mod limit;
pub mod padic;

pub use error::Error;

/// Convenience result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
