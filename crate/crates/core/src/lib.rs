//! Numerical laboratory for the interior transmission eigenvalue problem.
//!
//! For a sign-definite perturbation `m > 0` the transmission eigenvalues are
//! the nonzero `λ` for which the quadratic pencil
//!
//! ```text
//! T(λ) = A − λB + λ²C,   A = P₀qP₀,  B = qP₀ + P₀q + P₀,  C = 1 + q,  q = 1/m
//! ```
//!
//! has a nontrivial kernel on clamped functions (`u = ∂ᵥu = 0` on the boundary),
//! with `P₀ = −Δ`. The crate is organised around that pencil:
//!
//! * [`symbols`]: closed-form semiclassical boundary symbol algebra (roots of
//!   the principal symbol, residue sums, the 2×2 boundary matrix) with a
//!   contour-quadrature oracle.
//! * [`parametrix`]: the interior parametrix recursion in one dimension,
//!   evaluated exactly through truncated Taylor jets.
//! * [`pencil`]: Galerkin assembly of `(A, B, C)` on an interval and on the
//!   angular modes of a disk.
//! * [`eig`]: companion linearisation and a dense Schur eigensolver.
//! * [`oracle`]: dispersion relations and an argument-principle root finder.
//! * [`regions`]: semiclassical maps, the parabolic enclosure test and the
//!   left half-plane certificates.

pub mod checks;
pub mod dd;
pub mod eig;
pub mod error;
pub mod jet;
pub mod linalg;
pub mod oracle;
pub mod parametrix;
pub mod pencil;
pub mod profile;
pub mod quadrature;
pub mod regions;
pub mod symbols;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use profile::RefractiveProfile;

/// Shorthand for `Complex64::new`.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Crate version, recorded in result provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
