//! Exact arithmetic for Legendre-symbol matrices.
//!
//! The crate builds the matrices `[((i² + d j²)/p)]`, their first-row
//! variant, Carlitz's `[((i − j)/p)]` and Chapman's `[x + ((i + j − 1)/p)]`,
//! evaluates their determinants and characteristic polynomials exactly, and
//! checks the identities that tie them to character sums, to the
//! decomposition `p = a² + 4b²` and to units of `ℚ(√p)`.
//!
//! Module map:
//! - [`nt`]: Legendre/quartic symbols, `p = a² + 4b²`, permutation signs.
//! - [`matrix`]: matrix builders with provenance tags.
//! - [`linalg`], [`poly`]: Bareiss determinants, modular oracle, char polys.
//! - [`charsums`], [`cyclotomic`]: eigenvalues `λ_k` as exact cyclotomic
//!   integers and as high-precision complex numbers.
//! - [`quadfield`]: fundamental unit and class number of `ℚ(√p)`.
//! - [`harness`]: range verification, result cache, report formats.

pub mod charsums;
pub mod cyclotomic;
pub mod error;
pub mod exec;
pub mod harness;
pub mod hp;
pub mod linalg;
pub mod matrix;
pub mod nt;
pub mod poly;
pub mod quadfield;

pub use error::{Error, Result};
pub use exec::Exec;
pub use matrix::{AffineMatrix, IntMatrix, MatrixKind, MatrixTag, SignMatrix};
pub use nt::{PrimeCtx, TwoSquare};
pub use poly::IntPoly;
