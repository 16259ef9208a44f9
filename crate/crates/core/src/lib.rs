//! Equivariant quantum K-theory of partial flag varieties.
//!
//! Torus-fixed-point localization for Schubert and tautological classes,
//! Demazure operators, curve neighborhoods, the resulting two- and
//! three-point K-theoretic Gromov-Witten invariants, quantum products by
//! line bundles, and the Whitney-type presentations of the quantum K ring.

pub mod algebra;
pub mod curves;
pub mod ktheory;
pub mod presentation;
pub mod qk;
pub mod report;
pub mod scalar;
pub mod weyl;

use num_bigint::BigInt;

pub use weyl::{Degree, FlagSpace, Permutation, Root};

/// Laurent polynomials in `T_1, ..., T_n` with integer coefficients.
pub type LaurentPolynomial = algebra::Laurent<BigInt>;
/// Elements of `Frac(K_T(pt))`.
pub type RationalFunction = algebra::RatFun<BigInt>;
/// Truncated q-series with rational-function coefficients.
pub type QSeriesRF = algebra::QSeries<RationalFunction>;
/// Truncated q-series with integer coefficients.
pub type QSeriesZ = algebra::QSeries<BigInt>;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("series is not a unit")]
    NotAUnit,
    #[error("mismatched truncation: {left:?} vs {right:?}")]
    MismatchedTruncation { left: (usize, u32), right: (usize, u32) },
    #[error("invalid permutation {0}")]
    InvalidPermutation(String),
    #[error("invalid flag space: {0}")]
    InvalidSpace(String),
    #[error("{0} is not a minimal coset representative")]
    NotMinimalRep(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("unsupported by the selected oracle: {0}")]
    Unsupported(String),
    #[error("not computable with the available products: {0}")]
    NotComputable(String),
    #[error("ideal is not zero-dimensional")]
    NotZeroDimensional,
}
