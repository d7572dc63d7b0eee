//! Exact computation of Sylvester matrix rank functions on amenable ring
//! extensions: window ranks, Folner-limit ranks, field-extension ranks via
//! companion matrices and evaluation points, quasitilings, and trace-rank
//! comparisons.
//!
//! The core is generic over the scalar type: matrices, elimination, and the
//! window engine work over anything implementing [`scalar::RingElem`] /
//! [`scalar::FieldElem`], with the concrete instantiations below used
//! throughout the test suites and the command-line tool.

pub mod error;
pub mod extension;
pub mod fieldext;
pub mod linalg;
pub mod matrix;
pub mod rank;
pub mod ring;
pub mod scalar;
pub mod trace;
pub mod window;

pub use error::{Error, Result};
pub use matrix::{Matrix, MatrixJson};
pub use scalar::{
    Automorphism, BlockElem, FieldElem, GfElem, MultiPoly, ProductElem, RatFunc, Rational,
    RingElem,
};

/// Matrices over the rationals.
pub type MatrixQ = Matrix<Rational>;
/// Matrices over a prime field.
pub type MatrixGf = Matrix<GfElem>;
/// Matrices over the fraction field of a multivariate polynomial ring.
pub type MatrixFrac = Matrix<RatFunc<Rational>>;
/// Matrices over a group ring / polynomial extension with rational
/// coefficients.
pub type MatrixExtQ = Matrix<ring::ExtElem<Rational>>;
/// Elements of Q[Z^d] and Q[t]-style extensions.
pub type ExtElemQ = ring::ExtElem<Rational>;
