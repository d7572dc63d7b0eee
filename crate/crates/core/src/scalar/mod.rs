//! Exact scalar arithmetic: rationals, prime fields, polynomials, rational
//! functions, and the small product/block coefficient rings used as base
//! rings of extensions.
//!
//! Every scalar is an immutable value that carries whatever context it needs
//! (a prime modulus, a component count, ...), so values are freely shared
//! between threads.

use std::fmt;
use std::ops::{Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub mod block;
pub mod gf;
pub mod parse;
pub mod poly;
pub mod product;
pub mod ratfunc;

pub use block::BlockElem;
pub use gf::{is_prime_u64, GfElem};
pub use poly::{Mono, MultiPoly};
pub use product::ProductElem;
pub use ratfunc::RatFunc;

/// Arbitrary-precision rational numbers, the value type of every exact rank.
pub type Rational = num_rational::BigRational;
pub type Int = num_bigint::BigInt;

/// `n/d` as a [`Rational`]. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(Int::from(n), Int::from(d))
}

/// `n` as a [`Rational`].
pub fn rint(n: i64) -> Rational {
    Rational::from(Int::from(n))
}

/// A ring automorphism given as explicit data: the identity, a permutation
/// of product-ring components, or a Q-linear map on the coordinates of a
/// structure-constant field. Arbitrary automorphism code is not accepted;
/// tables keep the validity checks decidable.
#[derive(Clone, Debug, PartialEq)]
pub enum Automorphism {
    Identity,
    /// Component `i` of the image is component `perm[i]` of the argument.
    Permutation(Vec<usize>),
    /// Column `c` holds the coordinates of the image of basis element `c`.
    Linear(crate::matrix::Matrix<Rational>),
}

impl Automorphism {
    pub fn is_identity(&self) -> bool {
        match self {
            Automorphism::Identity => true,
            Automorphism::Permutation(p) => p.iter().enumerate().all(|(i, &j)| i == j),
            Automorphism::Linear(m) => {
                m.rows() == m.cols()
                    && (0..m.rows()).all(|i| {
                        (0..m.cols()).all(|j| {
                            let want = if i == j { rint(1) } else { rint(0) };
                            *m.get(i, j) == want
                        })
                    })
            }
        }
    }

    /// `self` after `other`: `(self . other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        match (self, other) {
            (Automorphism::Identity, x) | (x, Automorphism::Identity) => Ok(x.clone()),
            (Automorphism::Permutation(a), Automorphism::Permutation(b)) => {
                if a.len() != b.len() {
                    return Err(Error::invalid("permutation length mismatch"));
                }
                // x -> x[b] -> x[b[a]]
                Ok(Automorphism::Permutation(a.iter().map(|&i| b[i]).collect()))
            }
            (Automorphism::Linear(a), Automorphism::Linear(b)) => {
                Ok(Automorphism::Linear(a.matmul(b)?))
            }
            _ => Err(Error::invalid("cannot compose automorphisms of different kinds")),
        }
    }

    pub fn inverse(&self) -> Result<Automorphism> {
        match self {
            Automorphism::Identity => Ok(Automorphism::Identity),
            Automorphism::Permutation(p) => {
                let mut q = vec![0usize; p.len()];
                for (i, &j) in p.iter().enumerate() {
                    q[j] = i;
                }
                Ok(Automorphism::Permutation(q))
            }
            Automorphism::Linear(m) => crate::linalg::invert(m)
                .map(Automorphism::Linear)
                .ok_or_else(|| Error::invalid("automorphism matrix is singular")),
        }
    }

    pub fn pow(&self, n: i64) -> Result<Automorphism> {
        if n < 0 {
            return self.inverse()?.pow(-n);
        }
        let mut acc = Automorphism::Identity;
        for _ in 0..n {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }
}

/// Elements of a unital ring, with just enough structure for matrix
/// arithmetic and coefficient bookkeeping.
///
/// Arithmetic is by value; all implementations are cheap to clone at the
/// sizes this crate works with. `scale` is the action of the ground field Q
/// where one exists (reduction mod p for prime fields).
pub trait RingElem:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Zero
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    /// Multiply by a rational scalar.
    fn scale(&self, c: &Rational) -> Self;

    /// The inverse, when the element is a unit of the ring.
    fn unit_inv(&self) -> Option<Self>;

    /// The canonical involution where one exists; identity elsewhere.
    fn conj(&self) -> Self {
        self.clone()
    }

    /// Apply an automorphism given as data. Only the identity applies to a
    /// generic ring; component permutations and linear coordinate maps are
    /// recognized by the rings they act on.
    fn apply_aut(&self, aut: &Automorphism) -> Result<Self> {
        if aut.is_identity() {
            Ok(self.clone())
        } else {
            Err(Error::invalid(format!(
                "automorphism {aut:?} is not supported by this coefficient ring"
            )))
        }
    }
}

/// Elements of an exact field.
pub trait FieldElem: RingElem + One {
    /// Multiplicative inverse; `DivisionByZero` on zero.
    fn inv(&self) -> Result<Self> {
        self.unit_inv().ok_or(Error::DivisionByZero)
    }

    fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.clone() * rhs.inv()?)
    }

    /// Row rank of a matrix over this field. The default is plain Gaussian
    /// elimination; types with a cheaper fraction-free route override it.
    fn matrix_rank(m: &crate::matrix::Matrix<Self>) -> usize {
        crate::linalg::gauss_rank(m)
    }
}

impl RingElem for Rational {
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }

    fn unit_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl FieldElem for Rational {
    fn matrix_rank(m: &crate::matrix::Matrix<Self>) -> usize {
        crate::linalg::bareiss_rank(m)
    }
}

/// Parse a rational written as `a/b`, `a`, or a decimal-free signed integer.
pub fn parse_rational(src: &str) -> Result<Rational> {
    let s = src.trim();
    s.parse::<Rational>()
        .map_err(|e| Error::parse(0, format!("bad rational {s:?}: {e}")))
}

/// Render a rational for reports: `a/b`, or `a` when the denominator is one.
pub fn rational_str(q: &Rational) -> String {
    q.to_string()
}

/// Decimal rendering used in CSV output.
pub fn rational_f64(q: &Rational) -> f64 {
    let n = q.numer();
    let d = q.denom();
    // Good enough for plotting; exact values travel as strings.
    let nf = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
    nf / df
}

/// Canonical-form check: a reduced fraction has positive denominator and
/// coprime parts. `num_rational` maintains this; tests rely on it.
pub fn rational_is_canonical(q: &Rational) -> bool {
    use num_integer::Integer;
    q.denom().is_positive() && q.numer().gcd(q.denom()).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_matches_hand_values() {
        assert_eq!(rat(1, 2) + rat(1, 3), rat(5, 6));
        assert_eq!(rat(1, 2) * rat(2, 3), rat(1, 3));
        assert_eq!((rat(3, 4) - rat(3, 4)), rint(0));
    }

    #[test]
    fn rational_canonical_form_is_idempotent() {
        let q = Rational::new(Int::from(-6), Int::from(-8));
        assert_eq!(q, rat(3, 4));
        assert!(rational_is_canonical(&q));
        let again = Rational::new(q.numer().clone(), q.denom().clone());
        assert_eq!(again, q);
    }

    #[test]
    fn rational_division_by_zero_is_an_error() {
        assert!(matches!(rint(1).div(&rint(0)), Err(Error::DivisionByZero)));
    }

    #[test]
    fn rational_parse_and_print_round_trip() {
        for s in ["5/6", "-2", "0", "7/3"] {
            let q = parse_rational(s).unwrap();
            assert_eq!(rational_str(&q), s);
        }
    }
}
