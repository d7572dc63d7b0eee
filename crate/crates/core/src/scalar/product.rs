//! Elements of finite product rings K x ... x K.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::{FieldElem, Rational, RingElem};

/// An element of a product ring. `Scalar(c)` is the diagonal embedding of a
/// constant, so zero and one need no component count; `Tuple` carries the
/// actual components.
#[derive(Clone, Debug)]
pub enum ProductElem<K: FieldElem> {
    Scalar(K),
    Tuple(Vec<K>),
}

impl<K: FieldElem> ProductElem<K> {
    pub fn tuple(parts: Vec<K>) -> Self {
        ProductElem::Tuple(parts)
    }

    pub fn arity(&self) -> Option<usize> {
        match self {
            ProductElem::Scalar(_) => None,
            ProductElem::Tuple(v) => Some(v.len()),
        }
    }

    /// The component vector, broadcasting diagonal scalars to `arity`.
    pub fn components(&self, arity: usize) -> Vec<K> {
        match self {
            ProductElem::Scalar(c) => vec![c.clone(); arity],
            ProductElem::Tuple(v) => {
                assert_eq!(v.len(), arity, "product ring arity mismatch");
                v.clone()
            }
        }
    }

    fn zip(a: &Self, b: &Self, f: impl Fn(K, K) -> K) -> Self {
        match (a, b) {
            (ProductElem::Scalar(x), ProductElem::Scalar(y)) => {
                ProductElem::Scalar(f(x.clone(), y.clone()))
            }
            _ => {
                let n = a.arity().or(b.arity()).unwrap();
                let av = a.components(n);
                let bv = b.components(n);
                ProductElem::Tuple(av.into_iter().zip(bv).map(|(x, y)| f(x, y)).collect())
            }
        }
    }

    pub fn map(&self, f: impl Fn(&K) -> K) -> Self {
        match self {
            ProductElem::Scalar(c) => ProductElem::Scalar(f(c)),
            ProductElem::Tuple(v) => ProductElem::Tuple(v.iter().map(f).collect()),
        }
    }

    /// Apply a permutation of the components: entry `i` of the result is the
    /// component at `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        match self {
            ProductElem::Scalar(_) => self.clone(),
            ProductElem::Tuple(v) => {
                assert_eq!(v.len(), perm.len(), "permutation length mismatch");
                ProductElem::Tuple(perm.iter().map(|&j| v[j].clone()).collect())
            }
        }
    }
}

impl<K: FieldElem> PartialEq for ProductElem<K> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ProductElem::Scalar(a), ProductElem::Scalar(b)) => a == b,
            _ => {
                let n = self.arity().or(other.arity()).unwrap();
                self.components(n) == other.components(n)
            }
        }
    }
}

impl<K: FieldElem> fmt::Display for ProductElem<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductElem::Scalar(c) => write!(f, "{c}"),
            ProductElem::Tuple(v) => {
                let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

impl<K: FieldElem> Zero for ProductElem<K> {
    fn zero() -> Self {
        ProductElem::Scalar(K::zero())
    }
    fn is_zero(&self) -> bool {
        match self {
            ProductElem::Scalar(c) => c.is_zero(),
            ProductElem::Tuple(v) => v.iter().all(|c| c.is_zero()),
        }
    }
}

impl<K: FieldElem> One for ProductElem<K> {
    fn one() -> Self {
        ProductElem::Scalar(K::one())
    }
}

impl<K: FieldElem> Add for ProductElem<K> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::zip(&self, &rhs, |a, b| a + b)
    }
}

impl<K: FieldElem> Sub for ProductElem<K> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::zip(&self, &rhs, |a, b| a - b)
    }
}

impl<K: FieldElem> Mul for ProductElem<K> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::zip(&self, &rhs, |a, b| a * b)
    }
}

impl<K: FieldElem> Neg for ProductElem<K> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|c| -c.clone())
    }
}

impl<K: FieldElem> RingElem for ProductElem<K> {
    fn scale(&self, c: &Rational) -> Self {
        self.map(|k| k.scale(c))
    }

    fn apply_aut(&self, aut: &crate::scalar::Automorphism) -> crate::error::Result<Self> {
        match aut {
            crate::scalar::Automorphism::Identity => Ok(self.clone()),
            crate::scalar::Automorphism::Permutation(p) => Ok(self.permute(p)),
            other => Err(crate::error::Error::invalid(format!(
                "automorphism {other:?} is not supported by a product ring"
            ))),
        }
    }

    fn unit_inv(&self) -> Option<Self> {
        match self {
            ProductElem::Scalar(c) => c.unit_inv().map(ProductElem::Scalar),
            ProductElem::Tuple(v) => {
                let inv: Option<Vec<K>> = v.iter().map(|c| c.unit_inv()).collect();
                inv.map(ProductElem::Tuple)
            }
        }
    }

    fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }
}
