//! Elements of matrix rings M_k(K), used as a structured base ring whose
//! normalized rank is rank(flatten)/k.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::matrix::Matrix;
use crate::scalar::{FieldElem, Rational, RingElem};

/// `Scalar(c)` is the central embedding `c * I_k`, so zero and one need no
/// block size; `Block` carries an actual k x k matrix.
#[derive(Clone, Debug)]
pub enum BlockElem<K: FieldElem> {
    Scalar(K),
    Block(Matrix<K>),
}

impl<K: FieldElem> BlockElem<K> {
    pub fn block(m: Matrix<K>) -> Self {
        assert_eq!(m.rows(), m.cols(), "block ring elements are square");
        BlockElem::Block(m)
    }

    pub fn size(&self) -> Option<usize> {
        match self {
            BlockElem::Scalar(_) => None,
            BlockElem::Block(m) => Some(m.rows()),
        }
    }

    /// The k x k matrix, expanding diagonal scalars.
    pub fn materialize(&self, k: usize) -> Matrix<K> {
        match self {
            BlockElem::Scalar(c) => Matrix::from_fn(k, k, |i, j| {
                if i == j {
                    c.clone()
                } else {
                    K::zero()
                }
            }),
            BlockElem::Block(m) => {
                assert_eq!(m.rows(), k, "block ring size mismatch");
                m.clone()
            }
        }
    }

    fn zip(a: &Self, b: &Self, f: impl Fn(&Matrix<K>, &Matrix<K>) -> Matrix<K>, s: impl Fn(K, K) -> K) -> Self {
        match (a, b) {
            (BlockElem::Scalar(x), BlockElem::Scalar(y)) => BlockElem::Scalar(s(x.clone(), y.clone())),
            _ => {
                let k = a.size().or(b.size()).unwrap();
                BlockElem::Block(f(&a.materialize(k), &b.materialize(k)))
            }
        }
    }
}

impl<K: FieldElem> PartialEq for BlockElem<K> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (BlockElem::Scalar(a), BlockElem::Scalar(b)) => a == b,
            _ => {
                let k = self.size().or(other.size()).unwrap();
                self.materialize(k) == other.materialize(k)
            }
        }
    }
}

impl<K: FieldElem> fmt::Display for BlockElem<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockElem::Scalar(c) => write!(f, "{c}"),
            BlockElem::Block(m) => {
                let rows: Vec<String> = (0..m.rows())
                    .map(|i| {
                        (0..m.cols())
                            .map(|j| m.get(i, j).to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    })
                    .collect();
                write!(f, "[{}]", rows.join(";"))
            }
        }
    }
}

impl<K: FieldElem> Zero for BlockElem<K> {
    fn zero() -> Self {
        BlockElem::Scalar(K::zero())
    }
    fn is_zero(&self) -> bool {
        match self {
            BlockElem::Scalar(c) => c.is_zero(),
            BlockElem::Block(m) => m.is_zero_matrix(),
        }
    }
}

impl<K: FieldElem> One for BlockElem<K> {
    fn one() -> Self {
        BlockElem::Scalar(K::one())
    }
}

impl<K: FieldElem> Add for BlockElem<K> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::zip(&self, &rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl<K: FieldElem> Sub for BlockElem<K> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::zip(&self, &rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl<K: FieldElem> Mul for BlockElem<K> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::zip(&self, &rhs, |a, b| a * b, |a, b| a * b)
    }
}

impl<K: FieldElem> Neg for BlockElem<K> {
    type Output = Self;
    fn neg(self) -> Self {
        match self {
            BlockElem::Scalar(c) => BlockElem::Scalar(-c),
            BlockElem::Block(m) => BlockElem::Block(-&m),
        }
    }
}

impl<K: FieldElem> RingElem for BlockElem<K> {
    fn scale(&self, c: &Rational) -> Self {
        match self {
            BlockElem::Scalar(k) => BlockElem::Scalar(k.scale(c)),
            BlockElem::Block(m) => BlockElem::Block(m.map(|e| e.scale(c))),
        }
    }

    fn unit_inv(&self) -> Option<Self> {
        match self {
            BlockElem::Scalar(c) => c.unit_inv().map(BlockElem::Scalar),
            BlockElem::Block(m) => crate::linalg::invert(m).map(BlockElem::Block),
        }
    }

    fn conj(&self) -> Self {
        match self {
            BlockElem::Scalar(c) => BlockElem::Scalar(c.conj()),
            BlockElem::Block(m) => BlockElem::Block(m.map(|e| e.conj())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rint, Rational};

    fn b(rows: Vec<Vec<i64>>) -> BlockElem<Rational> {
        BlockElem::block(
            Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(rint).collect()).collect())
                .unwrap(),
        )
    }

    #[test]
    fn scalars_act_as_multiples_of_identity() {
        let e11 = b(vec![vec![1, 0], vec![0, 0]]);
        let two = BlockElem::Scalar(rint(2));
        assert_eq!(two.clone() * e11.clone(), b(vec![vec![2, 0], vec![0, 0]]));
        assert_eq!(BlockElem::one() * e11.clone(), e11);
    }

    #[test]
    fn inverse_of_invertible_block() {
        let m = b(vec![vec![1, 1], vec![0, 1]]);
        let inv = m.unit_inv().unwrap();
        assert_eq!(m * inv, BlockElem::one());
        assert!(b(vec![vec![1, 1], vec![1, 1]]).unit_inv().is_none());
    }
}
