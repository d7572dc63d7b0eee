//! Dense rectangular matrices over any scalar or ring-element type.
//!
//! Degenerate shapes (0 x m, n x 0) are legal everywhere; window arithmetic
//! produces them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::RingElem;

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>, // row-major
}

impl<T> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<T>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        Matrix { rows, cols, entries }
    }

    pub fn from_rows(data: Vec<Vec<T>>) -> Result<Self> {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        if data.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged rows"));
        }
        Ok(Matrix { rows, cols, entries: data.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter()
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map<U>(&self, f: impl Fn(&T) -> Result<U>) -> Result<Matrix<U>> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            entries.push(f(e)?);
        }
        Ok(Matrix { rows: self.rows, cols: self.cols, entries })
    }
}

impl<T: Clone> Matrix<T> {
    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn fill(rows: usize, cols: usize, v: T) -> Self {
        Matrix { rows, cols, entries: vec![v; rows * cols] }
    }

    pub fn submatrix(&self, row_ids: &[usize], col_ids: &[usize]) -> Self {
        Matrix::from_fn(row_ids.len(), col_ids.len(), |i, j| {
            self.get(row_ids[i], col_ids[j]).clone()
        })
    }

    pub fn vstack(&self, below: &Self) -> Result<Self> {
        if self.cols != below.cols {
            return Err(Error::invalid("vstack width mismatch"));
        }
        let mut entries = self.entries.clone();
        entries.extend(below.entries.iter().cloned());
        Ok(Matrix { rows: self.rows + below.rows, cols: self.cols, entries })
    }
}

impl<T: RingElem> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::fill(rows, cols, T::zero())
    }

    pub fn identity(n: usize) -> Self
    where
        T: One,
    {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self.get(i, k).clone() * rhs.get(k, j).clone();
            }
            acc
        }))
    }

    pub fn block_diag(a: &Self, b: &Self) -> Self {
        Matrix::from_fn(a.rows + b.rows, a.cols + b.cols, |i, j| {
            if i < a.rows && j < a.cols {
                a.get(i, j).clone()
            } else if i >= a.rows && j >= a.cols {
                b.get(i - a.rows, j - a.cols).clone()
            } else {
                T::zero()
            }
        })
    }

    /// `[[a, c], [0, b]]`.
    pub fn block_upper(a: &Self, c: &Self, b: &Self) -> Result<Self> {
        if c.rows != a.rows || c.cols != b.cols {
            return Err(Error::invalid("corner block shape mismatch"));
        }
        Ok(Matrix::from_fn(a.rows + b.rows, a.cols + b.cols, |i, j| {
            if i < a.rows && j < a.cols {
                a.get(i, j).clone()
            } else if i < a.rows {
                c.get(i, j - a.cols).clone()
            } else if j >= a.cols {
                b.get(i - a.rows, j - a.cols).clone()
            } else {
                T::zero()
            }
        }))
    }

    /// Permutation matrix sending row `i` to row `perm[i]`.
    pub fn permutation(perm: &[usize]) -> Self
    where
        T: One,
    {
        Matrix::from_fn(perm.len(), perm.len(), |i, j| {
            if perm[i] == j {
                T::one()
            } else {
                T::zero()
            }
        })
    }
}

impl<T: RingElem> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).clone() + rhs.get(i, j).clone()
        })
    }
}

impl<T: RingElem> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).clone() - rhs.get(i, j).clone()
        })
    }
}

impl<T: RingElem> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|e| -e.clone())
    }
}

impl<T: RingElem> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.matmul(rhs).expect("shape mismatch")
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// The JSON wire format: entries as text in the scalar syntax of the ring.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl MatrixJson {
    pub fn of<T: fmt::Display>(m: &Matrix<T>) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries: (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect())
                .collect(),
        }
    }

    pub fn decode<T>(&self, parse: impl Fn(&str) -> Result<T>) -> Result<Matrix<T>> {
        if self.entries.len() != self.rows
            || self.entries.iter().any(|r| r.len() != self.cols)
        {
            return Err(Error::invalid("matrix entry grid does not match rows/cols"));
        }
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for row in &self.entries {
            for s in row {
                entries.push(parse(s)?);
            }
        }
        Ok(Matrix::from_vec(self.rows, self.cols, entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rint, Rational};

    #[test]
    fn product_shapes_and_values() {
        let a = Matrix::from_rows(vec![vec![rint(1), rint(2)], vec![rint(3), rint(4)]]).unwrap();
        let b = Matrix::from_rows(vec![vec![rint(1)], vec![rint(1)]]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.rows(), 2);
        assert_eq!(c.get(0, 0), &rint(3));
        assert_eq!(c.get(1, 0), &rint(7));
    }

    #[test]
    fn empty_matrices_are_legal() {
        let a: Matrix<Rational> = Matrix::zeros(0, 3);
        let b: Matrix<Rational> = Matrix::zeros(3, 2);
        let c = a.matmul(&b).unwrap();
        assert_eq!((c.rows(), c.cols()), (0, 2));
    }

    #[test]
    fn json_round_trip() {
        let a = Matrix::from_rows(vec![vec![rint(1), rint(-2)]]).unwrap();
        let j = MatrixJson::of(&a);
        let back = j.decode(crate::scalar::parse_rational).unwrap();
        assert_eq!(a, back);
    }
}
