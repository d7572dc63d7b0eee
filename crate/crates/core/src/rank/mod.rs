//! Sylvester matrix rank functions: a normalized rank on matrices over a
//! ring, concrete implementations, and convex combinations. The axiom
//! harness lives in [`axioms`].

use std::marker::PhantomData;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::rank_field;
use crate::matrix::Matrix;
use crate::scalar::{rint, BlockElem, FieldElem, ProductElem, Rational, RingElem};

pub mod axioms;

pub use axioms::{check_axioms, AxiomReport, MatrixSampler};

/// A normalized rank on rectangular matrices over one ring.
///
/// Values are exact nonnegative rationals; `rank([]) = 0` and
/// `rank([1]) = 1` for every implementation shipped here.
pub trait RankFunction<T: RingElem>: Send + Sync {
    fn rank(&self, a: &Matrix<T>) -> Result<Rational>;

    /// Short ring/rank description for reports.
    fn name(&self) -> String;
}

/// The unique rank function of an exact field: row rank via exact
/// elimination.
pub struct FieldRank<K: FieldElem>(PhantomData<K>);

impl<K: FieldElem> FieldRank<K> {
    pub fn new() -> Self {
        FieldRank(PhantomData)
    }
}

impl<K: FieldElem> Default for FieldRank<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: FieldElem> RankFunction<K> for FieldRank<K> {
    fn rank(&self, a: &Matrix<K>) -> Result<Rational> {
        Ok(rint(rank_field(a) as i64))
    }

    fn name(&self) -> String {
        "field".into()
    }
}

/// Rank on M_k(K): flatten each block entry to its k x k matrix and divide
/// the field rank by k, so the ring identity has rank one.
pub struct MatrixRingRank<K: FieldElem> {
    k: usize,
    _marker: PhantomData<K>,
}

impl<K: FieldElem> MatrixRingRank<K> {
    pub fn new(k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::invalid("block size must be at least 1"));
        }
        Ok(MatrixRingRank { k, _marker: PhantomData })
    }

    pub fn block_size(&self) -> usize {
        self.k
    }

    pub fn flatten(&self, a: &Matrix<BlockElem<K>>) -> Result<Matrix<K>> {
        let k = self.k;
        for e in a.iter() {
            if let Some(s) = e.size() {
                if s != k {
                    return Err(Error::invalid(format!(
                        "block of size {s} in a ring of {k} x {k} blocks"
                    )));
                }
            }
        }
        let blocks: Vec<Matrix<K>> = a.iter().map(|e| e.materialize(k)).collect();
        Ok(Matrix::from_fn(a.rows() * k, a.cols() * k, |i, j| {
            let (bi, ri) = (i / k, i % k);
            let (bj, rj) = (j / k, j % k);
            blocks[bi * a.cols() + bj].get(ri, rj).clone()
        }))
    }
}

impl<K: FieldElem> RankFunction<BlockElem<K>> for MatrixRingRank<K> {
    fn rank(&self, a: &Matrix<BlockElem<K>>) -> Result<Rational> {
        let flat = self.flatten(a)?;
        Ok(Rational::new(
            (rank_field(&flat) as i64).into(),
            (self.k as i64).into(),
        ))
    }

    fn name(&self) -> String {
        format!("matrix-ring(k={})", self.k)
    }
}

/// Weighted rank on a product ring K x ... x K: the weighted sum of the
/// component field ranks. Weights are rationals in [0, 1] summing to one.
pub struct ProductRank<K: FieldElem> {
    weights: Vec<Rational>,
    _marker: PhantomData<K>,
}

impl<K: FieldElem> ProductRank<K> {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("at least one weight required"));
        }
        if weights.iter().any(|w| w < &Rational::zero() || w > &Rational::one()) {
            return Err(Error::invalid("weights must lie in [0, 1]"));
        }
        let total: Rational = weights.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(ProductRank { weights, _marker: PhantomData })
    }

    pub fn arity(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn component(&self, a: &Matrix<ProductElem<K>>, i: usize) -> Result<Matrix<K>> {
        let arity = self.weights.len();
        for e in a.iter() {
            if let Some(n) = e.arity() {
                if n != arity {
                    return Err(Error::invalid(format!(
                        "product element with {n} components in a ring with {arity}"
                    )));
                }
            }
        }
        Ok(a.map(|e| e.components(arity)[i].clone()))
    }
}

impl<K: FieldElem> RankFunction<ProductElem<K>> for ProductRank<K> {
    fn rank(&self, a: &Matrix<ProductElem<K>>) -> Result<Rational> {
        let mut total = Rational::zero();
        for (i, w) in self.weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let comp = self.component(a, i)?;
            total += w * rint(rank_field(&comp) as i64);
        }
        Ok(total)
    }

    fn name(&self) -> String {
        let ws: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        format!("product({})", ws.join(","))
    }
}

/// A convex combination of rank functions over one ring, evaluated
/// pointwise. The result satisfies the rank axioms whenever its parts do.
pub struct ConvexCombination<T: RingElem> {
    parts: Vec<(Rational, Arc<dyn RankFunction<T>>)>,
}

impl<T: RingElem> ConvexCombination<T> {
    pub fn parts(&self) -> &[(Rational, Arc<dyn RankFunction<T>>)] {
        &self.parts
    }
}

/// Build the pointwise weighted sum; the weights must sum to exactly one.
pub fn convex_combine<T: RingElem>(
    parts: Vec<(Rational, Arc<dyn RankFunction<T>>)>,
) -> Result<ConvexCombination<T>> {
    if parts.is_empty() {
        return Err(Error::invalid("empty combination"));
    }
    if parts
        .iter()
        .any(|(w, _)| w < &Rational::zero() || w > &Rational::one())
    {
        return Err(Error::invalid("weights must lie in [0, 1]"));
    }
    let total: Rational = parts.iter().map(|(w, _)| w.clone()).sum();
    if !total.is_one() {
        return Err(Error::invalid(format!("weights sum to {total}, not 1")));
    }
    Ok(ConvexCombination { parts })
}

impl<T: RingElem> RankFunction<T> for ConvexCombination<T> {
    fn rank(&self, a: &Matrix<T>) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (w, rk) in &self.parts {
            if w.is_zero() {
                continue;
            }
            acc += w * rk.rank(a)?;
        }
        Ok(acc)
    }

    fn name(&self) -> String {
        let ps: Vec<String> = self
            .parts
            .iter()
            .map(|(w, rk)| format!("{w}*{}", rk.name()))
            .collect();
        ps.join(" + ")
    }
}
