//! Descriptors for the base rings an extension can be built over: zero/one,
//! text parsing, sampling pools, and the generators used by validation.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rank::axioms::rational_pool;
use crate::ring::finite_ext::{FieldExtElem, StructureConsts};
use crate::ring::{ExtElem, ExtRing};
use crate::scalar::gf::GfField;
use crate::scalar::parse::{parse_scalar, ParseCtx, Value};
use crate::scalar::{BlockElem, GfElem, ProductElem, Rational, RingElem};

/// What an extension ring needs from its coefficient ring.
pub trait RingOps<R: RingElem>: Send + Sync {
    fn zero(&self) -> R;
    fn one(&self) -> R;
    fn parse(&self, src: &str) -> Result<R>;
    /// Entries for randomized property tests, drawn from a small pool.
    fn sample(&self, rng: &mut ChaCha8Rng) -> R;
    /// Ring generators, used to validate automorphism data by linearity.
    fn generators(&self) -> Vec<R>;
    /// `(a, b, ...)` coefficient literals; only product rings accept them.
    fn tuple(&self, _parts: Vec<Rational>) -> Result<R> {
        Err(Error::invalid("this coefficient ring has no tuple literals"))
    }
    fn name(&self) -> String;
}

/// The rationals.
pub struct QOps;

impl RingOps<Rational> for QOps {
    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn parse(&self, src: &str) -> Result<Rational> {
        crate::scalar::parse::parse_rational_expr(src)
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> Rational {
        rational_pool(rng)
    }
    fn generators(&self) -> Vec<Rational> {
        vec![Rational::one()]
    }
    fn name(&self) -> String {
        "Q".into()
    }
}

/// GF(p).
pub struct GfOps(pub GfField);

struct GfCtx(GfField);

impl ParseCtx<GfElem> for GfCtx {
    fn atom(&self, name: &str) -> Result<GfElem> {
        Err(Error::invalid(format!("unknown name {name:?} in GF(p)")))
    }
    fn embed(&self, q: &Rational) -> Result<GfElem> {
        self.0.from_rational(q)
    }
}

impl RingOps<GfElem> for GfOps {
    fn zero(&self) -> GfElem {
        self.0.elem(0)
    }
    fn one(&self) -> GfElem {
        self.0.elem(1)
    }
    fn parse(&self, src: &str) -> Result<GfElem> {
        parse_scalar(src, &GfCtx(self.0))
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> GfElem {
        let pool = [0i64, 1, -1, 2, -2];
        if rng.gen_bool(0.2) {
            let two_inv = self.0.elem(2).unit_inv().unwrap_or_else(|| self.0.elem(0));
            two_inv
        } else {
            self.0.elem(pool[rng.gen_range(0..pool.len())])
        }
    }
    fn generators(&self) -> Vec<GfElem> {
        vec![self.0.elem(1)]
    }
    fn name(&self) -> String {
        format!("GF({})", self.0.modulus())
    }
}

/// Q x ... x Q with `arity` components.
pub struct ProductOps {
    pub arity: usize,
}

struct ProductCtx {
    arity: usize,
}

impl ParseCtx<ProductElem<Rational>> for ProductCtx {
    fn atom(&self, name: &str) -> Result<ProductElem<Rational>> {
        Err(Error::invalid(format!("unknown name {name:?} in a product ring")))
    }
    fn embed(&self, q: &Rational) -> Result<ProductElem<Rational>> {
        Ok(ProductElem::Scalar(q.clone()))
    }
    fn tuple(&self, parts: Vec<Value<ProductElem<Rational>>>) -> Result<ProductElem<Rational>> {
        if parts.len() != self.arity {
            return Err(Error::invalid(format!(
                "tuple with {} components in a ring with {}",
                parts.len(),
                self.arity
            )));
        }
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Value::Rat(q) => out.push(q),
                Value::Elem(ProductElem::Scalar(q)) => out.push(q),
                _ => return Err(Error::invalid("tuple components must be rational constants")),
            }
        }
        Ok(ProductElem::Tuple(out))
    }
}

impl RingOps<ProductElem<Rational>> for ProductOps {
    fn zero(&self) -> ProductElem<Rational> {
        ProductElem::Tuple(vec![Rational::zero(); self.arity])
    }
    fn one(&self) -> ProductElem<Rational> {
        ProductElem::Tuple(vec![Rational::one(); self.arity])
    }
    fn parse(&self, src: &str) -> Result<ProductElem<Rational>> {
        parse_scalar(src, &ProductCtx { arity: self.arity })
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> ProductElem<Rational> {
        ProductElem::Tuple((0..self.arity).map(|_| rational_pool(rng)).collect())
    }
    fn generators(&self) -> Vec<ProductElem<Rational>> {
        (0..self.arity)
            .map(|i| {
                let mut v = vec![Rational::zero(); self.arity];
                v[i] = Rational::one();
                ProductElem::Tuple(v)
            })
            .collect()
    }
    fn tuple(&self, parts: Vec<Rational>) -> Result<ProductElem<Rational>> {
        if parts.len() != self.arity {
            return Err(Error::invalid(format!(
                "tuple with {} components in a ring with {}",
                parts.len(),
                self.arity
            )));
        }
        Ok(ProductElem::Tuple(parts))
    }
    fn name(&self) -> String {
        format!("Q^{}", self.arity)
    }
}

/// M_k(Q). Entries parse as `a,b;c,d` grids or as plain scalars.
pub struct BlockOps {
    pub k: usize,
}

impl RingOps<BlockElem<Rational>> for BlockOps {
    fn zero(&self) -> BlockElem<Rational> {
        BlockElem::Scalar(Rational::zero())
    }
    fn one(&self) -> BlockElem<Rational> {
        BlockElem::Scalar(Rational::one())
    }
    fn parse(&self, src: &str) -> Result<BlockElem<Rational>> {
        let s = src.trim();
        let body = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')).unwrap_or(s);
        if body.contains(';') {
            let rows: Vec<Vec<Rational>> = body
                .split(';')
                .map(|row| {
                    row.split(',')
                        .map(crate::scalar::parse::parse_rational_expr)
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            if rows.len() != self.k || rows.iter().any(|r| r.len() != self.k) {
                return Err(Error::invalid(format!("block must be {0} x {0}", self.k)));
            }
            Ok(BlockElem::Block(Matrix::from_rows(rows)?))
        } else {
            Ok(BlockElem::Scalar(crate::scalar::parse::parse_rational_expr(body)?))
        }
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> BlockElem<Rational> {
        BlockElem::Block(Matrix::from_fn(self.k, self.k, |_, _| rational_pool(rng)))
    }
    fn generators(&self) -> Vec<BlockElem<Rational>> {
        let mut out = Vec::new();
        for i in 0..self.k {
            for j in 0..self.k {
                out.push(BlockElem::Block(Matrix::from_fn(self.k, self.k, |r, c| {
                    if (r, c) == (i, j) {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })));
            }
        }
        out
    }
    fn name(&self) -> String {
        format!("M_{}(Q)", self.k)
    }
}

/// A structure-constant field used as coefficients.
pub struct ExtFieldOps {
    pub table: Arc<StructureConsts>,
}

struct ExtFieldCtx {
    table: Arc<StructureConsts>,
}

impl ParseCtx<FieldExtElem> for ExtFieldCtx {
    fn atom(&self, name: &str) -> Result<FieldExtElem> {
        match self.table.names.iter().position(|n| n == name) {
            Some(i) => Ok(FieldExtElem::basis(&self.table, i)),
            None => Err(Error::invalid(format!("unknown name {name:?} in {}", self.table.names.join(",")))),
        }
    }
    fn embed(&self, q: &Rational) -> Result<FieldExtElem> {
        Ok(FieldExtElem::Scalar(q.clone()))
    }
}

impl RingOps<FieldExtElem> for ExtFieldOps {
    fn zero(&self) -> FieldExtElem {
        FieldExtElem::Scalar(Rational::zero())
    }
    fn one(&self) -> FieldExtElem {
        FieldExtElem::Scalar(Rational::one())
    }
    fn parse(&self, src: &str) -> Result<FieldExtElem> {
        parse_scalar(src, &ExtFieldCtx { table: self.table.clone() })
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> FieldExtElem {
        let d = self.table.degree();
        FieldExtElem::from_coords(
            self.table.clone(),
            (0..d).map(|_| rational_pool(rng)).collect(),
        )
    }
    fn generators(&self) -> Vec<FieldExtElem> {
        (0..self.table.degree())
            .map(|i| FieldExtElem::basis(&self.table, i))
            .collect()
    }
    fn name(&self) -> String {
        format!("Q[{}]", self.table.names.join(","))
    }
}

/// An extension ring used as the base of a further extension (towers).
pub struct TowerOps<R: RingElem> {
    pub ring: Arc<ExtRing<R>>,
}

impl<R: RingElem> RingOps<ExtElem<R>> for TowerOps<R> {
    fn zero(&self) -> ExtElem<R> {
        ExtElem::zero()
    }
    fn one(&self) -> ExtElem<R> {
        self.ring.one()
    }
    fn parse(&self, src: &str) -> Result<ExtElem<R>> {
        self.ring.parse_elem(src)
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> ExtElem<R> {
        self.ring.sample_elem(rng, 2)
    }
    fn generators(&self) -> Vec<ExtElem<R>> {
        match self.ring.full_index_set() {
            Some(idxs) => idxs.into_iter().map(|i| self.ring.basis_elem(i)).collect(),
            None => vec![self.ring.one()],
        }
    }
    fn name(&self) -> String {
        self.ring.name()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_tuples_parse() {
        let ops = ProductOps { arity: 2 };
        let e = ops.parse("(1, -1/2)").unwrap();
        assert_eq!(
            e,
            ProductElem::Tuple(vec![Rational::one(), crate::scalar::rat(-1, 2)])
        );
        assert!(ops.parse("(1, 2, 3)").is_err());
    }

    #[test]
    fn block_grids_parse() {
        let ops = BlockOps { k: 2 };
        let e = ops.parse("[1,0;1/2,1]").unwrap();
        assert!(matches!(e, BlockElem::Block(_)));
        let s = ops.parse("3").unwrap();
        assert_eq!(s, BlockElem::Scalar(crate::scalar::rint(3)));
    }

    #[test]
    fn gf_coefficients_reduce() {
        let ops = GfOps(GfField::new(7).unwrap());
        assert_eq!(ops.parse("10").unwrap(), ops.0.elem(3));
        assert_eq!(ops.parse("1/2").unwrap(), ops.0.elem(4));
    }
}
