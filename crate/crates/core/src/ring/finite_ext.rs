//! Finite field extensions E0/Q given by structure constants, their
//! elements, and embeddings into larger declared extensions.

use std::fmt;
use std::ops::{Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{bareiss_rank, invert};
use crate::matrix::Matrix;
use crate::scalar::{rint, Automorphism, FieldElem, Rational, RingElem};

/// Structure constants for a commutative Q-algebra with basis
/// `b_0 = 1, b_1, ..., b_{d-1}`: `table[i][j]` holds the coordinates of
/// `b_i * b_j`. Construction validates unitality, commutativity,
/// associativity (exhaustively on basis triples) and samples invertibility
/// as a field check.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConsts {
    pub names: Vec<String>,
    pub table: Vec<Vec<Vec<Rational>>>,
    /// Optional involution (complex/cyclotomic conjugation) as a linear map.
    pub conj: Option<Automorphism>,
    pub field_check_seed: u64,
}

impl StructureConsts {
    pub fn new(
        names: Vec<String>,
        table: Vec<Vec<Vec<Rational>>>,
        conj: Option<Automorphism>,
    ) -> Result<Arc<Self>> {
        let d = names.len();
        if d == 0 {
            return Err(Error::invalid("extension degree must be at least 1"));
        }
        if table.len() != d
            || table.iter().any(|r| r.len() != d)
            || table.iter().flatten().any(|v| v.len() != d)
        {
            return Err(Error::invalid("structure constant table must be d x d x d"));
        }
        let sc = StructureConsts { names, table, conj, field_check_seed: 0xf1e1d };
        // b_0 acts as the identity.
        for j in 0..d {
            if sc.table[0][j] != unit_vec(d, j) || sc.table[j][0] != unit_vec(d, j) {
                return Err(Error::invalid("basis element 0 must act as the identity"));
            }
        }
        // Commutativity.
        for i in 0..d {
            for j in 0..d {
                if sc.table[i][j] != sc.table[j][i] {
                    return Err(Error::invalid(format!(
                        "multiplication is not commutative on ({}, {})",
                        sc.names[i], sc.names[j]
                    )));
                }
            }
        }
        // Associativity, exhaustively on basis triples.
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let left = sc.mul_vec(&sc.table[i][j], &unit_vec(d, k));
                    let right = sc.mul_vec(&unit_vec(d, i), &sc.table[j][k]);
                    if left != right {
                        return Err(Error::invalid(format!(
                            "multiplication is not associative on ({}, {}, {})",
                            sc.names[i], sc.names[j], sc.names[k]
                        )));
                    }
                }
            }
        }
        // Field check: every nonzero sampled element (and every basis
        // element) has an invertible regular representation.
        let mut rng = ChaCha8Rng::seed_from_u64(sc.field_check_seed);
        let mut candidates: Vec<Vec<Rational>> = (1..d).map(|i| unit_vec(d, i)).collect();
        for _ in 0..8 {
            let v: Vec<Rational> = (0..d).map(|_| rint(rng.gen_range(-3..=3))).collect();
            if v.iter().any(|c| !c.is_zero()) {
                candidates.push(v);
            }
        }
        for v in candidates {
            if bareiss_rank(&sc.reg_rep(&v)) != d {
                return Err(Error::invalid(format!(
                    "the algebra is not a field: {} is a zero divisor",
                    sc.show(&v)
                )));
            }
        }
        if let Some(aut) = &sc.conj {
            validate_ring_map(&sc, aut)?;
        }
        Ok(Arc::new(sc))
    }

    /// `Q[u]/(f)` for a monic `f` of degree d, with basis `1, u, ..., u^{d-1}`.
    /// `monic` lists the coefficients `c_0..c_d` with `c_d = 1`.
    pub fn adjoin_root(root_name: &str, monic: &[Rational]) -> Result<Arc<Self>> {
        let d = monic.len().saturating_sub(1);
        if d == 0 || !monic[d].is_one() {
            return Err(Error::invalid("minimal polynomial must be monic of degree >= 1"));
        }
        let names: Vec<String> = (0..d)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => root_name.to_string(),
                i => format!("{root_name}{i}"),
            })
            .collect();
        // Reduce u^(i+j) mod f by repeated substitution u^d = -(c_0 + ... ).
        let mut powers: Vec<Vec<Rational>> = Vec::with_capacity(2 * d);
        for i in 0..d {
            powers.push(unit_vec(d, i));
        }
        for _ in d..(2 * d).max(d) {
            let prev = powers.last().unwrap().clone();
            // u * prev
            let mut next = vec![Rational::zero(); d];
            let carry = prev[d - 1].clone();
            for k in (1..d).rev() {
                next[k] = prev[k - 1].clone();
            }
            for (k, c) in monic.iter().take(d).enumerate() {
                next[k] -= &carry * c;
            }
            powers.push(next);
        }
        let table: Vec<Vec<Vec<Rational>>> = (0..d)
            .map(|i| (0..d).map(|j| powers[i + j].clone()).collect())
            .collect();
        Self::new(names, table, None)
    }

    /// Q(i).
    pub fn gaussian() -> Arc<Self> {
        let sc = Self::adjoin_root("i", &[rint(1), rint(0), rint(1)]).unwrap();
        // Conjugation sends i to -i.
        let d = 2;
        let conj = Automorphism::Linear(Matrix::from_fn(d, d, |r, c| match (r, c) {
            (0, 0) => rint(1),
            (1, 1) => rint(-1),
            _ => rint(0),
        }));
        StructureConsts::new(sc.names.clone(), sc.table.clone(), Some(conj)).unwrap()
    }

    /// Q[u]/(u^3 - 2).
    pub fn cube_root_of_two() -> Arc<Self> {
        Self::adjoin_root("u", &[rint(-2), rint(0), rint(0), rint(1)]).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.names.len()
    }

    pub fn mul_vec(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let d = self.degree();
        let mut out = vec![Rational::zero(); d];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let prod = xi * yj;
                for (k, c) in self.table[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &prod * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of multiplication by `x` in the basis: column `c` holds the
    /// coordinates of `x * b_c`.
    pub fn reg_rep(&self, x: &[Rational]) -> Matrix<Rational> {
        let d = self.degree();
        Matrix::from_fn(d, d, |e, c| {
            let mut acc = Rational::zero();
            for (a, xa) in x.iter().enumerate() {
                if !xa.is_zero() {
                    acc += xa * &self.table[a][c][e];
                }
            }
            acc
        })
    }

    pub fn show(&self, coords: &[Rational]) -> String {
        let mut parts = Vec::new();
        for (i, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if i == 0 {
                parts.push(c.to_string());
            } else if c.is_one() {
                parts.push(self.names[i].clone());
            } else {
                parts.push(format!("{}*{}", c, self.names[i]));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

fn unit_vec(d: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); d];
    v[i] = Rational::one();
    v
}

/// Check that a linear map respects products and fixes 1.
fn validate_ring_map(sc: &StructureConsts, aut: &Automorphism) -> Result<()> {
    let Automorphism::Linear(m) = aut else {
        if aut.is_identity() {
            return Ok(());
        }
        return Err(Error::invalid("extension automorphisms must be linear maps"));
    };
    let d = sc.degree();
    if m.rows() != d || m.cols() != d {
        return Err(Error::invalid("automorphism matrix has the wrong shape"));
    }
    let apply = |v: &[Rational]| -> Vec<Rational> {
        (0..d)
            .map(|e| {
                (0..d)
                    .map(|c| m.get(e, c) * &v[c])
                    .fold(Rational::zero(), |a, b| a + b)
            })
            .collect()
    };
    if apply(&unit_vec(d, 0)) != unit_vec(d, 0) {
        return Err(Error::invalid("automorphism must fix 1"));
    }
    for i in 0..d {
        for j in 0..d {
            let lhs = apply(&sc.table[i][j]);
            let rhs = sc.mul_vec(&apply(&unit_vec(d, i)), &apply(&unit_vec(d, j)));
            if lhs != rhs {
                return Err(Error::invalid(format!(
                    "map is not multiplicative on ({}, {})",
                    sc.names[i], sc.names[j]
                )));
            }
        }
    }
    Ok(())
}

/// An element of a structure-constant field. `Scalar(c)` is `c * 1` and
/// needs no table, which gives context-free zero and one.
#[derive(Clone, Debug)]
pub enum FieldExtElem {
    Scalar(Rational),
    Ext(Arc<StructureConsts>, Vec<Rational>),
}

impl FieldExtElem {
    pub fn from_coords(sc: Arc<StructureConsts>, coords: Vec<Rational>) -> Self {
        assert_eq!(coords.len(), sc.degree());
        FieldExtElem::Ext(sc, coords)
    }

    pub fn basis(sc: &Arc<StructureConsts>, i: usize) -> Self {
        FieldExtElem::Ext(sc.clone(), unit_vec(sc.degree(), i))
    }

    pub fn table(&self) -> Option<&Arc<StructureConsts>> {
        match self {
            FieldExtElem::Scalar(_) => None,
            FieldExtElem::Ext(sc, _) => Some(sc),
        }
    }

    pub fn coords(&self, sc: &StructureConsts) -> Vec<Rational> {
        match self {
            FieldExtElem::Scalar(c) => {
                let mut v = vec![Rational::zero(); sc.degree()];
                v[0] = c.clone();
                v
            }
            FieldExtElem::Ext(own, v) => {
                assert!(own.as_ref() == sc, "structure constant table mismatch");
                v.clone()
            }
        }
    }

    fn unify<'a>(a: &'a Self, b: &'a Self) -> Option<&'a Arc<StructureConsts>> {
        match (a.table(), b.table()) {
            (Some(x), Some(y)) => {
                assert!(
                    Arc::ptr_eq(x, y) || x.as_ref() == y.as_ref(),
                    "structure constant table mismatch"
                );
                Some(x)
            }
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        }
    }

    fn zip(a: &Self, b: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        match Self::unify(a, b) {
            None => {
                let (FieldExtElem::Scalar(x), FieldExtElem::Scalar(y)) = (a, b) else {
                    unreachable!()
                };
                FieldExtElem::Scalar(f(x, y))
            }
            Some(sc) => {
                let av = a.coords(sc);
                let bv = b.coords(sc);
                FieldExtElem::Ext(
                    sc.clone(),
                    av.iter().zip(bv.iter()).map(|(x, y)| f(x, y)).collect(),
                )
            }
        }
    }
}

impl PartialEq for FieldExtElem {
    fn eq(&self, other: &Self) -> bool {
        match Self::unify(self, other) {
            None => {
                let (FieldExtElem::Scalar(x), FieldExtElem::Scalar(y)) = (self, other) else {
                    unreachable!()
                };
                x == y
            }
            Some(sc) => self.coords(sc) == other.coords(sc),
        }
    }
}

impl fmt::Display for FieldExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldExtElem::Scalar(c) => write!(f, "{c}"),
            FieldExtElem::Ext(sc, v) => write!(f, "{}", sc.show(v)),
        }
    }
}

impl Zero for FieldExtElem {
    fn zero() -> Self {
        FieldExtElem::Scalar(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        match self {
            FieldExtElem::Scalar(c) => c.is_zero(),
            FieldExtElem::Ext(_, v) => v.iter().all(|c| c.is_zero()),
        }
    }
}

impl One for FieldExtElem {
    fn one() -> Self {
        FieldExtElem::Scalar(Rational::one())
    }
}

impl std::ops::Add for FieldExtElem {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::zip(&self, &rhs, |a, b| a + b)
    }
}

impl Sub for FieldExtElem {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::zip(&self, &rhs, |a, b| a - b)
    }
}

impl Neg for FieldExtElem {
    type Output = Self;
    fn neg(self) -> Self {
        match self {
            FieldExtElem::Scalar(c) => FieldExtElem::Scalar(-c),
            FieldExtElem::Ext(sc, v) => FieldExtElem::Ext(sc, v.into_iter().map(|c| -c).collect()),
        }
    }
}

impl Mul for FieldExtElem {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        match Self::unify(&self, &rhs) {
            None => {
                let (FieldExtElem::Scalar(x), FieldExtElem::Scalar(y)) = (&self, &rhs) else {
                    unreachable!()
                };
                FieldExtElem::Scalar(x * y)
            }
            Some(sc) => {
                let sc = sc.clone();
                let out = sc.mul_vec(&self.coords(&sc), &rhs.coords(&sc));
                FieldExtElem::Ext(sc, out)
            }
        }
    }
}

impl RingElem for FieldExtElem {
    fn scale(&self, c: &Rational) -> Self {
        match self {
            FieldExtElem::Scalar(x) => FieldExtElem::Scalar(x * c),
            FieldExtElem::Ext(sc, v) => {
                FieldExtElem::Ext(sc.clone(), v.iter().map(|x| x * c).collect())
            }
        }
    }

    fn unit_inv(&self) -> Option<Self> {
        match self {
            FieldExtElem::Scalar(c) => {
                if c.is_zero() {
                    None
                } else {
                    Some(FieldExtElem::Scalar(c.recip()))
                }
            }
            FieldExtElem::Ext(sc, v) => {
                let inv = invert(&sc.reg_rep(v))?;
                let d = sc.degree();
                Some(FieldExtElem::Ext(
                    sc.clone(),
                    (0..d).map(|e| inv.get(e, 0).clone()).collect(),
                ))
            }
        }
    }

    fn conj(&self) -> Self {
        match self {
            FieldExtElem::Scalar(_) => self.clone(),
            FieldExtElem::Ext(sc, _) => match &sc.conj {
                None => self.clone(),
                Some(aut) => self.apply_aut(aut).expect("validated involution"),
            },
        }
    }

    fn apply_aut(&self, aut: &Automorphism) -> Result<Self> {
        match (self, aut) {
            (_, a) if a.is_identity() => Ok(self.clone()),
            (FieldExtElem::Scalar(_), Automorphism::Linear(_)) => Ok(self.clone()),
            (FieldExtElem::Ext(sc, v), Automorphism::Linear(m)) => {
                let d = sc.degree();
                if m.rows() != d || m.cols() != d {
                    return Err(Error::invalid("automorphism matrix has the wrong shape"));
                }
                let out: Vec<Rational> = (0..d)
                    .map(|e| {
                        (0..d)
                            .map(|c| m.get(e, c) * &v[c])
                            .fold(Rational::zero(), |a, b| a + b)
                    })
                    .collect();
                Ok(FieldExtElem::Ext(sc.clone(), out))
            }
            _ => Err(Error::invalid("unsupported automorphism for a field extension")),
        }
    }
}

impl FieldElem for FieldExtElem {}

/// An embedding of one structure-constant field into another, given by the
/// images of the basis. Validated to be unital, multiplicative and
/// injective.
#[derive(Debug, Clone)]
pub struct FieldEmbedding {
    pub sub: Arc<StructureConsts>,
    pub sup: Arc<StructureConsts>,
    pub images: Vec<Vec<Rational>>,
}

impl FieldEmbedding {
    pub fn new(
        sub: Arc<StructureConsts>,
        sup: Arc<StructureConsts>,
        images: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let (ds, dl) = (sub.degree(), sup.degree());
        if images.len() != ds || images.iter().any(|v| v.len() != dl) {
            return Err(Error::invalid("embedding images must be d_sub vectors of length d_sup"));
        }
        if images[0] != unit_vec(dl, 0) {
            return Err(Error::invalid("embedding must send 1 to 1"));
        }
        for i in 0..ds {
            for j in 0..ds {
                // image(b_i b_j) = image(b_i) image(b_j)
                let prod_sub = &sub.table[i][j];
                let lhs: Vec<Rational> = (0..dl)
                    .map(|e| {
                        (0..ds)
                            .map(|k| &prod_sub[k] * &images[k][e])
                            .fold(Rational::zero(), |a, b| a + b)
                    })
                    .collect();
                let rhs = sup.mul_vec(&images[i], &images[j]);
                if lhs != rhs {
                    return Err(Error::invalid(format!(
                        "embedding is not multiplicative on ({}, {})",
                        sub.names[i], sub.names[j]
                    )));
                }
            }
        }
        let img_matrix = Matrix::from_fn(ds, dl, |i, e| images[i][e].clone());
        if bareiss_rank(&img_matrix) != ds {
            return Err(Error::invalid("embedding is not injective"));
        }
        Ok(FieldEmbedding { sub, sup, images })
    }

    pub fn map_coords(&self, coords: &[Rational]) -> Vec<Rational> {
        let dl = self.sup.degree();
        (0..dl)
            .map(|e| {
                coords
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * &self.images[i][e])
                    .fold(Rational::zero(), |a, b| a + b)
            })
            .collect()
    }
}
