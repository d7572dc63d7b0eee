//! Sparse multivariate (Laurent) polynomials with a deterministic term order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{FieldElem, Rational, RingElem};

/// A monomial: variable name -> nonzero exponent. Negative exponents are
/// legal (Laurent monomials). Variables order lexicographically by name and
/// monomials by graded-lex, so every iteration order in this crate is
/// reproducible.
#[derive(Clone, PartialEq, Eq, Debug, Hash, Default)]
pub struct Mono(pub BTreeMap<String, i64>);

impl Mono {
    pub fn unit() -> Self {
        Mono(BTreeMap::new())
    }

    pub fn var(name: &str, exp: i64) -> Self {
        let mut m = BTreeMap::new();
        if exp != 0 {
            m.insert(name.to_string(), exp);
        }
        Mono(m)
    }

    pub fn total_degree(&self) -> i64 {
        self.0.values().sum()
    }

    pub fn exponent(&self, name: &str) -> i64 {
        self.0.get(name).copied().unwrap_or(0)
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn product(&self, other: &Mono) -> Mono {
        let mut m = self.0.clone();
        for (v, e) in &other.0 {
            let slot = m.entry(v.clone()).or_insert(0);
            *slot += e;
            if *slot == 0 {
                m.remove(v);
            }
        }
        Mono(m)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// A polynomial as a map from monomials to nonzero coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct MultiPoly<K: RingElem> {
    terms: BTreeMap<Mono, K>,
}

impl<K: RingElem> MultiPoly<K> {
    pub fn constant(c: K) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::unit(), c);
        }
        MultiPoly { terms }
    }

    pub fn var(name: &str, coeff: K) -> Self {
        Self::monomial(Mono::var(name, 1), coeff)
    }

    pub fn monomial(m: Mono, coeff: K) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(m, coeff);
        }
        MultiPoly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &K)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|m| m.0.keys().cloned())
            .collect()
    }

    /// Largest total degree among terms (0 for the zero polynomial).
    pub fn total_degree(&self) -> i64 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: &str) -> i64 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, var: &str) -> i64 {
        self.terms.keys().map(|m| m.exponent(var)).min().unwrap_or(0)
    }

    /// The graded-lex-largest term.
    pub fn leading(&self) -> Option<(&Mono, &K)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, m: &Mono) -> Option<&K> {
        self.terms.get(m)
    }

    fn insert_add(terms: &mut BTreeMap<Mono, K>, m: Mono, c: K) {
        if c.is_zero() {
            return;
        }
        match terms.remove(&m) {
            None => {
                terms.insert(m, c);
            }
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    terms.insert(m, s);
                }
            }
        }
    }

    pub fn map_coeffs<L: RingElem>(&self, f: impl Fn(&K) -> L) -> MultiPoly<L> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                terms.insert(m.clone(), v);
            }
        }
        MultiPoly { terms }
    }

    /// Evaluate at a point. `lift` maps coefficients into the target field,
    /// `point` must cover every variable; Laurent exponents invert there.
    pub fn eval_in<F: FieldElem>(
        &self,
        lift: &dyn Fn(&K) -> Result<F>,
        point: &BTreeMap<String, F>,
    ) -> Result<F> {
        let mut acc = F::zero();
        for (m, c) in &self.terms {
            let mut t = lift(c)?;
            for (v, e) in &m.0 {
                let x = point
                    .get(v)
                    .ok_or_else(|| Error::invalid(format!("no value for variable {v}")))?;
                let base = if *e < 0 { x.inv()? } else { x.clone() };
                for _ in 0..e.unsigned_abs() {
                    t = t * base.clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Substitute a single variable by a scalar, keeping the others.
    pub fn eval_var(&self, var: &str, x: &K) -> Result<Self>
    where
        K: FieldElem,
    {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            let mut rest = m.clone();
            rest.0.remove(var);
            let base = if e < 0 { x.inv()? } else { x.clone() };
            let mut coeff = c.clone();
            for _ in 0..e.unsigned_abs() {
                coeff = coeff * base.clone();
            }
            Self::insert_add(&mut terms, rest, coeff);
        }
        Ok(MultiPoly { terms })
    }

    /// `Some(var)` when every term involves only `var` (constants allowed).
    pub fn single_variable(&self) -> Option<Option<String>> {
        let vars = self.variables();
        match vars.len() {
            0 => Some(None),
            1 => Some(Some(vars.into_iter().next().unwrap())),
            _ => None,
        }
    }

    /// Dense coefficient vector `[c_0, ..., c_d]` for a univariate
    /// polynomial in `var` with nonnegative exponents.
    pub fn dense_coeffs(&self, var: &str) -> Result<Vec<K>> {
        if self.is_zero() {
            return Ok(vec![]);
        }
        let mut out = vec![K::zero(); (self.degree_in(var) + 1) as usize];
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e < 0 || m.0.len() > usize::from(e != 0) {
                return Err(Error::invalid("polynomial is not univariate with nonnegative exponents"));
            }
            out[e as usize] = c.clone();
        }
        Ok(out)
    }

    pub fn from_dense(var: &str, coeffs: &[K]) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.insert(Mono::var(var, e as i64), c.clone());
            }
        }
        MultiPoly { terms }
    }

    /// Divide every coefficient by the graded-lex leading coefficient, when
    /// it is a unit. This is the content normalization used for canonical
    /// fraction representatives.
    pub fn normalize_leading(&self) -> (Self, K)
    where
        K: FieldElem,
    {
        match self.leading() {
            None => (self.clone(), K::one()),
            Some((_, lc)) => {
                let inv = lc.inv().expect("leading coefficient of a nonzero polynomial");
                let lc = lc.clone();
                (self.map_coeffs(|c| c.clone() * inv.clone()), lc)
            }
        }
    }
}

impl<K: FieldElem> MultiPoly<K> {
    /// Quotient and remainder by a nonzero univariate divisor in `var`.
    pub fn div_rem_univar(&self, rhs: &Self, var: &str) -> Result<(Self, Self)> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let num = self.dense_coeffs(var)?;
        let den = rhs.dense_coeffs(var)?;
        let (q, r) = dense_div_rem(&num, &den)?;
        Ok((Self::from_dense(var, &q), Self::from_dense(var, &r)))
    }

    /// Monic gcd of two univariate polynomials in `var`.
    pub fn gcd_univar(&self, rhs: &Self, var: &str) -> Result<Self> {
        let mut a = self.dense_coeffs(var)?;
        let mut b = rhs.dense_coeffs(var)?;
        while !b.is_empty() {
            let (_, r) = dense_div_rem(&a, &b)?;
            a = b;
            b = r;
        }
        if a.is_empty() {
            return Ok(Self::zero());
        }
        let lc = a.last().unwrap().inv()?;
        let monic: Vec<K> = a.iter().map(|c| c.clone() * lc.clone()).collect();
        Ok(Self::from_dense(var, &monic))
    }
}

fn trim_zeros<K: RingElem>(v: &mut Vec<K>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn dense_div_rem<K: FieldElem>(num: &[K], den: &[K]) -> Result<(Vec<K>, Vec<K>)> {
    let mut den = den.to_vec();
    trim_zeros(&mut den);
    if den.is_empty() {
        return Err(Error::DivisionByZero);
    }
    let mut rem = num.to_vec();
    trim_zeros(&mut rem);
    let dd = den.len() - 1;
    let lead_inv = den[dd].inv()?;
    if rem.len() <= dd {
        return Ok((vec![], rem));
    }
    let mut quo = vec![K::zero(); rem.len() - dd];
    while rem.len() > dd {
        let k = rem.len() - 1 - dd;
        let q = rem.last().unwrap().clone() * lead_inv.clone();
        quo[k] = q.clone();
        for i in 0..=dd {
            let t = rem[k + i].clone() - q.clone() * den[i].clone();
            rem[k + i] = t;
        }
        trim_zeros(&mut rem);
    }
    Ok((quo, rem))
}

impl<K: RingElem> Zero for MultiPoly<K> {
    fn zero() -> Self {
        MultiPoly { terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<K: RingElem + One> One for MultiPoly<K> {
    fn one() -> Self {
        MultiPoly::constant(K::one())
    }
}

impl<K: RingElem> Add for MultiPoly<K> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut terms = self.terms;
        for (m, c) in rhs.terms {
            Self::insert_add(&mut terms, m, c);
        }
        MultiPoly { terms }
    }
}

impl<K: RingElem> Sub for MultiPoly<K> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<K: RingElem> Neg for MultiPoly<K> {
    type Output = Self;
    fn neg(self) -> Self {
        MultiPoly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl<K: RingElem> Mul for MultiPoly<K> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                Self::insert_add(&mut terms, ma.product(mb), ca.clone() * cb.clone());
            }
        }
        MultiPoly { terms }
    }
}

impl<K: RingElem> fmt::Display for MultiPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        // Descending order reads like handwritten polynomials.
        for (m, c) in self.terms.iter().rev() {
            let cs = c.to_string();
            let (sign, mag) = match cs.strip_prefix('-') {
                Some(rest) => ("-", rest.to_string()),
                None => ("+", cs),
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            let needs_coeff = mag != "1" || m.is_unit();
            let wrapped = if mag.contains(['+', ' ']) { format!("({mag})") } else { mag };
            if needs_coeff && m.is_unit() {
                write!(f, "{wrapped}")?;
            } else if needs_coeff {
                write!(f, "{wrapped}*{m}")?;
            } else {
                write!(f, "{m}")?;
            }
        }
        Ok(())
    }
}

impl<K: RingElem> RingElem for MultiPoly<K> {
    fn scale(&self, c: &Rational) -> Self {
        self.map_coeffs(|k| k.scale(c))
    }

    fn unit_inv(&self) -> Option<Self> {
        // Units of R[x...] over a reduced coefficient ring are unit constants.
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        if !m.is_unit() {
            return None;
        }
        c.unit_inv().map(MultiPoly::constant)
    }

    fn conj(&self) -> Self {
        self.map_coeffs(|c| c.conj())
    }
}
