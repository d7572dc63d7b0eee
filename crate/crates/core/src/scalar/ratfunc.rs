//! Fractions of multivariate polynomials.
//!
//! Univariate fractions are kept fully reduced (gcd removed, monic
//! denominator), so equality is structural. Multivariate fractions are only
//! leading-coefficient normalized and compare by cross-multiplication; a full
//! multivariate gcd buys nothing here.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::poly::{Mono, MultiPoly};
use crate::scalar::{FieldElem, Rational, RingElem};

#[derive(Clone, Debug)]
pub struct RatFunc<K: FieldElem> {
    num: MultiPoly<K>,
    den: MultiPoly<K>,
}

impl<K: FieldElem> RatFunc<K> {
    pub fn new(num: MultiPoly<K>, den: MultiPoly<K>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: MultiPoly<K>, den: MultiPoly<K>) -> Self {
        if num.is_zero() {
            return RatFunc { num, den: MultiPoly::one() };
        }
        let mut num = num;
        let mut den = den;
        // Shared single variable: cancel the gcd.
        if let (Some(vn), Some(vd)) = (num.single_variable(), den.single_variable()) {
            let var = match (vn, vd) {
                (Some(a), Some(b)) if a == b => Some(a),
                (Some(a), None) => Some(a),
                (None, Some(b)) => Some(b),
                (None, None) => None,
                _ => None,
            };
            if let Some(v) = var {
                if num.min_degree_in(&v) >= 0 && den.min_degree_in(&v) >= 0 {
                    if let Ok(g) = num.gcd_univar(&den, &v) {
                        if !g.is_zero() && g.total_degree() > 0 {
                            num = num.div_rem_univar(&g, &v).expect("gcd divides").0;
                            den = den.div_rem_univar(&g, &v).expect("gcd divides").0;
                        }
                    }
                }
            } else {
                // Constant over constant.
                let c = num
                    .coefficient(&Mono::unit())
                    .cloned()
                    .unwrap_or_else(K::zero);
                let d = den
                    .coefficient(&Mono::unit())
                    .cloned()
                    .expect("nonzero constant denominator");
                let v = c * d.inv().expect("nonzero denominator");
                return RatFunc { num: MultiPoly::constant(v), den: MultiPoly::one() };
            }
        }
        // Make the denominator's leading coefficient one.
        let (den_n, lc) = den.normalize_leading();
        let lc_inv = lc.inv().expect("nonzero denominator");
        let num_n = num.map_coeffs(|c| c.clone() * lc_inv.clone());
        RatFunc { num: num_n, den: den_n }
    }

    pub fn from_poly(p: MultiPoly<K>) -> Self {
        Self::reduced(p, MultiPoly::one())
    }

    /// Embed a Laurent polynomial by clearing negative exponents into the
    /// denominator.
    pub fn from_laurent(p: MultiPoly<K>) -> Self {
        let mut shift = Mono::unit();
        for v in p.variables() {
            let m = p.min_degree_in(&v);
            if m < 0 {
                shift = shift.product(&Mono::var(&v, -m));
            }
        }
        if shift.is_unit() {
            return Self::from_poly(p);
        }
        let num = p * MultiPoly::monomial(shift.clone(), K::one());
        Self::reduced(num, MultiPoly::monomial(shift, K::one()))
    }

    pub fn numerator(&self) -> &MultiPoly<K> {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly<K> {
        &self.den
    }

    /// Evaluate at a point in a field `F`, failing when the denominator
    /// vanishes there.
    pub fn eval_in<F: FieldElem>(
        &self,
        lift: &dyn Fn(&K) -> Result<F>,
        point: &BTreeMap<String, F>,
    ) -> Result<F> {
        let d = self.den.eval_in(lift, point)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.num.eval_in(lift, point)?;
        Ok(n * d.inv()?)
    }

    /// Bound for the total degree contribution of this entry to a minor.
    pub fn degree_weight(&self) -> i64 {
        self.num.total_degree().max(0) + self.den.total_degree().max(0)
    }
}

impl<K: FieldElem> PartialEq for RatFunc<K> {
    fn eq(&self, other: &Self) -> bool {
        if self.num == other.num && self.den == other.den {
            return true;
        }
        // Cross-multiplication covers the non-canonical multivariate case.
        self.num.clone() * other.den.clone() == other.num.clone() * self.den.clone()
    }
}

impl<K: FieldElem> fmt::Display for RatFunc<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl<K: FieldElem> Zero for RatFunc<K> {
    fn zero() -> Self {
        RatFunc { num: MultiPoly::zero(), den: MultiPoly::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<K: FieldElem> One for RatFunc<K> {
    fn one() -> Self {
        RatFunc { num: MultiPoly::one(), den: MultiPoly::one() }
    }
}

impl<K: FieldElem> Add for RatFunc<K> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let num = self.num * rhs.den.clone() + rhs.num * self.den.clone();
        Self::reduced(num, self.den * rhs.den)
    }
}

impl<K: FieldElem> Sub for RatFunc<K> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<K: FieldElem> Neg for RatFunc<K> {
    type Output = Self;
    fn neg(self) -> Self {
        RatFunc { num: -self.num, den: self.den }
    }
}

impl<K: FieldElem> Mul for RatFunc<K> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::reduced(self.num * rhs.num, self.den * rhs.den)
    }
}

impl<K: FieldElem> RingElem for RatFunc<K> {
    fn scale(&self, c: &Rational) -> Self {
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    fn unit_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::reduced(self.den.clone(), self.num.clone()))
        }
    }

    fn conj(&self) -> Self {
        RatFunc { num: self.num.conj(), den: self.den.conj() }
    }
}

impl<K: FieldElem> FieldElem for RatFunc<K> {}
