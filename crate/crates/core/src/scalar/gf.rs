//! The prime fields GF(p) for word-sized p.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{FieldElem, Rational, RingElem};

/// An element of GF(p).
///
/// The modulus travels with the element. `modulus == 0` marks the absorbed
/// constants produced by `Zero::zero()` / `One::one()` before they meet a
/// genuine field element; the first mixed operation adopts the other side's
/// modulus. Two distinct nonzero moduli in one operation are a usage bug and
/// panic.
#[derive(Clone, Copy, Debug)]
pub struct GfElem {
    residue: u64,
    modulus: u64,
}

impl GfElem {
    pub fn new(residue: i64, p: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::invalid(format!("modulus {p} is not prime")));
        }
        Ok(Self::reduced(residue, p))
    }

    fn reduced(residue: i64, p: u64) -> Self {
        let r = residue.rem_euclid(p as i64) as u64;
        GfElem { residue: r, modulus: p }
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn unify(a: &GfElem, b: &GfElem) -> u64 {
        match (a.modulus, b.modulus) {
            (0, p) | (p, 0) => p,
            (p, q) if p == q => p,
            (p, q) => panic!("mixed prime-field moduli {p} and {q}"),
        }
    }

    fn with_mod(&self, p: u64) -> GfElem {
        if p == 0 || self.modulus == p {
            *self
        } else if self.modulus == 0 {
            // Absorbed constants use wrapping two's-complement arithmetic,
            // so reinterpret as a signed integer before reducing.
            GfElem { residue: (self.residue as i64).rem_euclid(p as i64) as u64, modulus: p }
        } else {
            GfElem { residue: self.residue % p, modulus: p }
        }
    }
}

impl PartialEq for GfElem {
    fn eq(&self, other: &Self) -> bool {
        let p = GfElem::unify(self, other);
        if p == 0 {
            self.residue == other.residue
        } else {
            self.with_mod(p).residue == other.with_mod(p).residue
        }
    }
}
impl Eq for GfElem {}

impl fmt::Display for GfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

impl Add for GfElem {
    type Output = GfElem;
    fn add(self, rhs: GfElem) -> GfElem {
        let p = GfElem::unify(&self, &rhs);
        if p == 0 {
            return GfElem { residue: self.residue.wrapping_add(rhs.residue), modulus: 0 };
        }
        let r = (self.with_mod(p).residue as u128 + rhs.with_mod(p).residue as u128) % p as u128;
        GfElem { residue: r as u64, modulus: p }
    }
}

impl Sub for GfElem {
    type Output = GfElem;
    fn sub(self, rhs: GfElem) -> GfElem {
        self + (-rhs)
    }
}

impl Neg for GfElem {
    type Output = GfElem;
    fn neg(self) -> GfElem {
        if self.modulus == 0 {
            // Stays symbolic; only 0 and 1 arise before unification.
            return GfElem { residue: self.residue.wrapping_neg(), modulus: 0 };
        }
        GfElem { residue: (self.modulus - self.residue) % self.modulus, modulus: self.modulus }
    }
}

impl Mul for GfElem {
    type Output = GfElem;
    fn mul(self, rhs: GfElem) -> GfElem {
        let p = GfElem::unify(&self, &rhs);
        if p == 0 {
            return GfElem { residue: self.residue.wrapping_mul(rhs.residue), modulus: 0 };
        }
        let r = (self.with_mod(p).residue as u128 * rhs.with_mod(p).residue as u128) % p as u128;
        GfElem { residue: r as u64, modulus: p }
    }
}

impl Zero for GfElem {
    fn zero() -> Self {
        GfElem { residue: 0, modulus: 0 }
    }
    fn is_zero(&self) -> bool {
        self.residue == 0
    }
}

impl One for GfElem {
    fn one() -> Self {
        GfElem { residue: 1, modulus: 0 }
    }
}

impl RingElem for GfElem {
    fn scale(&self, c: &Rational) -> Self {
        if self.modulus == 0 {
            panic!("cannot scale a modulus-free constant by a rational");
        }
        let p = self.modulus;
        let num = GfElem::reduced(mod_i(c.numer(), p), p);
        let den = GfElem::reduced(mod_i(c.denom(), p), p);
        let dinv = den.unit_inv().expect("rational denominator divisible by the modulus");
        *self * num * dinv
    }

    fn unit_inv(&self) -> Option<Self> {
        if self.residue == 0 {
            return None;
        }
        let p = self.modulus;
        assert!(p != 0, "inverse of a modulus-free constant");
        Some(GfElem { residue: pow_mod(self.residue, p - 2, p), modulus: p })
    }
}

impl FieldElem for GfElem {}

fn mod_i(n: &num_bigint::BigInt, p: u64) -> i64 {
    use num_integer::Integer;
    let (_, r) = n.div_mod_floor(&num_bigint::BigInt::from(p));
    // r is in [0, p) and p < 2^63, so this fits.
    let digits = r.to_u64_digits().1;
    *digits.first().unwrap_or(&0) as i64
}

/// A handle for GF(p): validates the modulus once, then mints elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GfField {
    p: u64,
}

impl GfField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::invalid(format!("modulus {p} is not prime")));
        }
        Ok(GfField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, v: i64) -> GfElem {
        GfElem::reduced(v, self.p)
    }

    pub fn from_rational(&self, q: &Rational) -> Result<GfElem> {
        let den = self.elem(mod_i(q.denom(), self.p));
        let dinv = den
            .unit_inv()
            .ok_or_else(|| Error::invalid("denominator divisible by the modulus"))?;
        Ok(self.elem(mod_i(q.numer(), self.p)) * dinv)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u64 = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 (the fixed witness set is exact below
/// 3.3e24).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A uniformly sampled prime with the requested bit length (30..=62).
pub fn random_prime(bits: u32, rng: &mut impl Rng) -> Result<u64> {
    if !(30..=62).contains(&bits) {
        return Err(Error::invalid(format!("prime_bits {bits} outside 30..=62")));
    }
    let lo = 1u64 << (bits - 1);
    let hi = 1u64 << bits;
    for _ in 0..4096 {
        let c = rng.gen_range(lo..hi) | 1;
        if is_prime_u64(c) {
            return Ok(c);
        }
    }
    Err(Error::internal("prime sampling exhausted its attempt budget"))
}
