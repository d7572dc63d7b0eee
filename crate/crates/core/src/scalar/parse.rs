//! A small expression parser shared by every scalar and ring-element syntax:
//! `5/6`, `3*t^2 - 1`, `z1^-2*z2^3`, `2 - z - z^-1`, `(1,0)*s + (0,1)`.
//!
//! The grammar is fixed; what names and tuples mean is supplied by the ring
//! at hand through [`ParseCtx`].

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational, RingElem};

/// Intermediate parse value: rational literals stay symbolic until they meet
/// a ring element, so `1/2 * s` scales rather than requiring division in the
/// ring.
#[derive(Clone, Debug)]
pub enum Value<T> {
    Rat(Rational),
    Elem(T),
}

/// Ring-specific parsing hooks.
pub trait ParseCtx<T: RingElem> {
    /// Resolve a bare identifier (a variable, a group element, a basis name).
    fn atom(&self, name: &str) -> Result<T>;

    /// Embed a rational constant.
    fn embed(&self, q: &Rational) -> Result<T>;

    /// `(a, b, ...)` tuples; unsupported unless the ring has components.
    fn tuple(&self, _parts: Vec<Value<T>>) -> Result<T> {
        Err(Error::invalid("tuple syntax is not supported by this ring"))
    }

    /// `x^e` for a ring element; `e` may be negative only when `x` is a unit
    /// the ring knows how to invert.
    fn pow_elem(&self, base: &T, exp: i64) -> Result<T> {
        if exp < 0 {
            let inv = base
                .unit_inv()
                .ok_or_else(|| Error::invalid("negative power of a non-unit"))?;
            return self.pow_elem(&inv, -exp);
        }
        let mut acc = self.embed(&Rational::from_integer(1.into()))?;
        for _ in 0..exp {
            acc = acc * base.clone();
        }
        Ok(acc)
    }

    /// `a / b` with `b` a ring element.
    fn invert(&self, x: &T) -> Result<T> {
        x.unit_inv().ok_or_else(|| Error::invalid("division by a non-unit"))
    }
}

pub fn parse_scalar<T: RingElem>(src: &str, ctx: &dyn ParseCtx<T>) -> Result<T> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0, ctx };
    let v = p.expr()?;
    p.expect_end()?;
    match v {
        Value::Rat(q) => ctx.embed(&q),
        Value::Elem(e) => Ok(e),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            ',' => {
                out.push((i, Tok::Comma));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(src[start..i].to_string())));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Name(src[start..i].to_string())));
            }
            other => return Err(Error::parse(i, format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a, T: RingElem> {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    ctx: &'a dyn ParseCtx<T>,
}

impl<'a, T: RingElem> Parser<'a, T> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn at(&self) -> usize {
        self.tokens.get(self.pos).map_or(usize::MAX, |(i, _)| *i)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect_end(&self) -> Result<()> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(Error::parse(self.at(), "trailing input"))
        }
    }

    fn expr(&mut self) -> Result<Value<T>> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = self.add(acc, rhs)?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    let rhs = self.neg(rhs);
                    acc = self.add(acc, rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Value<T>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = self.mul(acc, rhs)?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = self.div(acc, rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Value<T>> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let v = self.unary()?;
            return Ok(self.neg(v));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Value<T>> {
        let base = self.atom()?;
        if !matches!(self.peek(), Some(Tok::Caret)) {
            return Ok(base);
        }
        self.bump();
        let mut sign = 1i64;
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            sign = -1;
        }
        let at = self.at();
        let Some(Tok::Int(digits)) = self.bump() else {
            return Err(Error::parse(at, "expected an integer exponent"));
        };
        let exp: i64 = digits
            .parse()
            .map_err(|_| Error::parse(at, "exponent out of range"))?;
        let exp = sign * exp;
        match base {
            Value::Rat(q) => {
                if exp < 0 && q.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                let mut acc = Rational::from_integer(1.into());
                let b = if exp < 0 { q.recip() } else { q };
                for _ in 0..exp.unsigned_abs() {
                    acc *= b.clone();
                }
                Ok(Value::Rat(acc))
            }
            Value::Elem(e) => Ok(Value::Elem(self.ctx.pow_elem(&e, exp)?)),
        }
    }

    fn atom(&mut self) -> Result<Value<T>> {
        let at = self.at();
        match self.bump() {
            Some(Tok::Int(digits)) => {
                let q: Rational = digits
                    .parse()
                    .map_err(|_| Error::parse(at, "bad integer literal"))?;
                Ok(Value::Rat(q))
            }
            Some(Tok::Name(name)) => Ok(Value::Elem(self.ctx.atom(&name)?)),
            Some(Tok::LParen) => {
                let mut parts = vec![self.expr()?];
                loop {
                    match self.bump() {
                        Some(Tok::RParen) => break,
                        Some(Tok::Comma) => parts.push(self.expr()?),
                        _ => return Err(Error::parse(at, "unclosed parenthesis")),
                    }
                }
                if parts.len() == 1 {
                    Ok(parts.pop().unwrap())
                } else {
                    Ok(Value::Elem(self.ctx.tuple(parts)?))
                }
            }
            _ => Err(Error::parse(at, "expected a value")),
        }
    }

    fn lift(&self, v: Value<T>) -> Result<T> {
        match v {
            Value::Rat(q) => self.ctx.embed(&q),
            Value::Elem(e) => Ok(e),
        }
    }

    fn add(&self, a: Value<T>, b: Value<T>) -> Result<Value<T>> {
        match (a, b) {
            (Value::Rat(x), Value::Rat(y)) => Ok(Value::Rat(x + y)),
            (a, b) => Ok(Value::Elem(self.lift(a)? + self.lift(b)?)),
        }
    }

    fn neg(&self, a: Value<T>) -> Value<T> {
        match a {
            Value::Rat(x) => Value::Rat(-x),
            Value::Elem(e) => Value::Elem(-e),
        }
    }

    fn mul(&self, a: Value<T>, b: Value<T>) -> Result<Value<T>> {
        match (a, b) {
            (Value::Rat(x), Value::Rat(y)) => Ok(Value::Rat(x * y)),
            (Value::Rat(x), Value::Elem(e)) | (Value::Elem(e), Value::Rat(x)) => {
                Ok(Value::Elem(e.scale(&x)))
            }
            (Value::Elem(x), Value::Elem(y)) => Ok(Value::Elem(x * y)),
        }
    }

    fn div(&self, a: Value<T>, b: Value<T>) -> Result<Value<T>> {
        match (a, b) {
            (Value::Rat(x), Value::Rat(y)) => {
                if y.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Value::Rat(x / y))
                }
            }
            (a, Value::Rat(y)) => {
                if y.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                let e = self.lift(a)?;
                Ok(Value::Elem(e.scale(&y.recip())))
            }
            (a, Value::Elem(d)) => {
                let inv = self.ctx.invert(&d)?;
                let e = self.lift(a)?;
                Ok(Value::Elem(e * inv))
            }
        }
    }
}

/// Context for plain rational scalars: no names, no tuples.
pub struct RationalCtx;

impl ParseCtx<Rational> for RationalCtx {
    fn atom(&self, name: &str) -> Result<Rational> {
        Err(Error::invalid(format!("unknown name {name:?} in a rational")))
    }
    fn embed(&self, q: &Rational) -> Result<Rational> {
        Ok(q.clone())
    }
    fn invert(&self, x: &Rational) -> Result<Rational> {
        if x.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(x.recip())
        }
    }
}

/// Parse with the fallback fast path for plain `a/b` literals.
pub fn parse_rational_expr(src: &str) -> Result<Rational> {
    if let Ok(q) = parse_rational(src) {
        return Ok(q);
    }
    parse_scalar(src, &RationalCtx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn rational_expressions() {
        assert_eq!(parse_rational_expr("1/2 + 1/3").unwrap(), rat(5, 6));
        assert_eq!(parse_rational_expr("-3").unwrap(), rat(-3, 1));
        assert_eq!(parse_rational_expr("2^-2").unwrap(), rat(1, 4));
        assert!(parse_rational_expr("1/0").is_err());
        assert!(parse_rational_expr("1 +").is_err());
    }
}
