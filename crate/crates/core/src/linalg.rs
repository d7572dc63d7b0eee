//! Rank computation: exact Gaussian elimination over a field, fraction-free
//! elimination over the rationals, singular-value rank over complex floats,
//! and randomized evaluation rank over multivariate function fields.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::gf::{random_prime, GfField};
use crate::scalar::{FieldElem, RatFunc, Rational};

/// Row rank of a matrix over an exact field. Dispatches to the type's
/// preferred elimination (fraction-free over Q, plain Gaussian elsewhere).
pub fn rank_field<K: FieldElem>(m: &Matrix<K>) -> usize {
    K::matrix_rank(m)
}

/// Plain Gaussian elimination; the pivot is the first nonzero entry in
/// column order, so results are deterministic.
pub fn gauss_rank<K: FieldElem>(m: &Matrix<K>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let mut rows: Vec<Vec<K>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let (nr, nc) = (rows.len(), m.cols());
    let mut rank = 0;
    for col in 0..nc {
        if rank == nr {
            break;
        }
        let Some(p) = (rank..nr).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot_inv = rows[rank][col].inv().expect("nonzero pivot");
        for r in rank + 1..nr {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone() * pivot_inv.clone();
            for c in col..nc {
                let t = rows[r][c].clone() - factor.clone() * rows[rank][c].clone();
                rows[r][c] = t;
            }
        }
        rank += 1;
    }
    rank
}

/// Reduced row echelon form with its pivot columns.
pub fn rref<K: FieldElem>(m: &Matrix<K>) -> (Matrix<K>, Vec<usize>) {
    let (nr, nc) = (m.rows(), m.cols());
    let mut rows: Vec<Vec<K>> = (0..nr).map(|i| m.row(i).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut lead = 0;
    for col in 0..nc {
        if lead == nr {
            break;
        }
        let Some(p) = (lead..nr).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(lead, p);
        let inv = rows[lead][col].inv().expect("nonzero pivot");
        for c in col..nc {
            let t = rows[lead][c].clone() * inv.clone();
            rows[lead][c] = t;
        }
        for r in 0..nr {
            if r != lead && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..nc {
                    let t = rows[r][c].clone() - factor.clone() * rows[lead][c].clone();
                    rows[r][c] = t;
                }
            }
        }
        pivots.push(col);
        lead += 1;
    }
    let out = Matrix::from_vec(nr, nc, rows.into_iter().flatten().collect());
    (out, pivots)
}

/// Inverse of a square matrix over a field, when it exists.
pub fn invert<K: FieldElem>(m: &Matrix<K>) -> Option<Matrix<K>> {
    let n = m.rows();
    if n != m.cols() {
        return None;
    }
    let aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            m.get(i, j).clone()
        } else if j - n == i {
            K::one()
        } else {
            K::zero()
        }
    });
    let (r, pivots) = rref(&aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(Matrix::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
}

/// Fraction-free (Bareiss) rank over Q: rows are scaled to integers first,
/// which leaves the rank unchanged and bounds intermediate growth.
pub fn bareiss_rank(m: &Matrix<Rational>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let mut rows: Vec<Vec<BigInt>> = (0..m.rows())
        .map(|i| {
            let lcm = m
                .row(i)
                .iter()
                .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            m.row(i)
                .iter()
                .map(|q| q.numer() * (&lcm / q.denom()))
                .collect()
        })
        .collect();
    let (nr, nc) = (rows.len(), m.cols());
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..nc {
        if rank == nr {
            break;
        }
        let Some(p) = (rank..nr).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        for r in rank + 1..nr {
            for c in col + 1..nc {
                let t = (&rows[r][c] * &pivot - &rows[r][col] * &rows[rank][c]) / &prev;
                rows[r][c] = t;
            }
            rows[r][col] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Singular-value rank of a complex matrix: the number of singular values
/// above `rel_tol` times the largest one.
pub fn rank_float(m: &Matrix<Complex64>, rel_tol: f64) -> Result<usize> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::invalid("rel_tol must lie in (0, 1)"));
    }
    if m.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
        return Err(Error::invalid("non-finite matrix entry"));
    }
    if m.is_empty() || m.iter().all(|e| e.re == 0.0 && e.im == 0.0) {
        return Ok(0);
    }
    let dm = nalgebra::DMatrix::from_fn(m.rows(), m.cols(), |i, j| *m.get(i, j));
    let svals = dm.svd(false, false).singular_values;
    let top = svals.iter().cloned().fold(0.0f64, f64::max);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(svals.iter().filter(|&&s| s > rel_tol * top).count())
}

/// Outcome of a randomized rank computation over a fraction field, with the
/// evaluation-failure bound that backs it.
#[derive(Debug, Clone, Serialize)]
pub struct GenericRankReport {
    pub rank: usize,
    pub trials: usize,
    pub prime_bits: u32,
    /// Schwartz-Zippel bound on the probability that every trial
    /// underestimated the rank.
    pub failure_bound: f64,
    pub primes: Vec<u64>,
}

pub const GENERIC_RANK_TRIALS: usize = 5;
pub const GENERIC_RANK_PRIME_BITS: u32 = 62;
const EVAL_RETRIES: usize = 16;

/// Rank of a matrix over the fraction field K(z_1..z_d), computed as the
/// maximum rank of evaluations at uniformly random nonzero points over
/// random prime fields. An underestimate requires every sampled point to hit
/// the zero set of a nonzero minor, which the reported bound controls.
pub fn generic_rank(
    a: &Matrix<RatFunc<Rational>>,
    trials: usize,
    prime_bits: u32,
    rng: &mut impl Rng,
) -> Result<GenericRankReport> {
    if trials < 1 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if a.is_empty() {
        return Ok(GenericRankReport {
            rank: 0,
            trials,
            prime_bits,
            failure_bound: 0.0,
            primes: vec![],
        });
    }
    let mut vars: std::collections::BTreeSet<String> = std::collections::BTreeSet::new();
    for e in a.iter() {
        vars.extend(e.numerator().variables());
        vars.extend(e.denominator().variables());
    }
    let max_weight = a.iter().map(|e| e.degree_weight()).max().unwrap_or(0);
    let minor_degree = (a.rows().min(a.cols()) as i64 * max_weight).max(0) as f64;

    let mut best = 0usize;
    let mut primes = Vec::with_capacity(trials);
    let mut bound = 1.0f64;
    for _ in 0..trials {
        let mut done = false;
        for _attempt in 0..EVAL_RETRIES {
            let p = random_prime(prime_bits, rng)?;
            let field = GfField::new(p)?;
            let mut point = BTreeMap::new();
            for v in &vars {
                point.insert(v.clone(), field.elem(rng.gen_range(1..p as i64)));
            }
            let lift = |q: &Rational| field.from_rational(q);
            match a.try_map(|e| e.eval_in(&lift, &point)) {
                Ok(eval) => {
                    best = best.max(gauss_rank(&eval));
                    primes.push(p);
                    bound *= (minor_degree / (p as f64 - 1.0)).min(1.0);
                    done = true;
                    break;
                }
                Err(Error::DivisionByZero) => continue, // denominator vanished; resample
                Err(e) => return Err(e),
            }
        }
        if !done {
            return Err(Error::EvaluationFailure {
                retries: EVAL_RETRIES,
                msg: "every sampled point hit a denominator zero".into(),
            });
        }
    }
    Ok(GenericRankReport { rank: best, trials, prime_bits, failure_bound: bound, primes })
}
