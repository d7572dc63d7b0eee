//! Rank functions on R[t] through companion representations: reduction
//! modulo a monic polynomial, evaluation at points, averaging over distinct
//! roots, the degree-limit scans, the algebraic-extension regular
//! representation, and the tower consistency driver.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extension::{compress, limit_rank, LimitReport};
use crate::linalg::bareiss_rank;
use crate::matrix::Matrix;
use crate::rank::{FieldRank, RankFunction};
use crate::ring::ops::{ExtFieldOps, QOps};
use crate::ring::{ExtElem, ExtRing, FieldEmbedding, FieldExtElem, RingKind, StructureConsts, UIndex};
use crate::scalar::{rational_str, rint, Rational, RingElem};
use crate::window::{box_window, Schedule};

/// Dense coefficients of an entry of a one-variable polynomial extension.
fn dense_entry<R: RingElem>(ring: &ExtRing<R>, e: &ExtElem<R>) -> Result<Vec<R>> {
    match &ring.kind {
        RingKind::Poly { vars } if vars.len() == 1 => {}
        _ => return Err(Error::invalid("companion ranks need a one-variable polynomial ring")),
    }
    let deg = e
        .support()
        .keys()
        .map(|idx| match idx {
            UIndex::Exp(v) => v[0],
            _ => 0,
        })
        .max()
        .unwrap_or(-1);
    let mut out = vec![ring.base.zero(); (deg + 1).max(0) as usize];
    for (idx, c) in e.support() {
        let UIndex::Exp(v) = idx else {
            return Err(Error::invalid("index does not belong to a polynomial ring"));
        };
        out[v[0] as usize] = c.clone();
    }
    Ok(out)
}

/// The t-degree of the highest entry of `a`.
pub fn matrix_degree<R: RingElem>(ring: &ExtRing<R>, a: &Matrix<ExtElem<R>>) -> Result<i64> {
    let mut deg = 0i64;
    for e in a.iter() {
        deg = deg.max(dense_entry(ring, e)?.len() as i64 - 1);
    }
    Ok(deg.max(0))
}

/// Reduce a dense polynomial over R modulo a monic rational polynomial
/// (synthetic division, no base-ring division needed).
fn reduce_mod<R: RingElem>(poly: &mut Vec<R>, monic: &[Rational], zero: &R) {
    let d = monic.len() - 1;
    while poly.len() > d {
        let lead = poly.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let k = poly.len() - d;
        for (i, c) in monic.iter().take(d).enumerate() {
            if !c.is_zero() {
                let t = poly[k + i].clone() - lead.scale(c);
                poly[k + i] = t;
            }
        }
    }
    while poly.len() < d {
        poly.push(zero.clone());
    }
}

/// The companion representation of a polynomial entry: the d x d base-ring
/// matrix of right multiplication on R[t]/(f) in the power basis. Row r
/// holds the coordinates of t^r * a mod f.
pub fn companion_rep<R: RingElem>(
    ring: &ExtRing<R>,
    entry: &ExtElem<R>,
    monic: &[Rational],
) -> Result<Matrix<R>> {
    let d = monic.len() - 1;
    let dense = dense_entry(ring, entry)?;
    let zero = ring.base.zero();
    let mut rows: Vec<Vec<R>> = Vec::with_capacity(d);
    // t^0 * a
    let mut current = dense;
    {
        let mut first = current.clone();
        reduce_mod(&mut first, monic, &zero);
        rows.push(first);
    }
    for _ in 1..d {
        // multiply by t, keep reduced
        current.insert(0, zero.clone());
        reduce_mod(&mut current, monic, &zero);
        rows.push(current.clone());
    }
    Matrix::from_rows(rows)
}

fn check_monic(monic: &[Rational]) -> Result<usize> {
    let d = monic.len().saturating_sub(1);
    if d == 0 || !monic[d].is_one() {
        return Err(Error::invalid("the modulus must be monic of degree >= 1"));
    }
    Ok(d)
}

/// The normalized companion rank: apply the representation entrywise and
/// divide the base rank of the nd x md blow-up by the degree. Independent of
/// the basis used for R[t]/(f).
pub fn rk_f<R: RingElem>(
    ring: &Arc<ExtRing<R>>,
    a: &Matrix<ExtElem<R>>,
    monic: &[Rational],
) -> Result<Rational> {
    let d = check_monic(monic)?;
    let (n, m) = (a.rows(), a.cols());
    let mut blocks: Vec<Matrix<R>> = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            blocks.push(companion_rep(ring, a.get(i, j), monic)?);
        }
    }
    let big = Matrix::from_fn(n * d, m * d, |r, c| {
        let (i, ri) = (r / d, r % d);
        let (j, cj) = (c / d, c % d);
        blocks[i * m + j].get(ri, cj).clone()
    });
    let rank = ring.base_rank.rank(&big)?;
    Ok(rank / rint(d as i64))
}

/// `rk_f` packaged as a rank function for the axiom harness.
pub struct CompanionRank<R: RingElem> {
    pub ring: Arc<ExtRing<R>>,
    pub monic: Vec<Rational>,
}

impl<R: RingElem> RankFunction<ExtElem<R>> for CompanionRank<R> {
    fn rank(&self, a: &Matrix<ExtElem<R>>) -> Result<Rational> {
        if a.is_empty() {
            return Ok(Rational::zero());
        }
        rk_f(&self.ring, a, &self.monic)
    }
    fn name(&self) -> String {
        format!("companion rank mod degree-{} polynomial", self.monic.len() - 1)
    }
}

/// Evaluate a polynomial matrix at a rational point.
pub fn eval_matrix<R: RingElem>(
    ring: &ExtRing<R>,
    a: &Matrix<ExtElem<R>>,
    x: &Rational,
) -> Result<Matrix<R>> {
    a.try_map(|e| {
        let dense = dense_entry(ring, e)?;
        let mut acc = ring.base.zero();
        let mut power = Rational::one();
        for c in dense {
            acc = acc + c.scale(&power);
            power *= x;
        }
        Ok(acc)
    })
}

/// Average of the evaluation ranks over pairwise distinct roots; equal to
/// `rk_f` with the modulus `prod (t - x_i)`.
pub fn rk_f_by_roots<R: RingElem>(
    ring: &Arc<ExtRing<R>>,
    a: &Matrix<ExtElem<R>>,
    roots: &[Rational],
) -> Result<Rational> {
    if roots.is_empty() {
        return Err(Error::invalid("need at least one root"));
    }
    for (i, x) in roots.iter().enumerate() {
        if roots[..i].contains(x) {
            return Err(Error::invalid(format!("duplicate root {x}")));
        }
    }
    let mut total = Rational::zero();
    for x in roots {
        let evaluated = eval_matrix(ring, a, x)?;
        total += ring.base_rank.rank(&evaluated)?;
    }
    Ok(total / rint(roots.len() as i64))
}

/// The monic polynomial with the given roots.
pub fn poly_from_roots(roots: &[Rational]) -> Vec<Rational> {
    let mut coeffs = vec![Rational::one()];
    for x in roots {
        // multiply by (t - x)
        let mut next = vec![Rational::zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * x;
        }
        coeffs = next;
    }
    coeffs
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub degree: u64,
    pub companion_rank_total: String,
    pub window_rank_total: String,
    pub allowed_gap: String,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceReport {
    pub values: Vec<(u64, String)>,
    pub stabilized: bool,
    pub value: Option<String>,
    pub kappa: usize,
    pub tol: String,
    /// Per-step comparison of the companion rank against the degree-window
    /// rank: the two differ by at most 2 p n once the degree exceeds the
    /// entry degree p.
    pub bound_checks: Vec<BoundCheck>,
    #[serde(skip)]
    pub exact: Option<Rational>,
    #[serde(skip)]
    pub exact_values: Vec<(u64, Rational)>,
}

fn stabilize(values: &[(u64, Rational)], kappa: usize, tol: &Rational) -> (bool, Option<Rational>) {
    if values.len() < kappa {
        return (false, None);
    }
    let tail = &values[values.len() - kappa..];
    let last = &tail[tail.len() - 1].1;
    let ok = tail.iter().all(|(_, v)| {
        let d = v - last;
        let d = if d < Rational::zero() { -d } else { d };
        d <= *tol
    });
    if ok {
        (true, Some(last.clone()))
    } else {
        (false, None)
    }
}

/// The monic family scanned by a degree-limit run: any family works, as
/// long as the degrees grow.
#[derive(Debug, Clone)]
pub enum MonicFamily {
    /// `t^d` for each listed degree.
    Powers,
    /// `prod_{j < d} (t - x_j)` over a stream of pairwise distinct points.
    FromRoots(Vec<Rational>),
}

impl MonicFamily {
    fn modulus(&self, d: u64) -> Result<Vec<Rational>> {
        match self {
            MonicFamily::Powers => {
                let mut monic = vec![Rational::zero(); d as usize + 1];
                monic[d as usize] = Rational::one();
                Ok(monic)
            }
            MonicFamily::FromRoots(points) => {
                if (points.len() as u64) < d {
                    return Err(Error::invalid(format!(
                        "need {d} distinct points, have {}",
                        points.len()
                    )));
                }
                for (i, x) in points.iter().enumerate() {
                    if points[..i].contains(x) {
                        return Err(Error::invalid(format!("duplicate point {x}")));
                    }
                }
                Ok(poly_from_roots(&points[..d as usize]))
            }
        }
    }
}

/// Scan `rk_{t^d}`-style companion ranks along a strictly increasing degree
/// list with moduli `t^d`, cross-checking each step against the
/// degree-window rank.
pub fn monic_sequence_limit<R: RingElem>(
    ring: &Arc<ExtRing<R>>,
    a: &Matrix<ExtElem<R>>,
    degrees: &[u64],
    kappa: usize,
    tol: &Rational,
) -> Result<SequenceReport> {
    monic_sequence_limit_with(ring, a, degrees, &MonicFamily::Powers, kappa, tol)
}

/// As [`monic_sequence_limit`], over any monic family.
pub fn monic_sequence_limit_with<R: RingElem>(
    ring: &Arc<ExtRing<R>>,
    a: &Matrix<ExtElem<R>>,
    degrees: &[u64],
    family: &MonicFamily,
    kappa: usize,
    tol: &Rational,
) -> Result<SequenceReport> {
    if degrees.windows(2).any(|w| w[0] >= w[1]) || degrees.is_empty() {
        return Err(Error::invalid("degrees must be strictly increasing"));
    }
    let p = matrix_degree(ring, a)?;
    let n = a.rows() as i64;
    let mut values = Vec::new();
    let mut bound_checks = Vec::new();
    for &d in degrees {
        let monic = family.modulus(d)?;
        let v = rk_f(ring, a, &monic)?;
        values.push((d, v.clone()));
        if (d as i64) > p {
            let w = box_window(1, d);
            let c = compress(ring, a, &w)?;
            let companion_total = &v * rint(d as i64);
            let gap = &companion_total - &c.rank_value;
            let gap = if gap < Rational::zero() { -gap } else { gap };
            let allowed = rint(2 * p * n);
            bound_checks.push(BoundCheck {
                degree: d,
                companion_rank_total: rational_str(&companion_total),
                window_rank_total: rational_str(&c.rank_value),
                allowed_gap: rational_str(&allowed),
                ok: gap <= allowed,
            });
        }
    }
    let (stabilized, exact) = stabilize(&values, kappa, tol);
    Ok(SequenceReport {
        values: values.iter().map(|(d, v)| (*d, rational_str(v))).collect(),
        stabilized,
        value: exact.as_ref().map(rational_str),
        kappa,
        tol: rational_str(tol),
        bound_checks,
        exact,
        exact_values: values,
    })
}

/// Scan evaluation ranks along a stream of pairwise distinct points. A
/// stream that runs out before stabilizing yields a partial report.
pub fn eval_point_limit<R: RingElem>(
    ring: &Arc<ExtRing<R>>,
    a: &Matrix<ExtElem<R>>,
    points: &[Rational],
    kappa: usize,
    tol: &Rational,
) -> Result<SequenceReport> {
    if points.is_empty() {
        return Err(Error::invalid("need at least one evaluation point"));
    }
    for (i, x) in points.iter().enumerate() {
        if points[..i].contains(x) {
            return Err(Error::invalid(format!("duplicate evaluation point {x}")));
        }
    }
    let mut values = Vec::new();
    for (i, x) in points.iter().enumerate() {
        let evaluated = eval_matrix(ring, a, x)?;
        values.push((i as u64 + 1, ring.base_rank.rank(&evaluated)?));
    }
    let (stabilized, exact) = stabilize(&values, kappa, tol);
    Ok(SequenceReport {
        values: values.iter().map(|(d, v)| (*d, rational_str(v))).collect(),
        stabilized,
        value: exact.as_ref().map(rational_str),
        kappa,
        tol: rational_str(tol),
        bound_checks: vec![],
        exact,
        exact_values: values,
    })
}

/// The regular-representation rank of a matrix over E0 (x) R: replace each
/// entry by the d x d left-multiplication block over R and divide the base
/// rank by d. Equals the window rank at the full window E0 (x) R.
pub fn algebraic_ext_rank<R: RingElem>(
    ring: &Arc<ExtRing<R>>,
    a: &Matrix<ExtElem<R>>,
) -> Result<Rational> {
    let RingKind::FiniteExt { table } = &ring.kind else {
        return Err(Error::invalid("regular representation rank needs a finite extension"));
    };
    let d = table.degree();
    let (n, m) = (a.rows(), a.cols());
    let mut big: Matrix<R> = Matrix::zeros(n * d, m * d);
    for i in 0..n {
        for j in 0..m {
            let x = a.get(i, j);
            for (idx, r) in x.support() {
                let UIndex::Basis(bi) = idx else {
                    return Err(Error::invalid("entry outside the declared extension"));
                };
                // x * b_c = sum_a r_a (b_a b_c); block[e][c] += r_a c_{a c e}
                for c in 0..d {
                    for e in 0..d {
                        let coeff = &table.table[*bi][c][e];
                        if !coeff.is_zero() {
                            let cur = big.get(i * d + e, j * d + c).clone();
                            big.set(i * d + e, j * d + c, cur + r.scale(coeff));
                        }
                    }
                }
            }
        }
    }
    let rank = ring.base_rank.rank(&big)?;
    Ok(rank / rint(d as i64))
}

/// Re-express a matrix over E0 (x) R inside a declared larger extension
/// through a validated embedding.
pub fn map_through_embedding<R: RingElem>(
    emb: &FieldEmbedding,
    sup_ring: &Arc<ExtRing<R>>,
    a: &Matrix<ExtElem<R>>,
) -> Result<Matrix<ExtElem<R>>> {
    let RingKind::FiniteExt { table } = &sup_ring.kind else {
        return Err(Error::invalid("target ring must be a finite extension"));
    };
    if table.as_ref() != emb.sup.as_ref() {
        return Err(Error::invalid("embedding target does not match the ring"));
    }
    a.try_map(|x| {
        let mut acc = ExtElem::zero();
        for (idx, r) in x.support() {
            let UIndex::Basis(bi) = idx else {
                return Err(Error::invalid("entry outside the declared extension"));
            };
            for (e, coeff) in emb.images[*bi].iter().enumerate() {
                if !coeff.is_zero() {
                    acc = acc + sup_ring.elem(UIndex::Basis(e), r.scale(coeff));
                }
            }
        }
        Ok(acc)
    })
}

/// Rank function on matrices over a structure-constant field, computed by
/// the regular-representation blow-up over Q. This is the one-step
/// extension rank of E0 over Q, packaged so it can serve as the base rank
/// of a further extension.
pub struct RegRepRank {
    pub table: Arc<StructureConsts>,
}

impl RankFunction<FieldExtElem> for RegRepRank {
    fn rank(&self, a: &Matrix<FieldExtElem>) -> Result<Rational> {
        let d = self.table.degree();
        let (n, m) = (a.rows(), a.cols());
        let big = Matrix::from_fn(n * d, m * d, |r, c| {
            let (i, e) = (r / d, r % d);
            let (j, cc) = (c / d, c % d);
            let coords = a.get(i, j).coords(&self.table);
            // left multiplication block, column cc, row e
            let mut acc = Rational::zero();
            for (bi, x) in coords.iter().enumerate() {
                if !x.is_zero() {
                    acc += x * &self.table.table[bi][cc][e];
                }
            }
            acc
        });
        Ok(rint(bareiss_rank(&big) as i64) / rint(d as i64))
    }
    fn name(&self) -> String {
        format!("regular-representation rank over a degree-{} extension", self.table.degree())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompositionReport {
    pub two_step: LimitReport,
    pub one_step: LimitReport,
    pub two_step_value: Option<String>,
    pub one_step_value: Option<String>,
    /// Exact agreement verdict; present only when both sides stabilized.
    pub agree: Option<bool>,
}

/// Compare the two-step rank (first the finite extension, then degree
/// windows over it) with the one-step rank (basis-times-degree windows over
/// the ground field) on the same matrix source.
pub fn composition_check(
    table: &Arc<StructureConsts>,
    matrix_src: &str,
    degrees: &[u64],
    kappa: usize,
    tol: &Rational,
) -> Result<CompositionReport> {
    // two-step: degree windows over the extension field as base ring
    let two_ring: Arc<ExtRing<FieldExtElem>> = ExtRing::poly(
        Arc::new(ExtFieldOps { table: table.clone() }),
        Arc::new(RegRepRank { table: table.clone() }),
        vec!["t".to_string()],
    )?;
    let a2 = two_ring.parse_matrix_literal(matrix_src)?;
    let two_report = limit_rank(&two_ring, &a2, &Schedule::Degrees(degrees.to_vec()), kappa, tol)?;

    // one-step: combined basis-times-degree windows over Q
    let one_ring: Arc<ExtRing<Rational>> = ExtRing::finite_ext_poly(
        Arc::new(QOps),
        Arc::new(FieldRank::<Rational>::new()),
        table.clone(),
        "t",
    )?;
    let a1 = one_ring.parse_matrix_literal(matrix_src)?;
    let one_report = limit_rank(&one_ring, &a1, &Schedule::ExtDegrees(degrees.to_vec()), kappa, tol)?;

    let agree = match (&two_report.stabilized_exact, &one_report.stabilized_exact) {
        (Some(u), Some(v)) => Some(u == v),
        _ => None,
    };
    Ok(CompositionReport {
        two_step_value: two_report.stabilized_value.clone(),
        one_step_value: one_report.stabilized_value.clone(),
        two_step: two_report,
        one_step: one_report,
        agree,
    })
}
