//! The extension-ring framework: S over a base ring R with a distinguished
//! multiplicative set of module generators: twisted crossed products R*G,
//! polynomial extensions R[t], and finite field extensions E0 (x) R by
//! structure constants, with element arithmetic, automorphism data, and
//! cocycle data.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, MatrixJson};
use crate::rank::RankFunction;
use crate::scalar::parse::{parse_scalar, ParseCtx, Value};
use crate::scalar::{rint, Automorphism, Rational, RingElem};

pub mod group;
pub mod finite_ext;
pub mod ops;
pub mod spec_io;

pub use finite_ext::{FieldEmbedding, FieldExtElem, StructureConsts};
pub use group::{FiniteGroup, GroupSpec};
pub use ops::RingOps;

/// Index into the distinguished left-module basis of an extension: a group
/// element, a (Laurent) monomial exponent vector, an extension-basis index,
/// or a basis-times-monomial pair for composed extensions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum UIndex {
    Exp(Vec<i64>),
    Grp(usize),
    Basis(usize),
    BasisExp(usize, i64),
}

/// The action of the acting set on the base ring.
#[derive(Debug, Clone)]
pub enum ActionSpec {
    Trivial,
    /// One automorphism per finite-group element, indexed like the group.
    PerElement(Vec<Automorphism>),
    /// One automorphism per Z^d coordinate; applied with integer powers.
    PerGenerator(Vec<Automorphism>),
}

/// The 2-cocycle twisting a crossed product.
#[derive(Debug, Clone)]
pub enum CocycleSpec<R> {
    Trivial,
    /// `table[s][t]` is the unit attached to the product of elements s, t.
    Table(Vec<Vec<R>>),
}

/// What kind of extension S is, with its defining data.
#[derive(Debug, Clone)]
pub enum RingKind<R: RingElem> {
    Crossed {
        group: GroupSpec,
        action: ActionSpec,
        cocycle: CocycleSpec<R>,
    },
    Poly {
        vars: Vec<String>,
    },
    FiniteExt {
        table: Arc<StructureConsts>,
    },
    FiniteExtPoly {
        table: Arc<StructureConsts>,
        var: String,
    },
}

/// Record of the validation performed when the ring was built.
#[derive(Debug, Clone, Default)]
pub struct ValidationNote {
    pub exhaustive: bool,
    pub sample_seed: Option<u64>,
    pub notes: Vec<String>,
}

/// A validated extension ring S over a base ring R carrying a rank function.
pub struct ExtRing<R: RingElem> {
    pub kind: RingKind<R>,
    pub base: Arc<dyn RingOps<R>>,
    pub base_rank: Arc<dyn RankFunction<R>>,
    pub validation: ValidationNote,
}

impl<R: RingElem> fmt::Debug for ExtRing<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtRing({})", self.name())
    }
}

const ACTION_RANK_SAMPLES: usize = 6;
const VALIDATION_SEED: u64 = 0xc0cc1e;

impl<R: RingElem> ExtRing<R> {
    /// A (possibly twisted) crossed product of the base ring by a group.
    pub fn crossed(
        base: Arc<dyn RingOps<R>>,
        base_rank: Arc<dyn RankFunction<R>>,
        group: GroupSpec,
        action: ActionSpec,
        cocycle: CocycleSpec<R>,
    ) -> Result<Arc<Self>> {
        let mut validation = ValidationNote::default();
        let ring = ExtRing {
            kind: RingKind::Crossed { group, action, cocycle },
            base,
            base_rank,
            validation: ValidationNote::default(),
        };
        ring.validate_crossed(&mut validation)?;
        let ring = ExtRing { validation, ..ring };
        Ok(Arc::new(ring))
    }

    /// The polynomial extension R[t] (or several commuting variables).
    pub fn poly(
        base: Arc<dyn RingOps<R>>,
        base_rank: Arc<dyn RankFunction<R>>,
        vars: Vec<String>,
    ) -> Result<Arc<Self>> {
        if vars.is_empty() {
            return Err(Error::invalid("a polynomial extension needs a variable"));
        }
        Ok(Arc::new(ExtRing {
            kind: RingKind::Poly { vars },
            base,
            base_rank,
            validation: ValidationNote { exhaustive: true, ..Default::default() },
        }))
    }

    /// The extension E0 (x) R for a structure-constant field E0.
    pub fn finite_ext(
        base: Arc<dyn RingOps<R>>,
        base_rank: Arc<dyn RankFunction<R>>,
        table: Arc<StructureConsts>,
    ) -> Result<Arc<Self>> {
        Ok(Arc::new(ExtRing {
            kind: RingKind::FiniteExt { table },
            base,
            base_rank,
            validation: ValidationNote { exhaustive: true, ..Default::default() },
        }))
    }

    /// The extension E0(t) (x) R realized on the basis `b_a t^j`.
    pub fn finite_ext_poly(
        base: Arc<dyn RingOps<R>>,
        base_rank: Arc<dyn RankFunction<R>>,
        table: Arc<StructureConsts>,
        var: &str,
    ) -> Result<Arc<Self>> {
        Ok(Arc::new(ExtRing {
            kind: RingKind::FiniteExtPoly { table, var: var.to_string() },
            base,
            base_rank,
            validation: ValidationNote { exhaustive: true, ..Default::default() },
        }))
    }

    fn validate_crossed(&self, note: &mut ValidationNote) -> Result<()> {
        let RingKind::Crossed { group, action, cocycle } = &self.kind else {
            unreachable!()
        };
        let gens = self.base.generators();
        match group {
            GroupSpec::Zd { d, names } => {
                if names.len() != *d {
                    return Err(Error::invalid("need one generator name per coordinate"));
                }
                match cocycle {
                    CocycleSpec::Trivial => {}
                    CocycleSpec::Table(_) => {
                        return Err(Error::invalid(
                            "twisted cocycles on Z^d are only supported through finite quotient models",
                        ));
                    }
                }
                match action {
                    ActionSpec::Trivial => {}
                    ActionSpec::PerGenerator(auts) => {
                        if auts.len() != *d {
                            return Err(Error::invalid("need one automorphism per coordinate"));
                        }
                        for (i, a) in auts.iter().enumerate() {
                            for (j, b) in auts.iter().enumerate().skip(i + 1) {
                                for g in &gens {
                                    let ab = g.apply_aut(b)?.apply_aut(a)?;
                                    let ba = g.apply_aut(a)?.apply_aut(b)?;
                                    if ab != ba {
                                        return Err(Error::invalid(format!(
                                            "coordinate actions {i} and {j} do not commute"
                                        )));
                                    }
                                }
                            }
                        }
                        self.check_rank_invariance(auts, note)?;
                    }
                    ActionSpec::PerElement(_) => {
                        return Err(Error::invalid("per-element actions need a finite group"));
                    }
                }
                note.exhaustive = true;
            }
            GroupSpec::Finite(g) => {
                let n = g.order();
                let auts: Vec<Automorphism> = match action {
                    ActionSpec::Trivial => vec![Automorphism::Identity; n],
                    ActionSpec::PerElement(v) => {
                        if v.len() != n {
                            return Err(Error::invalid("need one automorphism per group element"));
                        }
                        v.clone()
                    }
                    ActionSpec::PerGenerator(_) => {
                        return Err(Error::invalid("per-generator actions need Z^d"));
                    }
                };
                if !auts[g.identity].is_identity() {
                    return Err(Error::invalid("the identity element must act trivially"));
                }
                let unit = |s: usize, t: usize| -> R {
                    match cocycle {
                        CocycleSpec::Trivial => self.base.one(),
                        CocycleSpec::Table(tbl) => tbl[s][t].clone(),
                    }
                };
                if let CocycleSpec::Table(tbl) = cocycle {
                    if tbl.len() != n || tbl.iter().any(|r| r.len() != n) {
                        return Err(Error::invalid("cocycle table must be n x n"));
                    }
                    for (s, row) in tbl.iter().enumerate() {
                        for (t, u) in row.iter().enumerate() {
                            if u.unit_inv().is_none() {
                                return Err(Error::invalid(format!(
                                    "cocycle value at ({}, {}) is not a unit",
                                    g.names[s], g.names[t]
                                )));
                            }
                            if (s == g.identity || t == g.identity) && *u != self.base.one() {
                                return Err(Error::invalid(
                                    "cocycle must be 1 on the identity row and column",
                                ));
                            }
                        }
                    }
                }
                // twisted-action condition: sigma_s sigma_t = Ad(u_{s,t}) sigma_{st},
                // checked on the base ring generators.
                let exhaustive = n <= 16;
                note.exhaustive = exhaustive;
                let mut pairs: Vec<(usize, usize)> = Vec::new();
                if exhaustive {
                    for s in 0..n {
                        for t in 0..n {
                            pairs.push((s, t));
                        }
                    }
                } else {
                    let seed = VALIDATION_SEED;
                    note.sample_seed = Some(seed);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    for _ in 0..256 {
                        pairs.push((rng.gen_range(0..n), rng.gen_range(0..n)));
                    }
                }
                for &(s, t) in &pairs {
                    let u = unit(s, t);
                    let u_inv = u
                        .unit_inv()
                        .ok_or_else(|| Error::invalid("cocycle value is not a unit"))?;
                    for gen in &gens {
                        let lhs = gen.apply_aut(&auts[t])?.apply_aut(&auts[s])?;
                        let rhs = u.clone() * gen.apply_aut(&auts[g.mul[s][t]])? * u_inv.clone();
                        if lhs != rhs {
                            return Err(Error::invalid(format!(
                                "twisted-action condition fails on ({}, {})",
                                g.names[s], g.names[t]
                            )));
                        }
                    }
                }
                // cocycle identity on triples.
                let mut triples: Vec<(usize, usize, usize)> = Vec::new();
                if exhaustive {
                    for a in 0..n {
                        for s in 0..n {
                            for t in 0..n {
                                triples.push((a, s, t));
                            }
                        }
                    }
                } else {
                    let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED ^ 1);
                    note.sample_seed = Some(VALIDATION_SEED);
                    for _ in 0..512 {
                        triples.push((
                            rng.gen_range(0..n),
                            rng.gen_range(0..n),
                            rng.gen_range(0..n),
                        ));
                    }
                }
                for &(a, s, t) in &triples {
                    let lhs = unit(s, t).apply_aut(&auts[a])? * unit(a, g.mul[s][t]);
                    let rhs = unit(a, s) * unit(g.mul[a][s], t);
                    if lhs != rhs {
                        return Err(Error::invalid(format!(
                            "cocycle identity fails on ({}, {}, {})",
                            g.names[a], g.names[s], g.names[t]
                        )));
                    }
                }
                self.check_rank_invariance(&auts, note)?;
            }
        }
        Ok(())
    }

    /// Sampled check that each acting automorphism preserves the base rank.
    fn check_rank_invariance(
        &self,
        auts: &[Automorphism],
        note: &mut ValidationNote,
    ) -> Result<()> {
        let seed = VALIDATION_SEED ^ 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut checked = false;
        for aut in auts {
            if aut.is_identity() {
                continue;
            }
            checked = true;
            for _ in 0..ACTION_RANK_SAMPLES {
                let (r, c) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
                let m = Matrix::from_fn(r, c, |_, _| self.base.sample(&mut rng));
                let mapped = m.try_map(|e| e.apply_aut(aut))?;
                if self.base_rank.rank(&m)? != self.base_rank.rank(&mapped)? {
                    return Err(Error::invalid(format!(
                        "action does not preserve the base rank (witness {m})"
                    )));
                }
            }
        }
        if checked {
            note.sample_seed = Some(seed);
            note.notes.push(format!(
                "rank invariance sampled on {ACTION_RANK_SAMPLES} matrices per automorphism"
            ));
        }
        Ok(())
    }

    pub fn name(&self) -> String {
        let base = self.base.name();
        match &self.kind {
            RingKind::Crossed { group, action, cocycle } => {
                let g = match group {
                    GroupSpec::Zd { d, .. } => format!("Z^{d}"),
                    GroupSpec::Finite(g) => format!("G(order {})", g.order()),
                };
                let twist = match (action, cocycle) {
                    (ActionSpec::Trivial, CocycleSpec::Trivial) => "",
                    (_, CocycleSpec::Trivial) => " (with action)",
                    _ => " (twisted)",
                };
                format!("{base}*{g}{twist}")
            }
            RingKind::Poly { vars } => format!("{base}[{}]", vars.join(",")),
            RingKind::FiniteExt { table } => {
                format!("E0(deg {})(x){base}", table.degree())
            }
            RingKind::FiniteExtPoly { table, var } => {
                format!("E0(deg {})({var})(x){base}", table.degree())
            }
        }
    }

    pub fn identity_index(&self) -> UIndex {
        match &self.kind {
            RingKind::Crossed { group, .. } => match group {
                GroupSpec::Zd { d, .. } => UIndex::Exp(vec![0; *d]),
                GroupSpec::Finite(g) => UIndex::Grp(g.identity),
            },
            RingKind::Poly { vars } => UIndex::Exp(vec![0; vars.len()]),
            RingKind::FiniteExt { .. } => UIndex::Basis(0),
            RingKind::FiniteExtPoly { .. } => UIndex::BasisExp(0, 0),
        }
    }

    /// All basis indices of the full window, for finite kinds.
    pub fn full_index_set(&self) -> Option<Vec<UIndex>> {
        match &self.kind {
            RingKind::Crossed { group: GroupSpec::Finite(g), .. } => {
                Some((0..g.order()).map(UIndex::Grp).collect())
            }
            RingKind::FiniteExt { table } => {
                Some((0..table.degree()).map(UIndex::Basis).collect())
            }
            _ => None,
        }
    }

    pub fn zero_elem(self: &Arc<Self>) -> ExtElem<R> {
        ExtElem::zero()
    }

    pub fn from_coeff(self: &Arc<Self>, c: R) -> ExtElem<R> {
        self.elem(self.identity_index(), c)
    }

    pub fn one(self: &Arc<Self>) -> ExtElem<R> {
        self.from_coeff(self.base.one())
    }

    pub fn elem(self: &Arc<Self>, idx: UIndex, c: R) -> ExtElem<R> {
        let mut support = BTreeMap::new();
        if !c.is_zero() {
            support.insert(idx, c);
        }
        ExtElem { ring: Some(self.clone()), support }
    }

    /// The basis element attached to an index.
    pub fn basis_elem(self: &Arc<Self>, idx: UIndex) -> ExtElem<R> {
        self.elem(idx, self.base.one())
    }

    /// The automorphism attached to an index of the acting set.
    fn index_aut(&self, idx: &UIndex) -> Result<Automorphism> {
        match (&self.kind, idx) {
            (RingKind::Crossed { action, .. }, UIndex::Grp(i)) => match action {
                ActionSpec::Trivial => Ok(Automorphism::Identity),
                ActionSpec::PerElement(v) => Ok(v[*i].clone()),
                ActionSpec::PerGenerator(_) => unreachable!("validated"),
            },
            (RingKind::Crossed { action, .. }, UIndex::Exp(v)) => match action {
                ActionSpec::Trivial => Ok(Automorphism::Identity),
                ActionSpec::PerGenerator(auts) => {
                    let mut acc = Automorphism::Identity;
                    for (a, &e) in auts.iter().zip(v.iter()) {
                        acc = acc.compose(&a.pow(e)?)?;
                    }
                    Ok(acc)
                }
                ActionSpec::PerElement(_) => unreachable!("validated"),
            },
            _ => Ok(Automorphism::Identity),
        }
    }

    /// sigma_g(a): the base-ring automorphism induced by moving `g` past `a`.
    pub fn sigma(&self, g: &UIndex, a: &R) -> Result<R> {
        let aut = self.index_aut(g)?;
        a.apply_aut(&aut)
    }

    fn cocycle_unit(&self, s: usize, t: usize) -> R {
        match &self.kind {
            RingKind::Crossed { cocycle: CocycleSpec::Table(tbl), .. } => tbl[s][t].clone(),
            _ => self.base.one(),
        }
    }

    /// The terms of the product of two basis-indexed terms `a s`, `b t`.
    fn mul_terms(&self, s: &UIndex, a: &R, t: &UIndex, b: &R) -> Result<Vec<(UIndex, R)>> {
        match (&self.kind, s, t) {
            (RingKind::Crossed { group: GroupSpec::Finite(g), .. }, UIndex::Grp(i), UIndex::Grp(j)) => {
                let coeff = a.clone() * self.sigma(s, b)? * self.cocycle_unit(*i, *j);
                Ok(vec![(UIndex::Grp(g.mul[*i][*j]), coeff)])
            }
            (RingKind::Crossed { .. }, UIndex::Exp(v), UIndex::Exp(w)) => {
                let idx = UIndex::Exp(v.iter().zip(w).map(|(x, y)| x + y).collect());
                Ok(vec![(idx, a.clone() * self.sigma(s, b)?)])
            }
            (RingKind::Poly { .. }, UIndex::Exp(v), UIndex::Exp(w)) => {
                let idx = UIndex::Exp(v.iter().zip(w).map(|(x, y)| x + y).collect());
                Ok(vec![(idx, a.clone() * b.clone())])
            }
            (RingKind::FiniteExt { table }, UIndex::Basis(i), UIndex::Basis(j)) => {
                let ab = a.clone() * b.clone();
                Ok(table.table[*i][*j]
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (UIndex::Basis(k), ab.scale(c)))
                    .collect())
            }
            (
                RingKind::FiniteExtPoly { table, .. },
                UIndex::BasisExp(i, di),
                UIndex::BasisExp(j, dj),
            ) => {
                let ab = a.clone() * b.clone();
                Ok(table.table[*i][*j]
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (UIndex::BasisExp(k, di + dj), ab.scale(c)))
                    .collect())
            }
            _ => Err(Error::invalid("index does not belong to this ring")),
        }
    }

    /// Indices that can appear in the product of two basis indices; used by
    /// window arithmetic, where unit factors are irrelevant.
    pub fn index_products(&self, s: &UIndex, t: &UIndex) -> Result<Vec<UIndex>> {
        Ok(self
            .mul_terms(s, &self.base.one(), t, &self.base.one())?
            .into_iter()
            .map(|(i, _)| i)
            .collect())
    }

    pub fn mul_elems(self: &Arc<Self>, x: &ExtElem<R>, y: &ExtElem<R>) -> Result<ExtElem<R>> {
        let mut support: BTreeMap<UIndex, R> = BTreeMap::new();
        for (s, a) in &x.support {
            for (t, b) in &y.support {
                for (idx, c) in self.mul_terms(s, a, t, b)? {
                    merge_term(&mut support, idx, c);
                }
            }
        }
        Ok(ExtElem { ring: Some(self.clone()), support })
    }

    /// Inverse of a single-term element, when the index is invertible in the
    /// acting set and the coefficient is a unit. The result is verified by
    /// multiplication before it is returned.
    pub fn invert_single(self: &Arc<Self>, x: &ExtElem<R>) -> Option<ExtElem<R>> {
        if x.support.len() != 1 {
            return None;
        }
        let (idx, c) = x.support.iter().next()?;
        let candidate = match (&self.kind, idx) {
            (RingKind::Poly { .. }, UIndex::Exp(v)) => {
                if v.iter().any(|&e| e != 0) {
                    return None;
                }
                self.from_coeff(c.unit_inv()?)
            }
            (RingKind::Crossed { .. }, UIndex::Exp(v)) => {
                let inv_idx = UIndex::Exp(v.iter().map(|e| -e).collect());
                let d = self.sigma(&inv_idx, &c.unit_inv()?).ok()?;
                self.elem(inv_idx, d)
            }
            (RingKind::Crossed { group: GroupSpec::Finite(g), .. }, UIndex::Grp(i)) => {
                let j = g.inv[*i];
                let u_ji = self.cocycle_unit(j, *i).unit_inv()?;
                let u_ij = self.cocycle_unit(*i, j).unit_inv()?;
                let inner = (c.unit_inv()? * u_ij).apply_aut(&self.index_aut(&UIndex::Grp(j)).ok()?).ok()?;
                let d = u_ji.clone() * inner * self.cocycle_unit(j, *i);
                self.elem(UIndex::Grp(j), d)
            }
            (RingKind::FiniteExt { table }, UIndex::Basis(i)) => {
                let cinv = c.unit_inv()?;
                let mut v = vec![Rational::zero(); table.degree()];
                v[*i] = Rational::from_integer(1.into());
                let inv = crate::linalg::invert(&table.reg_rep(&v))?;
                let mut support = BTreeMap::new();
                for e in 0..table.degree() {
                    let coord = inv.get(e, 0);
                    if !coord.is_zero() {
                        merge_term(&mut support, UIndex::Basis(e), cinv.scale(coord));
                    }
                }
                ExtElem { ring: Some(self.clone()), support }
            }
            (RingKind::FiniteExtPoly { table, .. }, UIndex::BasisExp(i, 0)) => {
                let cinv = c.unit_inv()?;
                let mut v = vec![Rational::zero(); table.degree()];
                v[*i] = Rational::from_integer(1.into());
                let inv = crate::linalg::invert(&table.reg_rep(&v))?;
                let mut support = BTreeMap::new();
                for e in 0..table.degree() {
                    let coord = inv.get(e, 0);
                    if !coord.is_zero() {
                        merge_term(&mut support, UIndex::BasisExp(e, 0), cinv.scale(coord));
                    }
                }
                ExtElem { ring: Some(self.clone()), support }
            }
            _ => return None,
        };
        let left = self.mul_elems(x, &candidate).ok()?;
        let right = self.mul_elems(&candidate, x).ok()?;
        if left == self.one() && right == self.one() {
            Some(candidate)
        } else {
            None
        }
    }

    pub fn fmt_index(&self, idx: &UIndex) -> String {
        match (&self.kind, idx) {
            (RingKind::Crossed { group: GroupSpec::Finite(g), .. }, UIndex::Grp(i)) => {
                g.names[*i].clone()
            }
            (RingKind::Crossed { group: GroupSpec::Zd { names, .. }, .. }, UIndex::Exp(v)) => {
                fmt_monomial(names, v)
            }
            (RingKind::Poly { vars }, UIndex::Exp(v)) => fmt_monomial(vars, v),
            (RingKind::FiniteExt { table }, UIndex::Basis(i)) => table.names[*i].clone(),
            (RingKind::FiniteExtPoly { table, var }, UIndex::BasisExp(i, d)) => {
                let b = &table.names[*i];
                match (*i, *d) {
                    (0, 0) => "1".to_string(),
                    (0, 1) => var.clone(),
                    (0, d) => format!("{var}^{d}"),
                    (_, 0) => b.clone(),
                    (_, 1) => format!("{b}*{var}"),
                    (_, d) => format!("{b}*{var}^{d}"),
                }
            }
            _ => format!("{idx:?}"),
        }
    }

    /// Random small element for property tests: up to `max_terms` terms with
    /// pool coefficients.
    pub fn sample_elem(self: &Arc<Self>, rng: &mut ChaCha8Rng, max_terms: usize) -> ExtElem<R> {
        let terms = rng.gen_range(0..=max_terms);
        let mut support = BTreeMap::new();
        for _ in 0..terms {
            let idx = self.sample_index(rng);
            let c = self.base.sample(rng);
            merge_term(&mut support, idx, c);
        }
        ExtElem { ring: Some(self.clone()), support }
    }

    pub fn sample_index(&self, rng: &mut ChaCha8Rng) -> UIndex {
        match &self.kind {
            RingKind::Crossed { group, .. } => match group {
                GroupSpec::Zd { d, .. } => {
                    UIndex::Exp((0..*d).map(|_| rng.gen_range(-2..=2)).collect())
                }
                GroupSpec::Finite(g) => UIndex::Grp(rng.gen_range(0..g.order())),
            },
            RingKind::Poly { vars } => {
                UIndex::Exp((0..vars.len()).map(|_| rng.gen_range(0..=3)).collect())
            }
            RingKind::FiniteExt { table } => UIndex::Basis(rng.gen_range(0..table.degree())),
            RingKind::FiniteExtPoly { table, .. } => {
                UIndex::BasisExp(rng.gen_range(0..table.degree()), rng.gen_range(0..=3))
            }
        }
    }

    pub fn parse_elem(self: &Arc<Self>, src: &str) -> Result<ExtElem<R>> {
        parse_scalar(src, &ElemCtx { ring: self })
    }

    pub fn parse_matrix(self: &Arc<Self>, json: &MatrixJson) -> Result<Matrix<ExtElem<R>>> {
        json.decode(|s| self.parse_elem(s))
    }

    /// Parse a bracket literal like `[[1 - z, 2], [0, z^2]]`.
    pub fn parse_matrix_literal(self: &Arc<Self>, src: &str) -> Result<Matrix<ExtElem<R>>> {
        let rows = split_matrix_literal(src)?;
        let mut data = Vec::new();
        for row in rows {
            let mut out = Vec::new();
            for cell in row {
                out.push(self.parse_elem(&cell)?);
            }
            data.push(out);
        }
        Matrix::from_rows(data)
    }
}

fn fmt_monomial(names: &[String], exps: &[i64]) -> String {
    let parts: Vec<String> = names
        .iter()
        .zip(exps.iter())
        .filter(|(_, &e)| e != 0)
        .map(|(n, &e)| if e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

fn merge_term<R: RingElem>(support: &mut BTreeMap<UIndex, R>, idx: UIndex, c: R) {
    if c.is_zero() {
        return;
    }
    match support.remove(&idx) {
        None => {
            support.insert(idx, c);
        }
        Some(old) => {
            let s = old + c;
            if !s.is_zero() {
                support.insert(idx, s);
            }
        }
    }
}

struct ElemCtx<'a, R: RingElem> {
    ring: &'a Arc<ExtRing<R>>,
}

impl<'a, R: RingElem> ParseCtx<ExtElem<R>> for ElemCtx<'a, R> {
    fn atom(&self, name: &str) -> Result<ExtElem<R>> {
        let r = self.ring;
        let idx = match &r.kind {
            RingKind::Crossed { group, .. } => match group {
                GroupSpec::Finite(g) => {
                    g.names.iter().position(|n| n == name).map(UIndex::Grp)
                }
                GroupSpec::Zd { d, names } => names.iter().position(|n| n == name).map(|k| {
                    let mut v = vec![0i64; *d];
                    v[k] = 1;
                    UIndex::Exp(v)
                }),
            },
            RingKind::Poly { vars } => vars.iter().position(|n| n == name).map(|k| {
                let mut v = vec![0i64; vars.len()];
                v[k] = 1;
                UIndex::Exp(v)
            }),
            RingKind::FiniteExt { table } => {
                table.names.iter().position(|n| n == name).map(UIndex::Basis)
            }
            RingKind::FiniteExtPoly { table, var } => {
                if name == var {
                    Some(UIndex::BasisExp(0, 1))
                } else {
                    table
                        .names
                        .iter()
                        .position(|n| n == name)
                        .map(|i| UIndex::BasisExp(i, 0))
                }
            }
        };
        if let Some(idx) = idx {
            return Ok(r.basis_elem(idx));
        }
        // Fall back to a coefficient-ring name (e.g. a field-extension basis
        // element used as a coefficient of a polynomial extension).
        match r.base.parse(name) {
            Ok(c) => Ok(r.from_coeff(c)),
            Err(_) => Err(Error::invalid(format!("unknown name {name:?} in {}", r.name()))),
        }
    }

    fn embed(&self, q: &Rational) -> Result<ExtElem<R>> {
        Ok(self.ring.from_coeff(self.ring.base.one().scale(q)))
    }

    fn tuple(&self, parts: Vec<Value<ExtElem<R>>>) -> Result<ExtElem<R>> {
        let mut rats = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Value::Rat(q) => rats.push(q),
                Value::Elem(_) => {
                    return Err(Error::invalid("tuple components must be rational constants"))
                }
            }
        }
        Ok(self.ring.from_coeff(self.ring.base.tuple(rats)?))
    }

    fn pow_elem(&self, base: &ExtElem<R>, exp: i64) -> Result<ExtElem<R>> {
        if exp < 0 {
            let inv = self.ring.invert_single(base).ok_or_else(|| {
                Error::invalid("negative power of an element that is not an invertible monomial")
            })?;
            return self.pow_elem(&inv, -exp);
        }
        let mut acc = self.ring.one();
        for _ in 0..exp {
            acc = self.ring.mul_elems(&acc, base)?;
        }
        Ok(acc)
    }

    fn invert(&self, x: &ExtElem<R>) -> Result<ExtElem<R>> {
        self.ring
            .invert_single(x)
            .ok_or_else(|| Error::invalid("division by an element that is not an invertible monomial"))
    }
}

fn split_matrix_literal(src: &str) -> Result<Vec<Vec<String>>> {
    let s = src.trim();
    if !s.starts_with('[') || !s.ends_with(']') {
        return Err(Error::parse(0, "matrix literal must be wrapped in [ ]"));
    }
    let inner = &s[1..s.len() - 1];
    let mut rows = Vec::new();
    let mut depth = 0usize;
    let mut row_start = None;
    for (i, ch) in inner.char_indices() {
        match ch {
            '[' => {
                if depth == 0 {
                    row_start = Some(i + 1);
                }
                depth += 1;
            }
            ']' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::parse(i, "unbalanced brackets"))?;
                if depth == 0 {
                    let start = row_start.take().ok_or_else(|| Error::parse(i, "bad row"))?;
                    rows.push(split_top_level(&inner[start..i]));
                }
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::parse(s.len(), "unbalanced brackets"));
    }
    if rows.is_empty() {
        return Err(Error::parse(0, "matrix literal has no rows"));
    }
    Ok(rows)
}

fn split_top_level(src: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    for (i, ch) in src.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(src[start..i].trim().to_string());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(src[start..].trim().to_string());
    out
}

/// An element of an extension ring: a finitely supported map from basis
/// indices to nonzero base-ring coefficients. The ring handle travels with
/// the element (absent only on the context-free zero).
#[derive(Clone)]
pub struct ExtElem<R: RingElem> {
    ring: Option<Arc<ExtRing<R>>>,
    support: BTreeMap<UIndex, R>,
}

impl<R: RingElem> ExtElem<R> {
    pub fn support(&self) -> &BTreeMap<UIndex, R> {
        &self.support
    }

    pub fn ring(&self) -> Option<&Arc<ExtRing<R>>> {
        self.ring.as_ref()
    }

    pub fn num_terms(&self) -> usize {
        self.support.len()
    }

    pub fn coefficient(&self, idx: &UIndex) -> Option<&R> {
        self.support.get(idx)
    }

    fn unified_ring(a: &Self, b: &Self) -> Option<Arc<ExtRing<R>>> {
        match (&a.ring, &b.ring) {
            (Some(x), Some(y)) => {
                assert!(Arc::ptr_eq(x, y), "elements from different ring instances");
                Some(x.clone())
            }
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (None, None) => None,
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&R) -> R) -> Self {
        let mut support = BTreeMap::new();
        for (idx, c) in &self.support {
            let v = f(c);
            if !v.is_zero() {
                support.insert(idx.clone(), v);
            }
        }
        ExtElem { ring: self.ring.clone(), support }
    }
}

impl<R: RingElem> PartialEq for ExtElem<R> {
    fn eq(&self, other: &Self) -> bool {
        self.support == other.support
    }
}

impl<R: RingElem> fmt::Debug for ExtElem<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtElem({self})")
    }
}

impl<R: RingElem> fmt::Display for ExtElem<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support.is_empty() {
            return write!(f, "0");
        }
        let ring = self.ring.as_ref().expect("nonzero element carries its ring");
        let identity = ring.identity_index();
        let mut first = true;
        for (idx, c) in &self.support {
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
                write!(f, " {sign} ")?;
            }
            let name = ring.fmt_index(idx);
            let wrapped = if mag.contains(['+', ' ']) && !mag.starts_with('(') {
                format!("({mag})")
            } else {
                mag
            };
            if *idx == identity {
                write!(f, "{wrapped}")?;
            } else if wrapped == "1" {
                write!(f, "{name}")?;
            } else {
                write!(f, "{wrapped}*{name}")?;
            }
        }
        Ok(())
    }
}

impl<R: RingElem> Zero for ExtElem<R> {
    fn zero() -> Self {
        ExtElem { ring: None, support: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.support.is_empty()
    }
}

impl<R: RingElem> Add for ExtElem<R> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let ring = Self::unified_ring(&self, &rhs);
        let mut support = self.support;
        for (idx, c) in rhs.support {
            merge_term(&mut support, idx, c);
        }
        ExtElem { ring, support }
    }
}

impl<R: RingElem> Sub for ExtElem<R> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<R: RingElem> Neg for ExtElem<R> {
    type Output = Self;
    fn neg(self) -> Self {
        ExtElem {
            ring: self.ring,
            support: self.support.into_iter().map(|(i, c)| (i, -c)).collect(),
        }
    }
}

impl<R: RingElem> Mul for ExtElem<R> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        match Self::unified_ring(&self, &rhs) {
            None => Self::zero(),
            Some(ring) => {
                if self.is_zero() || rhs.is_zero() {
                    return Self::zero();
                }
                ring.mul_elems(&self, &rhs).expect("validated ring multiplication")
            }
        }
    }
}

impl<R: RingElem> RingElem for ExtElem<R> {
    fn scale(&self, c: &Rational) -> Self {
        self.map_coeffs(|x| x.scale(c))
    }

    fn unit_inv(&self) -> Option<Self> {
        let ring = self.ring.as_ref()?;
        ring.invert_single(self)
    }
}

/// The sign 2-cocycle on the Klein four-group coming from the projective
/// representation e, a, b, ab -> I, X, Z, XZ by Pauli-type matrices:
/// `u(s, t)` is the sign with `s_mat * t_mat = u(s, t) * (st)_mat`.
pub fn klein_sign_cocycle() -> Vec<Vec<Rational>> {
    let mut tbl = vec![vec![rint(1); 4]; 4];
    for (s, t, v) in [
        (2usize, 1usize, -1i64),
        (3, 3, -1),
        (3, 1, -1),
        (2, 3, -1),
    ] {
        tbl[s][t] = rint(v);
    }
    tbl
}

/// Convenience: the group ring Q[Z^d] with its Laurent generators.
pub fn laurent_ring_q(d: usize) -> Arc<ExtRing<Rational>> {
    ExtRing::crossed(
        Arc::new(ops::QOps),
        Arc::new(crate::rank::FieldRank::<Rational>::new()),
        GroupSpec::zd(d),
        ActionSpec::Trivial,
        CocycleSpec::Trivial,
    )
    .expect("plain group ring is valid")
}

/// Convenience: the polynomial ring Q[t].
pub fn poly_ring_q() -> Arc<ExtRing<Rational>> {
    ExtRing::poly(
        Arc::new(ops::QOps),
        Arc::new(crate::rank::FieldRank::<Rational>::new()),
        vec!["t".to_string()],
    )
    .expect("polynomial ring is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::{FieldRank, ProductRank};
    use crate::scalar::{rat, ProductElem};

    #[test]
    fn laurent_multiplication_is_commutative_polynomial_identity() {
        let ring = laurent_ring_q(1);
        let a = ring.parse_elem("1 - z").unwrap();
        let b = ring.parse_elem("1 + z").unwrap();
        let prod = a * b;
        assert_eq!(prod, ring.parse_elem("1 - z^2").unwrap());
    }

    #[test]
    fn laurent_negative_exponents_parse_and_multiply() {
        let ring = laurent_ring_q(1);
        let a = ring.parse_elem("2 - z - z^-1").unwrap();
        let z = ring.parse_elem("z").unwrap();
        let prod = a * z;
        assert_eq!(prod, ring.parse_elem("2*z - z^2 - 1").unwrap());
    }

    fn swap_ring() -> Arc<ExtRing<ProductElem<Rational>>> {
        // Q x Q with the swap action of Z/2 and the symmetric rank.
        ExtRing::crossed(
            Arc::new(ops::ProductOps { arity: 2 }),
            Arc::new(ProductRank::<Rational>::new(vec![rat(1, 2), rat(1, 2)]).unwrap()),
            GroupSpec::finite(FiniteGroup::cyclic(2)),
            ActionSpec::PerElement(vec![
                Automorphism::Identity,
                Automorphism::Permutation(vec![1, 0]),
            ]),
            CocycleSpec::Trivial,
        )
        .unwrap()
    }

    #[test]
    fn crossed_product_law_with_swap_action() {
        // ((1,0) s) * ((1,0) s) = (1,0)(0,1) e = 0
        let ring = swap_ring();
        let x = ring.parse_elem("(1,0)*s").unwrap();
        assert!((x.clone() * x).is_zero());
        // s * (a, b) = (b, a) * s
        let a = ring.parse_elem("(1,2)").unwrap();
        let s = ring.parse_elem("s").unwrap();
        let lhs = s.clone() * a;
        let rhs = ring.parse_elem("(2,1)*s").unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn sigma_apply_matches_action() {
        let ring = swap_ring();
        let s = UIndex::Grp(1);
        let a = ProductElem::tuple(vec![rint(1), rint(2)]);
        assert_eq!(
            ring.sigma(&s, &a).unwrap(),
            ProductElem::tuple(vec![rint(2), rint(1)])
        );
        // composition with the inverse returns the argument
        let back = ring.sigma(&s, &ring.sigma(&s, &a).unwrap()).unwrap();
        assert_eq!(back, a);
        // trivial action
        let zr = laurent_ring_q(1);
        assert_eq!(zr.sigma(&UIndex::Exp(vec![1]), &rint(3)).unwrap(), rint(3));
    }

    #[test]
    fn unequal_weights_reject_the_swap_action() {
        let bad = ExtRing::crossed(
            Arc::new(ops::ProductOps { arity: 2 }),
            Arc::new(ProductRank::<Rational>::new(vec![rat(1, 3), rat(2, 3)]).unwrap()),
            GroupSpec::finite(FiniteGroup::cyclic(2)),
            ActionSpec::PerElement(vec![
                Automorphism::Identity,
                Automorphism::Permutation(vec![1, 0]),
            ]),
            CocycleSpec::Trivial,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn associativity_on_sampled_triples() {
        let rings: Vec<Arc<ExtRing<Rational>>> = vec![laurent_ring_q(1), poly_ring_q()];
        for ring in rings {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for _ in 0..30 {
                let a = ring.sample_elem(&mut rng, 3);
                let b = ring.sample_elem(&mut rng, 3);
                let c = ring.sample_elem(&mut rng, 3);
                let lhs = (a.clone() * b.clone()) * c.clone();
                let rhs = a * (b * c);
                assert_eq!(lhs, rhs);
            }
        }
        let ring = swap_ring();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..30 {
            let a = ring.sample_elem(&mut rng, 3);
            let b = ring.sample_elem(&mut rng, 3);
            let c = ring.sample_elem(&mut rng, 3);
            assert_eq!((a.clone() * b.clone()) * c.clone(), a * (b * c));
        }
    }

    #[test]
    fn identity_is_a_two_sided_unit() {
        let ring = swap_ring();
        let one = ring.one();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = ring.sample_elem(&mut rng, 3);
            assert_eq!(one.clone() * a.clone(), a);
            assert_eq!(a.clone() * one.clone(), a);
        }
    }

    #[test]
    fn normality_of_basis_elements() {
        // s a = sigma_s(a) s for all group generators and sampled a.
        let ring = swap_ring();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for g in 0..2usize {
            let s = ring.basis_elem(UIndex::Grp(g));
            for _ in 0..10 {
                let a = ProductElem::tuple(vec![
                    crate::rank::axioms::rational_pool(&mut rng),
                    crate::rank::axioms::rational_pool(&mut rng),
                ]);
                let lhs = s.clone() * ring.from_coeff(a.clone());
                let rhs = ring.from_coeff(ring.sigma(&UIndex::Grp(g), &a).unwrap()) * s.clone();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn finite_extension_defining_relation() {
        let qi = StructureConsts::gaussian();
        let ring: Arc<ExtRing<Rational>> = ExtRing::finite_ext(
            Arc::new(ops::QOps),
            Arc::new(FieldRank::<Rational>::new()),
            qi,
        )
        .unwrap();
        let i = ring.parse_elem("i").unwrap();
        let prod = i.clone() * i;
        assert_eq!(prod, ring.parse_elem("-1").unwrap());
    }

    #[test]
    fn matrix_literals_parse() {
        let ring = laurent_ring_q(1);
        let m = ring.parse_matrix_literal("[[1 - z]]").unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 1));
        let m2 = ring.parse_matrix_literal("[[2 - z - z^-1, 0], [1, z]]").unwrap();
        assert_eq!((m2.rows(), m2.cols()), (2, 2));
        let pr = poly_ring_q();
        assert!(pr.parse_matrix_literal("[[t - 1]]").is_ok());
        assert!(pr.parse_elem("t^-1").is_err());
    }

    #[test]
    fn twisted_inverse_of_monomials() {
        // Klein group with the nontrivial +-1 sign cocycle.
        let ring: Arc<ExtRing<Rational>> = ExtRing::crossed(
            Arc::new(ops::QOps),
            Arc::new(FieldRank::<Rational>::new()),
            GroupSpec::finite(FiniteGroup::klein4()),
            ActionSpec::Trivial,
            CocycleSpec::Table(klein_sign_cocycle()),
        )
        .unwrap();
        for name in ["a", "b", "ab"] {
            let x = ring.parse_elem(name).unwrap();
            let inv = ring.invert_single(&x).unwrap();
            assert_eq!(x * inv, ring.one());
        }
        // the twist is visible: ab and ba differ by a sign
        let a = ring.parse_elem("a").unwrap();
        let b = ring.parse_elem("b").unwrap();
        assert_eq!(a.clone() * b.clone(), -(b * a));
    }
}
