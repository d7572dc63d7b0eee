//! Finite approximation windows: construction, lattice operations,
//! invariance measurement, Folner schedules, and quasitiling.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::rref;
use crate::matrix::Matrix;
use crate::ring::{ExtElem, ExtRing, GroupSpec, RingKind, UIndex};
use crate::scalar::{rational_str, rint, Rational, RingElem};

/// A finitely generated free submodule of an extension ring: either spanned
/// by a finite set of basis indices (crossed products, polynomial
/// extensions) or a ground-field subspace in reduced echelon form (finite
/// field extensions).
#[derive(Debug, Clone, PartialEq)]
pub enum Window {
    Mono(BTreeSet<UIndex>),
    Sub(Matrix<Rational>),
}

impl Window {
    pub fn mono(indices: impl IntoIterator<Item = UIndex>) -> Window {
        Window::Mono(indices.into_iter().collect())
    }

    /// A subspace window from spanning rows (reduced on construction).
    pub fn subspace(rows: Matrix<Rational>) -> Window {
        let (r, pivots) = rref(&rows);
        let keep: Vec<usize> = (0..pivots.len()).collect();
        let cols: Vec<usize> = (0..rows.cols()).collect();
        Window::Sub(r.submatrix(&keep, &cols))
    }

    pub fn dim(&self) -> usize {
        match self {
            Window::Mono(s) => s.len(),
            Window::Sub(m) => m.rows(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn indices(&self) -> Option<&BTreeSet<UIndex>> {
        match self {
            Window::Mono(s) => Some(s),
            Window::Sub(_) => None,
        }
    }

    pub fn sum(&self, other: &Window) -> Result<Window> {
        match (self, other) {
            (Window::Mono(a), Window::Mono(b)) => {
                Ok(Window::Mono(a.union(b).cloned().collect()))
            }
            (Window::Sub(a), Window::Sub(b)) => {
                if a.cols() != b.cols() {
                    return Err(Error::invalid("subspace windows of different ambient dimension"));
                }
                Ok(Window::subspace(a.vstack(b)?))
            }
            _ => Err(Error::invalid("cannot combine monomial and subspace windows")),
        }
    }

    pub fn intersect(&self, other: &Window) -> Result<Window> {
        match (self, other) {
            (Window::Mono(a), Window::Mono(b)) => {
                Ok(Window::Mono(a.intersection(b).cloned().collect()))
            }
            (Window::Sub(a), Window::Sub(b)) => {
                if a.cols() != b.cols() {
                    return Err(Error::invalid("subspace windows of different ambient dimension"));
                }
                // Zassenhaus: reduce [A | A; B | 0]; rows with zero left half
                // carry an intersection basis in their right half.
                let d = a.cols();
                let top = Matrix::from_fn(a.rows(), 2 * d, |i, j| {
                    a.get(i, j % d).clone()
                });
                let bottom = Matrix::from_fn(b.rows(), 2 * d, |i, j| {
                    if j < d {
                        b.get(i, j).clone()
                    } else {
                        Rational::zero()
                    }
                });
                let (r, pivots) = rref(&top.vstack(&bottom)?);
                let mut rows: Vec<Vec<Rational>> = Vec::new();
                for i in 0..pivots.len() {
                    if (0..d).all(|j| r.get(i, j).is_zero()) {
                        rows.push((d..2 * d).map(|j| r.get(i, j).clone()).collect());
                    }
                }
                if rows.is_empty() {
                    return Ok(Window::Sub(Matrix::zeros(0, d)));
                }
                Ok(Window::subspace(Matrix::from_rows(rows)?))
            }
            _ => Err(Error::invalid("cannot combine monomial and subspace windows")),
        }
    }

    pub fn contains(&self, other: &Window) -> Result<bool> {
        Ok(self.intersect(other)?.dim() == other.dim())
    }
}

/// All indices reachable by left-multiplying `w` by `v` (the window spanned
/// by the products), as a window of the same variant.
pub fn window_product<R: RingElem>(
    ring: &ExtRing<R>,
    w: &Window,
    v: &Window,
) -> Result<Window> {
    match (w, v) {
        (Window::Mono(a), Window::Mono(b)) => {
            let mut out = BTreeSet::new();
            for s in a {
                for t in b {
                    out.extend(ring.index_products(s, t)?);
                }
            }
            Ok(Window::Mono(out))
        }
        (Window::Sub(a), Window::Sub(b)) => {
            let RingKind::FiniteExt { table } = &ring.kind else {
                return Err(Error::invalid("subspace windows need a finite field extension"));
            };
            let d = table.degree();
            if a.cols() != d || b.cols() != d {
                return Err(Error::invalid("subspace window has the wrong ambient dimension"));
            }
            let mut rows = Vec::new();
            for i in 0..a.rows() {
                for j in 0..b.rows() {
                    rows.push(table.mul_vec(a.row(i), b.row(j)));
                }
            }
            if rows.is_empty() {
                return Ok(Window::Sub(Matrix::zeros(0, d)));
            }
            Ok(Window::subspace(Matrix::from_rows(rows)?))
        }
        _ => Err(Error::invalid("cannot combine monomial and subspace windows")),
    }
}

/// Translate a monomial window by an index of the acting set.
pub fn translate<R: RingElem>(ring: &ExtRing<R>, g: &UIndex, w: &Window) -> Result<Window> {
    let Window::Mono(idxs) = w else {
        return Err(Error::invalid("only monomial windows translate by an index"));
    };
    let mut out = BTreeSet::new();
    for u in idxs {
        out.extend(ring.index_products(g, u)?);
    }
    Ok(Window::Mono(out))
}

/// `dim(W + W V) / dim(W) - 1`; a window is `(V, delta)`-invariant exactly
/// when this is at most delta.
pub fn invariance_defect<R: RingElem>(
    ring: &ExtRing<R>,
    w: &Window,
    v: &Window,
) -> Result<Rational> {
    if w.is_empty() {
        return Err(Error::invalid("invariance defect of an empty window"));
    }
    if v.is_empty() {
        return Ok(Rational::zero());
    }
    let grown = w.sum(&window_product(ring, w, v)?)?;
    let ratio = Rational::new(
        (grown.dim() as i64).into(),
        (w.dim() as i64).into(),
    );
    Ok(ratio - Rational::one())
}

/// The smallest window of the ring's variant containing every entry of `a`.
pub fn support_hull<R: RingElem>(
    ring: &ExtRing<R>,
    a: &Matrix<ExtElem<R>>,
) -> Result<Window> {
    match &ring.kind {
        RingKind::FiniteExt { table } => {
            let d = table.degree();
            let mut present = BTreeSet::new();
            for e in a.iter() {
                for idx in e.support().keys() {
                    let UIndex::Basis(i) = idx else {
                        return Err(Error::invalid("index does not belong to this ring"));
                    };
                    present.insert(*i);
                }
            }
            let rows: Vec<Vec<Rational>> = present
                .iter()
                .map(|&i| {
                    (0..d)
                        .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                        .collect()
                })
                .collect();
            if rows.is_empty() {
                return Ok(Window::Sub(Matrix::zeros(0, d)));
            }
            Ok(Window::Sub(Matrix::from_rows(rows)?))
        }
        _ => {
            let mut out = BTreeSet::new();
            for e in a.iter() {
                out.extend(e.support().keys().cloned());
            }
            Ok(Window::Mono(out))
        }
    }
}

/// A box `[0, side)^d` of exponent vectors.
pub fn box_window(d: usize, side: u64) -> Window {
    assert!(side >= 1, "box windows need a positive side");
    let mut idxs = BTreeSet::new();
    let mut v = vec![0i64; d];
    loop {
        idxs.insert(UIndex::Exp(v.clone()));
        let mut k = 0;
        loop {
            if k == d {
                return Window::Mono(idxs);
            }
            v[k] += 1;
            if v[k] < side as i64 {
                break;
            }
            v[k] = 0;
            k += 1;
        }
    }
}

/// Degree window `span{1, t, ..., t^(n-1)}` over the basis-times-monomial
/// index set of a composed extension.
pub fn ext_degree_window(ext_degree: usize, n: u64) -> Window {
    let mut idxs = BTreeSet::new();
    for a in 0..ext_degree {
        for j in 0..n as i64 {
            idxs.insert(UIndex::BasisExp(a, j));
        }
    }
    Window::Mono(idxs)
}

/// A window schedule: the nested family along which normalized ranks are
/// tracked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Schedule {
    /// Boxes `[0, N)^d` for each listed side.
    Boxes(Vec<u64>),
    /// Degree windows `span{1, ..., t^(N-1)}` for each listed N.
    Degrees(Vec<u64>),
    /// The whole ring, repeated so stabilization is observable.
    FullGroup { repeat: usize },
    /// `E0 (x) span{1, ..., t^(N-1)}` for composed extensions.
    ExtDegrees(Vec<u64>),
}

impl Schedule {
    /// The default doubling schedule for a ring kind.
    pub fn default_for<R: RingElem>(ring: &ExtRing<R>, kappa: usize) -> Schedule {
        match &ring.kind {
            RingKind::Crossed { group: GroupSpec::Zd { d, .. }, .. } => {
                if *d == 1 {
                    Schedule::Boxes(vec![4, 8, 16, 32, 64, 128, 256])
                } else {
                    Schedule::Boxes(vec![2, 4, 8, 16])
                }
            }
            RingKind::Crossed { group: GroupSpec::Finite(_), .. } => {
                Schedule::FullGroup { repeat: kappa.max(1) }
            }
            RingKind::Poly { vars } => {
                if vars.len() == 1 {
                    Schedule::Degrees(vec![2, 4, 8, 16, 32, 64])
                } else {
                    Schedule::Boxes(vec![2, 4, 8, 16])
                }
            }
            RingKind::FiniteExt { .. } => Schedule::FullGroup { repeat: kappa.max(1) },
            RingKind::FiniteExtPoly { .. } => Schedule::ExtDegrees(vec![2, 4, 8, 16, 32, 64]),
        }
    }

    pub fn with_kappa(self, kappa: usize) -> Schedule {
        match self {
            Schedule::FullGroup { repeat } => Schedule::FullGroup { repeat: repeat.max(kappa) },
            s => s,
        }
    }

    pub fn windows<R: RingElem>(&self, ring: &ExtRing<R>) -> Result<Vec<Window>> {
        // schedules are nested with strictly increasing dimensions, except
        // for the constant full-ring schedule of finite kinds
        let sizes = match self {
            Schedule::Boxes(s) | Schedule::Degrees(s) | Schedule::ExtDegrees(s) => Some(s),
            Schedule::FullGroup { .. } => None,
        };
        if let Some(s) = sizes {
            if s.is_empty() || s.iter().any(|&n| n == 0) {
                return Err(Error::invalid("schedule sizes must be positive"));
            }
            if s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid("schedule sizes must strictly increase"));
            }
        }
        match self {
            Schedule::Boxes(sides) => {
                let d = match &ring.kind {
                    RingKind::Crossed { group: GroupSpec::Zd { d, .. }, .. } => *d,
                    RingKind::Poly { vars } => vars.len(),
                    _ => return Err(Error::invalid("box schedules need exponent indices")),
                };
                Ok(sides.iter().map(|&n| box_window(d, n)).collect())
            }
            Schedule::Degrees(sizes) => {
                let d = match &ring.kind {
                    RingKind::Crossed { group: GroupSpec::Zd { d: 1, .. }, .. } => 1,
                    RingKind::Poly { vars } if vars.len() == 1 => 1,
                    _ => return Err(Error::invalid("degree schedules need one variable")),
                };
                Ok(sizes.iter().map(|&n| box_window(d, n)).collect())
            }
            Schedule::FullGroup { repeat } => {
                let w = match &ring.kind {
                    RingKind::Crossed { group: GroupSpec::Finite(_), .. } => {
                        Window::Mono(ring.full_index_set().unwrap().into_iter().collect())
                    }
                    RingKind::FiniteExt { table } => {
                        Window::Sub(Matrix::identity(table.degree()))
                    }
                    _ => return Err(Error::invalid("full-group schedules need a finite kind")),
                };
                Ok(vec![w; (*repeat).max(1)])
            }
            Schedule::ExtDegrees(sizes) => {
                let RingKind::FiniteExtPoly { table, .. } = &ring.kind else {
                    return Err(Error::invalid("extdeg schedules need a composed extension"));
                };
                Ok(sizes.iter().map(|&n| ext_degree_window(table.degree(), n)).collect())
            }
        }
    }
}

/// Parse a schedule string: `box:2^k,k=2..6`, `box:4,8,16`, `degrees:...`,
/// `extdeg:...`, or `group:full`.
pub fn parse_schedule(src: &str) -> Result<Schedule> {
    let s = src.trim();
    let (head, tail) = s
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("bad schedule {s:?}")))?;
    match head {
        "group" => {
            if tail == "full" {
                Ok(Schedule::FullGroup { repeat: 3 })
            } else {
                Err(Error::invalid(format!("bad group schedule {tail:?}")))
            }
        }
        "box" => Ok(Schedule::Boxes(parse_size_list(tail)?)),
        "degrees" => Ok(Schedule::Degrees(parse_size_list(tail)?)),
        "extdeg" => Ok(Schedule::ExtDegrees(parse_size_list(tail)?)),
        other => Err(Error::invalid(format!("unknown schedule kind {other:?}"))),
    }
}

/// `2^k,k=2..6` or a plain comma list `4,8,16`.
fn parse_size_list(src: &str) -> Result<Vec<u64>> {
    let s = src.trim();
    if let Some(rest) = s.strip_prefix("2^k,k=") {
        let (a, b) = rest
            .split_once("..")
            .ok_or_else(|| Error::invalid(format!("bad exponent range {rest:?}")))?;
        let lo: u32 = a.trim().parse().map_err(|_| Error::invalid("bad range start"))?;
        let hi: u32 = b.trim().parse().map_err(|_| Error::invalid("bad range end"))?;
        if lo > hi || hi > 30 {
            return Err(Error::invalid("bad exponent range"));
        }
        return Ok((lo..=hi).map(|k| 1u64 << k).collect());
    }
    let sizes: Vec<u64> = s
        .split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| Error::invalid(format!("bad size {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if sizes.is_empty() || sizes.iter().any(|&n| n == 0) {
        return Err(Error::invalid("sizes must be positive"));
    }
    Ok(sizes)
}

/// Parse a window literal: `box:0..16^2`, `degrees:32`, `group:full`.
pub fn parse_window_literal<R: RingElem>(ring: &ExtRing<R>, src: &str) -> Result<Window> {
    let s = src.trim();
    let (head, tail) = s
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("bad window literal {s:?}")))?;
    match head {
        "group" if tail == "full" => Ok(Schedule::FullGroup { repeat: 1 }
            .windows(ring)?
            .pop()
            .unwrap()),
        "degrees" => {
            let n: u64 = tail.trim().parse().map_err(|_| Error::invalid("bad degree count"))?;
            Schedule::Degrees(vec![n]).windows(ring).map(|mut v| v.pop().unwrap())
        }
        "box" => {
            // 0..16^2 means the box [0,16)^2.
            let (range, dim) = match tail.split_once('^') {
                Some((r, d)) => (
                    r,
                    d.trim().parse::<usize>().map_err(|_| Error::invalid("bad box dimension"))?,
                ),
                None => (tail, 1),
            };
            let (lo, hi) = range
                .split_once("..")
                .ok_or_else(|| Error::invalid("box literal needs lo..hi"))?;
            let lo: u64 = lo.trim().parse().map_err(|_| Error::invalid("bad box bound"))?;
            let hi: u64 = hi.trim().parse().map_err(|_| Error::invalid("bad box bound"))?;
            if lo != 0 || hi == 0 {
                return Err(Error::invalid("box literals start at 0"));
            }
            Ok(box_window(dim, hi))
        }
        other => Err(Error::invalid(format!("unknown window literal {other:?}"))),
    }
}

/// A weak quasitiling: tile shapes, centers, and per-center subwindows.
#[derive(Debug, Clone)]
pub struct Quasitiling {
    pub tiles: Vec<Window>,
    pub centers: Vec<Vec<UIndex>>,
    pub subwindows: Vec<Vec<Window>>,
    pub epsilon: Rational,
}

/// Tile the box `[0, target_side)^d` by lattice translates of
/// `[0, tile_side)^d`. Fails with the achieved coverage when the grid
/// misses more than an epsilon fraction of the target.
pub fn box_quasitile(
    d: usize,
    tile_side: u64,
    target_side: u64,
    epsilon: &Rational,
) -> Result<Quasitiling> {
    if tile_side == 0 || tile_side > target_side {
        return Err(Error::invalid("need 0 < tile_side <= target_side"));
    }
    if *epsilon <= Rational::zero() || *epsilon >= Rational::one() {
        return Err(Error::invalid("epsilon must lie in (0, 1)"));
    }
    let copies = target_side / tile_side;
    let covered = Rational::new(
        ((tile_side * copies) as i64).into(),
        (target_side as i64).into(),
    );
    let coverage = num_traits::pow::pow(covered, d);
    let required = Rational::one() - epsilon.clone();
    if coverage < required {
        return Err(Error::TilingTooCoarse {
            coverage: rational_str(&coverage),
            required: rational_str(&required),
        });
    }
    let tile = box_window(d, tile_side);
    let mut centers = Vec::new();
    let mut v = vec![0u64; d];
    'outer: loop {
        centers.push(UIndex::Exp(v.iter().map(|&x| (x * tile_side) as i64).collect()));
        let mut k = 0;
        loop {
            if k == d {
                break 'outer;
            }
            v[k] += 1;
            if v[k] < copies {
                break;
            }
            v[k] = 0;
            k += 1;
        }
    }
    let subwindows = vec![vec![tile.clone(); centers.len()]];
    Ok(Quasitiling {
        tiles: vec![tile],
        centers: vec![centers],
        subwindows,
        epsilon: epsilon.clone(),
    })
}

/// Decompose the degree window of size N as translates of the degree window
/// of size n by the monomial centers t^(l n); exact when n divides N.
pub fn kt_quasitile(tile_deg: u64, target_deg: u64) -> Result<Quasitiling> {
    if tile_deg == 0 || target_deg % tile_deg != 0 {
        return Err(Error::invalid("tile degree must divide the target degree"));
    }
    let tile = box_window(1, tile_deg);
    let centers: Vec<UIndex> = (0..target_deg / tile_deg)
        .map(|l| UIndex::Exp(vec![(l * tile_deg) as i64]))
        .collect();
    let subwindows = vec![vec![tile.clone(); centers.len()]];
    Ok(Quasitiling {
        tiles: vec![tile],
        centers: vec![centers],
        subwindows,
        epsilon: Rational::new(1.into(), 100.into()),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionResult {
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasitilingReport {
    /// dim(W_{j,c}) >= (1 - eps) dim(W_j)
    pub subwindow_bound: ConditionResult,
    /// the translated subwindows are linearly independent
    pub independence: ConditionResult,
    /// translated tiles stay inside the target and cover a (1 - eps) fraction
    pub coverage: ConditionResult,
}

impl QuasitilingReport {
    pub fn all_passed(&self) -> bool {
        self.subwindow_bound.passed && self.independence.passed && self.coverage.passed
    }
}

/// Verify the three quasitiling conditions against a target window.
pub fn check_quasitiling<R: RingElem>(
    ring: &ExtRing<R>,
    q: &Quasitiling,
    target: &Window,
) -> Result<QuasitilingReport> {
    if q.tiles.len() != q.centers.len() || q.tiles.len() != q.subwindows.len() {
        return Err(Error::invalid("tiles, centers and subwindows must align"));
    }
    let one_minus = Rational::one() - q.epsilon.clone();

    // (i) subwindow sizes.
    let mut sub_ok = true;
    let mut sub_detail = String::from("all subwindows meet the size bound");
    'outer_i: for (j, tile) in q.tiles.iter().enumerate() {
        for (c, sw) in q.subwindows[j].iter().enumerate() {
            if !tile.contains(sw)? {
                sub_ok = false;
                sub_detail = format!("subwindow {c} of tile {j} is not contained in the tile");
                break 'outer_i;
            }
            let lhs = rint(sw.dim() as i64);
            let rhs = one_minus.clone() * rint(tile.dim() as i64);
            if lhs < rhs {
                sub_ok = false;
                sub_detail = format!(
                    "subwindow {c} of tile {j} has dim {} < (1 - eps) * {}",
                    sw.dim(),
                    tile.dim()
                );
                break 'outer_i;
            }
        }
    }

    // (ii) independence of the translated subwindows: for monomial windows
    // the sum has dimension equal to the sum of dimensions exactly when all
    // translated index sets are pairwise disjoint.
    let mut translated: Vec<(usize, usize, Window)> = Vec::new();
    for (j, centers) in q.centers.iter().enumerate() {
        for (ci, c) in centers.iter().enumerate() {
            translated.push((j, ci, translate(ring, c, &q.subwindows[j][ci])?));
        }
    }
    let mut indep_ok = true;
    let mut indep_detail = String::from("translated subwindows are independent");
    let mut union = Window::Mono(BTreeSet::new());
    let mut total = 0usize;
    'outer_ii: for (j, ci, w) in &translated {
        let overlap = union.intersect(w)?;
        if !overlap.is_empty() {
            indep_ok = false;
            indep_detail = format!(
                "translate {ci} of tile {j} overlaps earlier translates (witness index {:?})",
                overlap.indices().and_then(|s| s.iter().next())
            );
            break 'outer_ii;
        }
        union = union.sum(w)?;
        total += w.dim();
    }
    if indep_ok && union.dim() != total {
        indep_ok = false;
        indep_detail = format!("sum of translates has dim {} != {}", union.dim(), total);
    }

    // (iii) containment and coverage by full translated tiles.
    let mut cover = Window::Mono(BTreeSet::new());
    for (j, centers) in q.centers.iter().enumerate() {
        for c in centers {
            cover = cover.sum(&translate(ring, c, &q.tiles[j])?)?;
        }
    }
    let inside = target.contains(&cover)?;
    let cov_ok = inside
        && rint(cover.dim() as i64) >= one_minus.clone() * rint(target.dim() as i64);
    let cov_detail = if !inside {
        "translated tiles escape the target".to_string()
    } else {
        format!(
            "covered {} of {} target dimensions (need (1 - eps) = {})",
            cover.dim(),
            target.dim(),
            rational_str(&one_minus)
        )
    };

    Ok(QuasitilingReport {
        subwindow_bound: ConditionResult { passed: sub_ok, detail: sub_detail },
        independence: ConditionResult { passed: indep_ok, detail: indep_detail },
        coverage: ConditionResult { passed: cov_ok, detail: cov_detail },
    })
}
