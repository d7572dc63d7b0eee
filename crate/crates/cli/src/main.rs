//! sylvan: batch experiments over exact Sylvester rank computations.
//!
//! One binary, one subcommand per capability. Every report embeds the
//! resolved configuration, the seed, and the tool version, and identical
//! configurations produce byte-identical reports.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sylvan_core::error::{Error, Result};
use sylvan_core::extension::{limit_rank, LimitReport};
use sylvan_core::fieldext::{
    algebraic_ext_rank, composition_check, eval_point_limit, monic_sequence_limit,
    poly_from_roots, rk_f, rk_f_by_roots, CompanionRank,
};
use sylvan_core::matrix::{Matrix, MatrixJson};
use sylvan_core::rank::{
    check_axioms, FieldRank, MatrixRingRank, ProductRank,
};
use sylvan_core::ring::ops::{BlockOps, GfOps, ProductOps, RingOps};
use sylvan_core::ring::spec_io::{parse_ring_spec, AnyRing};
use sylvan_core::ring::{laurent_ring_q, poly_ring_q, ExtElem, ExtRing};
use sylvan_core::scalar::gf::GfField;
use sylvan_core::scalar::parse::parse_rational_expr;
use sylvan_core::scalar::{rint, Rational, RingElem};
use sylvan_core::trace::{trace_window_compare_finite, trace_window_compare_z};
use sylvan_core::window::{
    box_quasitile, box_window, check_quasitiling, kt_quasitile, parse_schedule, Schedule,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "sylvan", version, about = "Exact Sylvester rank experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Window-limit rank of a matrix over a ring spec.
    Rank(RankArgs),
    /// Rank-axiom property harness.
    Axioms(AxiomArgs),
    /// Build and verify quasitilings.
    Quasitile(QuasitileArgs),
    /// Companion, root-averaging, evaluation and algebraic extension ranks.
    Fieldext(FieldextArgs),
    /// Trace rank against the window-limit rank.
    #[command(name = "trace-compare")]
    TraceCompare(TraceArgs),
    /// Two-step against one-step extension ranks over a tower.
    Tower(TowerArgs),
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Ring spec JSON file.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Matrix JSON file or bracket literal file.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Inline matrix literal, e.g. "[[1 - z]]".
    #[arg(long)]
    inline: Option<String>,
    /// Window schedule, e.g. "box:2^k,k=2..6".
    #[arg(long)]
    schedule: Option<String>,
    /// Stabilization length.
    #[arg(long)]
    kappa: Option<usize>,
    /// Stabilization tolerance (exact rational; default 0).
    #[arg(long)]
    tol: Option<String>,
    /// RNG seed; falls back to SYLVAN_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Trials for randomized components.
    #[arg(long)]
    trials: Option<usize>,
    /// Report JSON output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of (step, dimW, rank, normalized, defect) rows.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads (default: machine parallelism).
    #[arg(long)]
    jobs: Option<usize>,
    /// JSON config file with the same keys; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn merged(mut self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)?;
        let doc: serde_json::Value = serde_json::from_str(&text)?;
        let obj = doc
            .as_object()
            .ok_or_else(|| Error::invalid("config file must hold a JSON object"))?;
        let get_str = |k: &str| obj.get(k).and_then(|v| v.as_str()).map(|s| s.to_string());
        let get_u64 = |k: &str| obj.get(k).and_then(|v| v.as_u64());
        if self.spec.is_none() {
            self.spec = get_str("spec").map(PathBuf::from);
        }
        if self.matrix.is_none() {
            self.matrix = get_str("matrix").map(PathBuf::from);
        }
        if self.inline.is_none() {
            self.inline = get_str("inline");
        }
        if self.schedule.is_none() {
            self.schedule = get_str("schedule");
        }
        if self.kappa.is_none() {
            self.kappa = get_u64("kappa").map(|v| v as usize);
        }
        if self.tol.is_none() {
            self.tol = get_str("tol");
        }
        if self.seed.is_none() {
            self.seed = get_u64("seed");
        }
        if self.trials.is_none() {
            self.trials = get_u64("trials").map(|v| v as usize);
        }
        if self.out.is_none() {
            self.out = get_str("out").map(PathBuf::from);
        }
        if self.csv.is_none() {
            self.csv = get_str("csv").map(PathBuf::from);
        }
        if self.jobs.is_none() {
            self.jobs = get_u64("jobs").map(|v| v as usize);
        }
        Ok(self)
    }

    fn seed(&self) -> u64 {
        self.seed
            .or_else(|| std::env::var("SYLVAN_SEED").ok().and_then(|s| s.parse().ok()))
            .unwrap_or(0)
    }

    fn kappa(&self) -> usize {
        self.kappa.unwrap_or(3)
    }

    fn tol(&self) -> Result<Rational> {
        match &self.tol {
            None => Ok(Rational::from_integer(0.into())),
            Some(s) => parse_rational_expr(s),
        }
    }

    fn config_echo(&self, command: &str) -> serde_json::Value {
        serde_json::json!({
            "command": command,
            "spec": self.spec.as_ref().map(|p| p.display().to_string()),
            "matrix": self.matrix.as_ref().map(|p| p.display().to_string()),
            "inline": self.inline,
            "schedule": self.schedule,
            "kappa": self.kappa(),
            "tol": self.tol.clone().unwrap_or_else(|| "0".into()),
            "trials": self.trials,
        })
    }
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct AxiomArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which rank function: field | matrix | product | companion | trace.
    #[arg(long = "rank")]
    rank_kind: String,
    /// Ground field for `--rank field`: q, gf7, gf:101, ...
    #[arg(long)]
    field: Option<String>,
    /// Block size for `--rank matrix`.
    #[arg(long)]
    k: Option<usize>,
    /// Weights for `--rank product`, e.g. "1/3,2/3".
    #[arg(long)]
    weights: Option<String>,
    /// Monic modulus for `--rank companion`, e.g. "t^2 - 1".
    #[arg(long)]
    f: Option<String>,
    /// Largest sampled matrix dimension.
    #[arg(long, default_value_t = 6)]
    max_dim: usize,
}

#[derive(Args)]
struct QuasitileArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// boxes (lattice boxes in Z^d) or degrees (monomial degree windows).
    #[arg(long)]
    mode: String,
    /// Lattice dimension for boxes.
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Tile side / tile degree.
    #[arg(long)]
    tile: u64,
    /// Target side / target degree.
    #[arg(long)]
    target: u64,
    /// Coverage slack for boxes, e.g. "1/10".
    #[arg(long, default_value = "1/10")]
    epsilon: String,
}

#[derive(Args)]
struct FieldextArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// companion | roots | evalpoints | monicseq | algebraic | tower.
    #[arg(long)]
    mode: String,
    /// Monic modulus for companion mode.
    #[arg(long)]
    f: Option<String>,
    /// Distinct rational roots, e.g. "1,-1,2".
    #[arg(long)]
    roots: Option<String>,
    /// Number of evaluation points 1..=N.
    #[arg(long)]
    points: Option<u64>,
    /// Degree list for monicseq/tower, e.g. "2,4,8,16".
    #[arg(long)]
    degrees: Option<String>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Prime size for the randomized oracle (integer case).
    #[arg(long, default_value_t = 62)]
    prime_bits: u32,
}

#[derive(Args)]
struct TowerArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Degree list, e.g. "2,4,8,16".
    #[arg(long)]
    degrees: Option<String>,
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    version: &'static str,
    command: String,
    seed: u64,
    config: serde_json::Value,
    result: T,
}

fn emit<T: Serialize>(
    common: &CommonArgs,
    command: &str,
    result: T,
) -> Result<()> {
    let report = Report {
        version: VERSION,
        command: command.to_string(),
        seed: common.seed(),
        config: common.config_echo(command),
        result,
    };
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match &common.out {
        None => print!("{text}"),
        Some(path) => std::fs::write(path, text)?,
    }
    Ok(())
}

fn write_csv(path: &Path, report: &LimitReport) -> Result<()> {
    let mut out = String::from(
        "step,dimW,rank_value_num,rank_value_den,normalized_decimal,invariance_defect_decimal\n",
    );
    for (i, step) in report.steps.iter().enumerate() {
        let (num, den) = match step.rank_value.split_once('/') {
            Some((n, d)) => (n.to_string(), d.to_string()),
            None => (step.rank_value.clone(), "1".to_string()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            i, step.dim_w, num, den, step.normalized_decimal, step.invariance_defect_decimal
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn load_spec(common: &CommonArgs) -> Result<AnyRing> {
    let path = common
        .spec
        .as_ref()
        .ok_or_else(|| Error::invalid("--spec is required"))?;
    let text = std::fs::read_to_string(path)?;
    parse_ring_spec(&text)
}

fn load_matrix<R: RingElem>(
    ring: &Arc<ExtRing<R>>,
    common: &CommonArgs,
) -> Result<Matrix<ExtElem<R>>> {
    if let Some(lit) = &common.inline {
        return ring.parse_matrix_literal(lit);
    }
    let path = common
        .matrix
        .as_ref()
        .ok_or_else(|| Error::invalid("--matrix or --inline is required"))?;
    let text = std::fs::read_to_string(path)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let json: MatrixJson = serde_json::from_str(&text)?;
        ring.parse_matrix(&json)
    } else {
        ring.parse_matrix_literal(trimmed)
    }
}

fn resolve_schedule<R: RingElem>(
    ring: &Arc<ExtRing<R>>,
    common: &CommonArgs,
) -> Result<Schedule> {
    let kappa = common.kappa();
    Ok(match &common.schedule {
        None => Schedule::default_for(ring, kappa),
        Some(s) => parse_schedule(s)?.with_kappa(kappa),
    })
}

macro_rules! with_ring {
    ($any:expr, |$r:ident| $body:expr) => {
        match $any {
            AnyRing::Q($r) => $body,
            AnyRing::Gf($r) => $body,
            AnyRing::Product($r) => $body,
            AnyRing::Block($r) => $body,
            AnyRing::ExtField($r) => $body,
        }
    };
}

fn cmd_rank(args: RankArgs) -> Result<u8> {
    let common = args.common.merged()?;
    let any = load_spec(&common)?;
    with_ring!(any, |ring| {
        let a = load_matrix(&ring, &common)?;
        let schedule = resolve_schedule(&ring, &common)?;
        let report = limit_rank(&ring, &a, &schedule, common.kappa(), &common.tol()?)?;
        if let Some(csv) = &common.csv {
            write_csv(csv, &report)?;
        }
        let stabilized = report.stabilized;
        emit(&common, "rank", report)?;
        Ok(if stabilized { 0 } else { 2 })
    })
}

fn cmd_axioms(args: AxiomArgs) -> Result<u8> {
    let common = args.common.clone().merged()?;
    let trials = common.trials.unwrap_or(200);
    let seed = common.seed();
    let max_dim = args.max_dim;
    let report = match args.rank_kind.as_str() {
        "field" => {
            let field = args.field.as_deref().unwrap_or("q");
            if field == "q" {
                let rk = FieldRank::<Rational>::new();
                let sampler = |rng: &mut sylvan_core::rank::axioms::ChaCha8Rng, r: usize, c: usize| {
                    Matrix::from_fn(r, c, |_, _| sylvan_core::rank::axioms::rational_pool(rng))
                };
                let unit = Matrix::from_vec(1, 1, vec![rint(1)]);
                check_axioms(&rk, &sampler, &unit, trials, max_dim, seed)?
            } else {
                let p: u64 = field
                    .strip_prefix("gf")
                    .map(|t| t.trim_start_matches(':'))
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::invalid(format!("bad field {field:?}")))?;
                let gf = GfField::new(p)?;
                let ops = GfOps(gf);
                let rk = FieldRank::<sylvan_core::GfElem>::new();
                let sampler = move |rng: &mut sylvan_core::rank::axioms::ChaCha8Rng, r: usize, c: usize| {
                    Matrix::from_fn(r, c, |_, _| ops.sample(rng))
                };
                let unit = Matrix::from_vec(1, 1, vec![gf.elem(1)]);
                check_axioms(&rk, &sampler, &unit, trials, max_dim, seed)?
            }
        }
        "matrix" => {
            let k = args.k.unwrap_or(2);
            let rk = MatrixRingRank::<Rational>::new(k)?;
            let ops = BlockOps { k };
            let sampler = move |rng: &mut sylvan_core::rank::axioms::ChaCha8Rng, r: usize, c: usize| {
                Matrix::from_fn(r, c, |_, _| ops.sample(rng))
            };
            let unit = Matrix::from_vec(1, 1, vec![BlockOps { k }.one()]);
            check_axioms(&rk, &sampler, &unit, trials, max_dim.min(4), seed)?
        }
        "product" => {
            let weights: Vec<Rational> = args
                .weights
                .as_deref()
                .unwrap_or("1/2,1/2")
                .split(',')
                .map(parse_rational_expr)
                .collect::<Result<Vec<_>>>()?;
            let arity = weights.len();
            let rk = ProductRank::<Rational>::new(weights)?;
            let ops = ProductOps { arity };
            let sampler = move |rng: &mut sylvan_core::rank::axioms::ChaCha8Rng, r: usize, c: usize| {
                Matrix::from_fn(r, c, |_, _| ops.sample(rng))
            };
            let unit = Matrix::from_vec(1, 1, vec![ProductOps { arity }.one()]);
            check_axioms(&rk, &sampler, &unit, trials, max_dim, seed)?
        }
        "companion" => {
            let ring = poly_ring_q();
            let fsrc = args.f.as_deref().unwrap_or("t^2 - 1");
            let monic = parse_monic(&ring, fsrc)?;
            let rk = CompanionRank { ring: ring.clone(), monic };
            let sr = ring.clone();
            let sampler = move |rng: &mut sylvan_core::rank::axioms::ChaCha8Rng, r: usize, c: usize| {
                Matrix::from_fn(r, c, |_, _| sr.sample_elem(rng, 2))
            };
            let unit = Matrix::from_vec(1, 1, vec![ring.one()]);
            check_axioms(&rk, &sampler, &unit, trials, max_dim.min(4), seed)?
        }
        "trace" => {
            let any = load_spec(&common)?;
            let AnyRing::Q(ring) = any else {
                return Err(Error::invalid("trace axioms need a rational group algebra"));
            };
            let rk = sylvan_core::trace::TraceRank { ring: ring.clone() };
            let sr = ring.clone();
            let sampler = move |rng: &mut sylvan_core::rank::axioms::ChaCha8Rng, r: usize, c: usize| {
                Matrix::from_fn(r, c, |_, _| sr.sample_elem(rng, 2))
            };
            let unit = Matrix::from_vec(1, 1, vec![ring.one()]);
            check_axioms(&rk, &sampler, &unit, trials, max_dim.min(4), seed)?
        }
        other => return Err(Error::invalid(format!("unknown rank kind {other:?}"))),
    };
    let passed = report.passed();
    emit(&common, "axioms", report)?;
    Ok(if passed { 0 } else { 2 })
}

fn parse_monic(ring: &Arc<ExtRing<Rational>>, src: &str) -> Result<Vec<Rational>> {
    let e = ring.parse_elem(src)?;
    let mut coeffs: Vec<Rational> = Vec::new();
    for (idx, c) in e.support() {
        let sylvan_core::ring::UIndex::Exp(v) = idx else {
            return Err(Error::invalid("modulus must be a polynomial in t"));
        };
        let k = v[0] as usize;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, Rational::from_integer(0.into()));
        }
        coeffs[k] = c.clone();
    }
    Ok(coeffs)
}

#[derive(Serialize)]
struct QuasitileResult {
    mode: String,
    tile_dim: usize,
    centers: Vec<String>,
    target_dim: usize,
    epsilon: String,
    check: sylvan_core::window::QuasitilingReport,
}

fn cmd_quasitile(args: QuasitileArgs) -> Result<u8> {
    let common = args.common.clone().merged()?;
    let eps = parse_rational_expr(&args.epsilon)?;
    let (q, target, centers, ring_name) = match args.mode.as_str() {
        "boxes" => {
            let ring = laurent_ring_q(args.dim);
            let q = box_quasitile(args.dim, args.tile, args.target, &eps)?;
            let target = box_window(args.dim, args.target);
            let centers: Vec<String> = q.centers[0].iter().map(|c| ring.fmt_index(c)).collect();
            let report = check_quasitiling(&ring, &q, &target)?;
            (report, target.dim(), centers, q.tiles[0].dim())
        }
        "degrees" => {
            let ring = poly_ring_q();
            let q = kt_quasitile(args.tile, args.target)?;
            let target = box_window(1, args.target);
            let centers: Vec<String> = q.centers[0].iter().map(|c| ring.fmt_index(c)).collect();
            let report = check_quasitiling(&ring, &q, &target)?;
            (report, target.dim(), centers, q.tiles[0].dim())
        }
        other => return Err(Error::invalid(format!("unknown quasitile mode {other:?}"))),
    };
    let (check, target_dim, centers, tile_dim) = (q, target, centers, ring_name);
    let ok = check.all_passed();
    emit(
        &common,
        "quasitile",
        QuasitileResult {
            mode: args.mode,
            tile_dim,
            centers,
            target_dim,
            epsilon: args.epsilon,
            check,
        },
    )?;
    Ok(if ok { 0 } else { 2 })
}

#[derive(Serialize)]
struct ValueResult {
    value: String,
    detail: Option<String>,
}

fn cmd_fieldext(args: FieldextArgs) -> Result<u8> {
    let common = args.common.clone().merged()?;
    match args.mode.as_str() {
        "companion" | "roots" | "evalpoints" | "monicseq" => {
            let ring = match common.spec.as_ref() {
                None => poly_ring_q(),
                Some(_) => {
                    let AnyRing::Q(r) = load_spec(&common)? else {
                        return Err(Error::invalid(
                            "field-extension modes over the CLI use rational coefficients",
                        ));
                    };
                    r
                }
            };
            let a = load_matrix(&ring, &common)?;
            match args.mode.as_str() {
                "companion" => {
                    let fsrc = args
                        .f
                        .as_deref()
                        .ok_or_else(|| Error::invalid("--f is required for companion mode"))?;
                    let monic = parse_monic(&ring, fsrc)?;
                    let v = rk_f(&ring, &a, &monic)?;
                    emit(
                        &common,
                        "fieldext",
                        ValueResult { value: v.to_string(), detail: None },
                    )?;
                    Ok(0)
                }
                "roots" => {
                    let roots: Vec<Rational> = args
                        .roots
                        .as_deref()
                        .ok_or_else(|| Error::invalid("--roots is required for roots mode"))?
                        .split(',')
                        .map(parse_rational_expr)
                        .collect::<Result<Vec<_>>>()?;
                    let v = rk_f_by_roots(&ring, &a, &roots)?;
                    let f = poly_from_roots(&roots);
                    let cross = rk_f(&ring, &a, &f)?;
                    emit(
                        &common,
                        "fieldext",
                        ValueResult {
                            value: v.to_string(),
                            detail: Some(format!(
                                "companion rank with the product modulus: {cross} (must match)"
                            )),
                        },
                    )?;
                    Ok(if v == cross { 0 } else { 2 })
                }
                "evalpoints" => {
                    let n = args.points.unwrap_or(16);
                    let pts: Vec<Rational> = (1..=n as i64).map(rint).collect();
                    let report = eval_point_limit(&ring, &a, &pts, common.kappa(), &common.tol()?)?;
                    let ok = report.stabilized;
                    emit(&common, "fieldext", report)?;
                    Ok(if ok { 0 } else { 2 })
                }
                _ => {
                    let degrees = parse_u64_list(args.degrees.as_deref().unwrap_or("2,4,8,16,32"))?;
                    let report =
                        monic_sequence_limit(&ring, &a, &degrees, common.kappa(), &common.tol()?)?;
                    let ok = report.stabilized;
                    emit(&common, "fieldext", report)?;
                    Ok(if ok { 0 } else { 2 })
                }
            }
        }
        "algebraic" => {
            let any = load_spec(&common)?;
            with_ring!(any, |ring| {
                let a = load_matrix(&ring, &common)?;
                let v = algebraic_ext_rank(&ring, &a)?;
                emit(&common, "fieldext", ValueResult { value: v.to_string(), detail: None })?;
                Ok(0)
            })
        }
        "tower" => run_tower(&common, args.degrees.as_deref()),
        other => Err(Error::invalid(format!("unknown fieldext mode {other:?}"))),
    }
}

fn parse_u64_list(src: &str) -> Result<Vec<u64>> {
    src.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::invalid(format!("bad integer {t:?}")))
        })
        .collect()
}

fn run_tower(common: &CommonArgs, degrees: Option<&str>) -> Result<u8> {
    let path = common
        .spec
        .as_ref()
        .ok_or_else(|| Error::invalid("--spec is required for towers"))?;
    let text = std::fs::read_to_string(path)?;
    let doc: sylvan_core::ring::spec_io::RingSpecDoc = serde_json::from_str(&text)?;
    let ext = doc
        .ext
        .as_ref()
        .ok_or_else(|| Error::invalid("tower specs need extension data under \"ext\""))?;
    let table = sylvan_core::ring::spec_io::structure_consts_from_doc(ext)?;
    let src = match &common.inline {
        Some(s) => s.clone(),
        None => {
            let mpath = common
                .matrix
                .as_ref()
                .ok_or_else(|| Error::invalid("--matrix or --inline is required"))?;
            let text = std::fs::read_to_string(mpath)?;
            let trimmed = text.trim();
            if trimmed.starts_with('{') {
                let json: MatrixJson = serde_json::from_str(trimmed)?;
                // re-render as a literal so both rings parse one source
                let rows: Vec<String> = json
                    .entries
                    .iter()
                    .map(|r| format!("[{}]", r.join(", ")))
                    .collect();
                format!("[{}]", rows.join(", "))
            } else {
                trimmed.to_string()
            }
        }
    };
    let degrees = parse_u64_list(degrees.unwrap_or("2,4,8,16,32,64"))?;
    let report = composition_check(&table, &src, &degrees, common.kappa(), &common.tol()?)?;
    let ok = report.agree == Some(true);
    let stabilized = report.two_step.stabilized && report.one_step.stabilized;
    emit(common, "tower", report)?;
    Ok(if !stabilized {
        2
    } else if ok {
        0
    } else {
        2
    })
}

fn cmd_trace(args: TraceArgs) -> Result<u8> {
    let common = args.common.clone().merged()?;
    let any = load_spec(&common)?;
    match any {
        AnyRing::Q(ring) => {
            let a = load_matrix(&ring, &common)?;
            let is_finite = matches!(
                &ring.kind,
                sylvan_core::ring::RingKind::Crossed {
                    group: sylvan_core::ring::GroupSpec::Finite(_),
                    ..
                }
            );
            let report = if is_finite {
                trace_window_compare_finite(&ring, &a, common.kappa())?
            } else {
                let schedule = resolve_schedule(&ring, &common)?;
                trace_window_compare_z(
                    &ring,
                    &a,
                    &schedule,
                    common.kappa(),
                    common.trials.unwrap_or(5),
                    args.prime_bits,
                    common.seed(),
                )?
            };
            if let Some(csv) = &common.csv {
                write_csv(csv, &report.window)?;
            }
            let code = match report.equal {
                Some(true) => 0,
                Some(false) => 2,
                None => 2,
            };
            emit(&common, "trace-compare", report)?;
            Ok(code)
        }
        other => {
            // finite groups over product coefficient rings (weighted traces)
            let AnyRing::Product(ring) = other else {
                return Err(Error::invalid(
                    "trace comparisons need rational or product coefficients",
                ));
            };
            let a = load_matrix(&ring, &common)?;
            let report = trace_window_compare_finite(&ring, &a, common.kappa())?;
            let code = match report.equal {
                Some(true) => 0,
                Some(false) => 2,
                None => 2,
            };
            emit(&common, "trace-compare", report)?;
            Ok(code)
        }
    }
}

fn run() -> Result<u8> {
    let cli = Cli::parse();
    let jobs = match &cli.command {
        Command::Rank(a) => a.common.jobs,
        Command::Axioms(a) => a.common.jobs,
        Command::Quasitile(a) => a.common.jobs,
        Command::Fieldext(a) => a.common.jobs,
        Command::TraceCompare(a) => a.common.jobs,
        Command::Tower(a) => a.common.jobs,
    };
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .ok();
    }
    match cli.command {
        Command::Rank(a) => cmd_rank(a),
        Command::Axioms(a) => cmd_axioms(a),
        Command::Quasitile(a) => cmd_quasitile(a),
        Command::Fieldext(a) => cmd_fieldext(a),
        Command::TraceCompare(a) => cmd_trace(a),
        Command::Tower(a) => run_tower(&a.common.clone().merged()?, a.degrees.as_deref()),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(Error::NotStabilized(report)) => {
            eprintln!("sylvan: the normalized ranks did not stabilize");
            if let Ok(text) = serde_json::to_string_pretty(&report) {
                eprintln!("{text}");
            }
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("sylvan: {err}");
            ExitCode::from(1)
        }
    }
}
