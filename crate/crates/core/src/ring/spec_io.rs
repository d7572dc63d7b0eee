//! JSON ring-spec files: `{"kind": "crossed_product" | "poly_ext" |
//! "finite_ext" | "finite_ext_poly", ...}` with tables inline, and the
//! dispatch enum over the supported coefficient rings.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rank::{FieldRank, MatrixRingRank, ProductRank, RankFunction};
use crate::ring::finite_ext::StructureConsts;
use crate::ring::group::{FiniteGroup, GroupSpec};
use crate::ring::ops::{BlockOps, ExtFieldOps, GfOps, ProductOps, QOps, RingOps};
use crate::ring::{ActionSpec, CocycleSpec, ExtRing, FieldExtElem};
use crate::scalar::gf::GfField;
use crate::scalar::parse::parse_rational_expr;
use crate::scalar::{Automorphism, BlockElem, GfElem, ProductElem, Rational, RingElem};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RingSpecDoc {
    pub kind: String,
    #[serde(default)]
    pub base: Option<BaseDoc>,
    #[serde(default)]
    pub rank: Option<RankDoc>,
    #[serde(default)]
    pub group: Option<GroupDoc>,
    #[serde(default)]
    pub action: Option<ActionDoc>,
    #[serde(default)]
    pub cocycle: Option<CocycleDoc>,
    #[serde(default)]
    pub vars: Option<Vec<String>>,
    #[serde(default)]
    pub ext: Option<ExtDoc>,
    #[serde(default)]
    pub var: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaseDoc {
    pub ring: String,
    #[serde(default)]
    pub p: Option<u64>,
    #[serde(default)]
    pub arity: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub ext: Option<ExtDoc>,
}

impl Default for BaseDoc {
    fn default() -> Self {
        BaseDoc { ring: "q".into(), p: None, arity: None, k: None, ext: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankDoc {
    pub kind: String,
    #[serde(default)]
    pub weights: Option<Vec<String>>,
    #[serde(default)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDoc {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub elements: Option<Vec<String>>,
    #[serde(default)]
    pub mul: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActionDoc {
    Name(String),
    Permutations { permutations: Vec<Vec<usize>> },
    GeneratorPermutations { generator_permutations: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CocycleDoc {
    Name(String),
    Table { table: Vec<Vec<String>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtDoc {
    #[serde(default)]
    pub names: Option<Vec<String>>,
    #[serde(default)]
    pub table: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default)]
    pub root: Option<String>,
    #[serde(default)]
    pub min_poly: Option<Vec<String>>,
}

/// The supported coefficient rings, dispatched at the CLI boundary.
#[derive(Clone)]
pub enum AnyRing {
    Q(Arc<ExtRing<Rational>>),
    Gf(Arc<ExtRing<GfElem>>),
    Product(Arc<ExtRing<ProductElem<Rational>>>),
    Block(Arc<ExtRing<BlockElem<Rational>>>),
    ExtField(Arc<ExtRing<FieldExtElem>>),
}

impl AnyRing {
    pub fn name(&self) -> String {
        match self {
            AnyRing::Q(r) => r.name(),
            AnyRing::Gf(r) => r.name(),
            AnyRing::Product(r) => r.name(),
            AnyRing::Block(r) => r.name(),
            AnyRing::ExtField(r) => r.name(),
        }
    }
}

pub fn structure_consts_from_doc(doc: &ExtDoc) -> Result<Arc<StructureConsts>> {
    if let Some(mp) = &doc.min_poly {
        let root = doc.root.as_deref().unwrap_or("u");
        let coeffs: Vec<Rational> = mp
            .iter()
            .map(|s| parse_rational_expr(s))
            .collect::<Result<Vec<_>>>()?;
        return StructureConsts::adjoin_root(root, &coeffs).map(|sc| match &doc.names {
            None => sc,
            Some(names) => {
                StructureConsts::new(names.clone(), sc.table.clone(), sc.conj.clone())
                    .expect("renamed table stays valid")
            }
        });
    }
    let names = doc
        .names
        .clone()
        .ok_or_else(|| Error::invalid("extension needs names or a min_poly"))?;
    let table_s = doc
        .table
        .as_ref()
        .ok_or_else(|| Error::invalid("extension needs a table or a min_poly"))?;
    let table: Vec<Vec<Vec<Rational>>> = table_s
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| v.iter().map(|s| parse_rational_expr(s)).collect())
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    StructureConsts::new(names, table, None)
}

pub fn group_from_doc(doc: &GroupDoc) -> Result<GroupSpec> {
    match doc.kind.as_str() {
        "zd" => {
            let d = doc.d.ok_or_else(|| Error::invalid("zd group needs d"))?;
            Ok(GroupSpec::zd(d))
        }
        "cyclic" => {
            let n = doc.n.ok_or_else(|| Error::invalid("cyclic group needs n"))?;
            Ok(GroupSpec::finite(FiniteGroup::cyclic(n)))
        }
        "klein4" => Ok(GroupSpec::finite(FiniteGroup::klein4())),
        "symmetric3" => Ok(GroupSpec::finite(FiniteGroup::symmetric3())),
        "finite" => {
            let names = doc
                .elements
                .clone()
                .ok_or_else(|| Error::invalid("finite group needs element names"))?;
            let mul = doc
                .mul
                .clone()
                .ok_or_else(|| Error::invalid("finite group needs a mul table"))?;
            Ok(GroupSpec::finite(FiniteGroup::from_table(names, mul)?))
        }
        other => Err(Error::invalid(format!("unknown group type {other:?}"))),
    }
}

fn action_from_doc(doc: &Option<ActionDoc>, per_element: bool) -> Result<ActionSpec> {
    match doc {
        None => Ok(ActionSpec::Trivial),
        Some(ActionDoc::Name(s)) if s == "trivial" => Ok(ActionSpec::Trivial),
        Some(ActionDoc::Name(s)) => Err(Error::invalid(format!("unknown action {s:?}"))),
        Some(ActionDoc::Permutations { permutations }) => {
            if !per_element {
                return Err(Error::invalid("per-element actions need a finite group"));
            }
            Ok(ActionSpec::PerElement(
                permutations.iter().cloned().map(Automorphism::Permutation).collect(),
            ))
        }
        Some(ActionDoc::GeneratorPermutations { generator_permutations }) => {
            if per_element {
                return Err(Error::invalid("per-generator actions need Z^d"));
            }
            Ok(ActionSpec::PerGenerator(
                generator_permutations
                    .iter()
                    .cloned()
                    .map(Automorphism::Permutation)
                    .collect(),
            ))
        }
    }
}

fn cocycle_from_doc<R: RingElem>(
    doc: &Option<CocycleDoc>,
    base: &dyn RingOps<R>,
) -> Result<CocycleSpec<R>> {
    match doc {
        None => Ok(CocycleSpec::Trivial),
        Some(CocycleDoc::Name(s)) if s == "trivial" => Ok(CocycleSpec::Trivial),
        Some(CocycleDoc::Name(s)) if s == "klein_sign" => {
            let tbl = crate::ring::klein_sign_cocycle();
            let table = tbl
                .iter()
                .map(|row| row.iter().map(|q| base.one().scale(q)).collect())
                .collect();
            Ok(CocycleSpec::Table(table))
        }
        Some(CocycleDoc::Name(s)) => Err(Error::invalid(format!("unknown cocycle {s:?}"))),
        Some(CocycleDoc::Table { table }) => {
            let parsed = table
                .iter()
                .map(|row| row.iter().map(|s| base.parse(s)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(CocycleSpec::Table(parsed))
        }
    }
}

fn build_with_base<R: RingElem>(
    doc: &RingSpecDoc,
    base: Arc<dyn RingOps<R>>,
    rank: Arc<dyn RankFunction<R>>,
) -> Result<Arc<ExtRing<R>>> {
    match doc.kind.as_str() {
        "crossed_product" => {
            let gdoc = doc
                .group
                .as_ref()
                .ok_or_else(|| Error::invalid("crossed_product needs a group"))?;
            let group = group_from_doc(gdoc)?;
            let per_element = matches!(group, GroupSpec::Finite(_));
            let action = action_from_doc(&doc.action, per_element)?;
            let cocycle = cocycle_from_doc(&doc.cocycle, base.as_ref())?;
            ExtRing::crossed(base, rank, group, action, cocycle)
        }
        "poly_ext" => {
            let vars = doc.vars.clone().unwrap_or_else(|| vec!["t".to_string()]);
            ExtRing::poly(base, rank, vars)
        }
        "finite_ext" => {
            let ext = doc
                .ext
                .as_ref()
                .ok_or_else(|| Error::invalid("finite_ext needs extension data"))?;
            ExtRing::finite_ext(base, rank, structure_consts_from_doc(ext)?)
        }
        "finite_ext_poly" => {
            let ext = doc
                .ext
                .as_ref()
                .ok_or_else(|| Error::invalid("finite_ext_poly needs extension data"))?;
            let var = doc.var.clone().unwrap_or_else(|| "t".to_string());
            ExtRing::finite_ext_poly(base, rank, structure_consts_from_doc(ext)?, &var)
        }
        other => Err(Error::invalid(format!("unknown ring kind {other:?}"))),
    }
}

/// Build a validated ring from a parsed spec document.
pub fn build_ring(doc: &RingSpecDoc) -> Result<AnyRing> {
    let base = doc.base.clone().unwrap_or_default();
    match base.ring.as_str() {
        "q" => {
            let rank_doc = doc.rank.as_ref().map(|r| r.kind.as_str()).unwrap_or("field");
            if rank_doc != "field" {
                return Err(Error::invalid("rational base takes the field rank"));
            }
            let ring = build_with_base(
                doc,
                Arc::new(QOps),
                Arc::new(FieldRank::<Rational>::new()),
            )?;
            Ok(AnyRing::Q(ring))
        }
        "gf" => {
            let p = base.p.ok_or_else(|| Error::invalid("gf base needs p"))?;
            let field = GfField::new(p)?;
            let ring = build_with_base(
                doc,
                Arc::new(GfOps(field)),
                Arc::new(FieldRank::<GfElem>::new()),
            )?;
            Ok(AnyRing::Gf(ring))
        }
        "product" => {
            let arity = base.arity.ok_or_else(|| Error::invalid("product base needs arity"))?;
            let weights = match &doc.rank {
                None => vec![
                    Rational::new(1.into(), (arity as i64).into());
                    arity
                ],
                Some(r) if r.kind == "product" => {
                    let ws = r
                        .weights
                        .as_ref()
                        .ok_or_else(|| Error::invalid("product rank needs weights"))?;
                    ws.iter().map(|s| parse_rational_expr(s)).collect::<Result<Vec<_>>>()?
                }
                Some(_) => return Err(Error::invalid("product base takes the product rank")),
            };
            if weights.len() != arity {
                return Err(Error::invalid("need one weight per component"));
            }
            let ring = build_with_base(
                doc,
                Arc::new(ProductOps { arity }),
                Arc::new(ProductRank::<Rational>::new(weights)?),
            )?;
            Ok(AnyRing::Product(ring))
        }
        "matrix" => {
            let k = base.k.ok_or_else(|| Error::invalid("matrix base needs k"))?;
            let ring = build_with_base(
                doc,
                Arc::new(BlockOps { k }),
                Arc::new(MatrixRingRank::<Rational>::new(k)?),
            )?;
            Ok(AnyRing::Block(ring))
        }
        "field_ext" => {
            let ext = base
                .ext
                .as_ref()
                .ok_or_else(|| Error::invalid("field_ext base needs extension data"))?;
            let table = structure_consts_from_doc(ext)?;
            let ring = build_with_base(
                doc,
                Arc::new(ExtFieldOps { table }),
                Arc::new(FieldRank::<FieldExtElem>::new()),
            )?;
            Ok(AnyRing::ExtField(ring))
        }
        other => Err(Error::invalid(format!("unknown base ring {other:?}"))),
    }
}

pub fn parse_ring_spec(src: &str) -> Result<AnyRing> {
    let doc: RingSpecDoc = serde_json::from_str(src)?;
    build_ring(&doc)
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;
    use super::*;

    #[test]
    fn laurent_ring_spec_round_trip() {
        let src = r#"{"kind":"crossed_product","base":{"ring":"q"},
                      "group":{"type":"zd","d":1}}"#;
        let ring = parse_ring_spec(src).unwrap();
        assert_eq!(ring.name(), "Q*Z^1");
    }

    #[test]
    fn swap_crossed_product_spec() {
        let src = r#"{"kind":"crossed_product",
                      "base":{"ring":"product","arity":2},
                      "rank":{"kind":"product","weights":["1/2","1/2"]},
                      "group":{"type":"cyclic","n":2},
                      "action":{"permutations":[[0,1],[1,0]]},
                      "cocycle":"trivial"}"#;
        let AnyRing::Product(ring) = parse_ring_spec(src).unwrap() else {
            panic!("expected a product-ring base")
        };
        let x = ring.parse_elem("(1,0)*s").unwrap();
        assert!((x.clone() * x).is_zero());
    }

    #[test]
    fn gaussian_extension_spec() {
        let src = r#"{"kind":"finite_ext","base":{"ring":"q"},
                      "ext":{"root":"i","min_poly":["1","0","1"]}}"#;
        let AnyRing::Q(ring) = parse_ring_spec(src).unwrap() else {
            panic!("expected rational base")
        };
        let i = ring.parse_elem("i").unwrap();
        assert_eq!(i.clone() * i, ring.parse_elem("-1").unwrap());
    }

    #[test]
    fn twisted_klein_spec() {
        let src = r#"{"kind":"crossed_product","base":{"ring":"q"},
                      "group":{"type":"klein4"},"cocycle":"klein_sign"}"#;
        assert!(parse_ring_spec(src).is_ok());
    }
}
