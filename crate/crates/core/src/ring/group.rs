//! Group data for crossed products: Z^d with named generators, and finite
//! groups given by multiplication tables.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A finite group as a multiplication table. `mul[i][j]` is the index of
/// `g_i * g_j`; the identity and inverse table are derived and the table is
/// checked to be a group on construction (associativity exhaustively up to
/// order 64, sampled above with the seed recorded).
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroup {
    pub names: Vec<String>,
    pub mul: Vec<Vec<usize>>,
    pub inv: Vec<usize>,
    pub identity: usize,
    pub assoc_check: AssocCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssocCheck {
    Exhaustive,
    Sampled { seed: u64, triples: usize },
}

impl FiniteGroup {
    pub fn from_table(names: Vec<String>, mul: Vec<Vec<usize>>) -> Result<Arc<Self>> {
        let n = names.len();
        if n == 0 {
            return Err(Error::invalid("a group needs at least one element"));
        }
        {
            let mut sorted = names.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != n {
                return Err(Error::invalid("duplicate element names"));
            }
        }
        if mul.len() != n || mul.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("multiplication table must be n x n"));
        }
        if mul.iter().flatten().any(|&k| k >= n) {
            return Err(Error::invalid("table entry out of range"));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|i| mul[e][i] == i && mul[i][e] == i))
            .ok_or_else(|| Error::invalid("table has no identity element"))?;
        let mut inv = vec![usize::MAX; n];
        for i in 0..n {
            let j = (0..n)
                .find(|&j| mul[i][j] == identity && mul[j][i] == identity)
                .ok_or_else(|| Error::invalid(format!("element {} has no inverse", names[i])))?;
            inv[i] = j;
        }
        let assoc_check = if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                            return Err(Error::invalid(format!(
                                "associativity fails on ({}, {}, {})",
                                names[a], names[b], names[c]
                            )));
                        }
                    }
                }
            }
            AssocCheck::Exhaustive
        } else {
            let seed = 0x5eed_a550u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let triples = 20_000;
            for _ in 0..triples {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                    return Err(Error::invalid(format!(
                        "associativity fails on sampled ({}, {}, {})",
                        names[a], names[b], names[c]
                    )));
                }
            }
            AssocCheck::Sampled { seed, triples }
        };
        Ok(Arc::new(FiniteGroup { names, mul, inv, identity, assoc_check }))
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    /// Z/n with elements e, s, s2, ...
    pub fn cyclic(n: usize) -> Arc<Self> {
        assert!(n >= 1);
        let names: Vec<String> = (0..n)
            .map(|i| match i {
                0 => "e".to_string(),
                1 => "s".to_string(),
                i => format!("s{i}"),
            })
            .collect();
        let mul = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::from_table(names, mul).expect("cyclic group table is valid")
    }

    /// Direct product, with concatenated names (`e` dropped).
    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<Arc<Self>> {
        let (na, nb) = (a.order(), b.order());
        let idx = |i: usize, j: usize| i * nb + j;
        let mut names = Vec::with_capacity(na * nb);
        for i in 0..na {
            for j in 0..nb {
                let n1 = &a.names[i];
                let n2 = &b.names[j];
                names.push(match (i == a.identity, j == b.identity) {
                    (true, true) => "e".to_string(),
                    (true, false) => n2.clone(),
                    (false, true) => n1.clone(),
                    (false, false) => format!("{n1}{n2}"),
                });
            }
        }
        let mut mul = vec![vec![0usize; na * nb]; na * nb];
        for i1 in 0..na {
            for j1 in 0..nb {
                for i2 in 0..na {
                    for j2 in 0..nb {
                        mul[idx(i1, j1)][idx(i2, j2)] = idx(a.mul[i1][i2], b.mul[j1][j2]);
                    }
                }
            }
        }
        Self::from_table(names, mul)
    }

    /// Z/2 x Z/2 with elements e, a, b, ab.
    pub fn klein4() -> Arc<Self> {
        let names = vec!["e".into(), "a".into(), "b".into(), "ab".into()];
        let mul = vec![
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
            vec![2, 3, 0, 1],
            vec![3, 2, 1, 0],
        ];
        Self::from_table(names, mul).expect("Klein table is valid")
    }

    /// The symmetric group on three letters, generated by the 3-cycle `r`
    /// and the flip `f`, with elements e, r, r2, f, rf, r2f.
    pub fn symmetric3() -> Arc<Self> {
        // Permutations in one-line notation; composition (p * q)(x) = p(q(x)).
        let r = [1usize, 2, 0];
        let f = [1usize, 0, 2];
        let e = [0usize, 1, 2];
        let comp = |p: &[usize; 3], q: &[usize; 3]| -> [usize; 3] {
            [p[q[0]], p[q[1]], p[q[2]]]
        };
        let r2 = comp(&r, &r);
        let rf = comp(&r, &f);
        let r2f = comp(&r2, &f);
        let elems: Vec<(&str, [usize; 3])> = vec![
            ("e", e),
            ("r", r),
            ("r2", r2),
            ("f", f),
            ("rf", rf),
            ("r2f", r2f),
        ];
        let names: Vec<String> = elems.iter().map(|(n, _)| n.to_string()).collect();
        let find = |p: &[usize; 3]| elems.iter().position(|(_, q)| q == p).unwrap();
        let mul = (0..6)
            .map(|i| (0..6).map(|j| find(&comp(&elems[i].1, &elems[j].1))).collect())
            .collect();
        Self::from_table(names, mul).expect("S3 table is valid")
    }
}

/// The acting group or monoid of an extension.
#[derive(Debug, Clone)]
pub enum GroupSpec {
    /// Z^d, with one Laurent generator name per coordinate.
    Zd { d: usize, names: Vec<String> },
    Finite(Arc<FiniteGroup>),
}

impl GroupSpec {
    pub fn zd(d: usize) -> Self {
        let names = if d == 1 {
            vec!["z".to_string()]
        } else {
            (1..=d).map(|i| format!("z{i}")).collect()
        };
        GroupSpec::Zd { d, names }
    }

    pub fn finite(g: Arc<FiniteGroup>) -> Self {
        GroupSpec::Finite(g)
    }
}
