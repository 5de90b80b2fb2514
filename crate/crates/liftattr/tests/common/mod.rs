#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;

use liftattr::dtree::{DTree, DTreeBuilder};
use liftattr::{BnpExpression, Clause, DnfFormula, MonoidKind, VarId};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

pub const MOVIES: &[&[&str]] = &[
    &["d1", "a1", "m3"],
    &["d1", "a1", "m2"],
    &["d1", "a3", "m3"],
    &["d1", "a2", "m3"],
    &["d1", "a3", "m2"],
    &["d2", "a1", "m3"],
    &["d2", "a1", "m2"],
    &["d2", "a3", "m3"],
    &["d2", "a2", "m3"],
    &["d2", "a3", "m2"],
];

pub fn movies() -> DnfFormula {
    DnfFormula::from_names(MOVIES)
}

pub fn movies_max() -> BnpExpression {
    BnpExpression::from_names(
        MonoidKind::Max,
        &[
            (&[&["a1", "m3"]], 377),
            (&[&["a2", "m3"]], 377),
            (&[&["a3", "m3"]], 377),
            (&[&["a1", "m2"]], 322),
            (&[&["a3", "m2"]], 322),
            (&[&["a4", "m1"]], 176),
        ],
    )
}

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn ints(pairs: &[(&str, i64)]) -> BTreeMap<VarId, BigInt> {
    pairs.iter().map(|(k, v)| (VarId::from(*k), int(*v))).collect()
}

pub fn vars(names: &[&str]) -> BTreeSet<VarId> {
    names.iter().map(|n| VarId::from(*n)).collect()
}

fn var_names(n: usize) -> Vec<VarId> {
    (0..n).map(|i| VarId::from(format!("v{i:02}"))).collect()
}

fn random_clauses(rng: &mut ChaCha8Rng, names: &[VarId], count: usize, width: usize) -> Vec<Clause> {
    (0..count)
        .map(|_| {
            let w = rng.gen_range(1..=width.min(names.len()));
            let idx = rand::seq::index::sample(rng, names.len(), w);
            Clause::new(idx.iter().map(|i| names[i].clone()))
        })
        .collect()
}

/// Canonical DNF with 4–12 variables, up to 20 clauses of width ≤ 4, over
/// the full variable range (unused variables stay in the universe).
pub fn random_dnf(seed: u64) -> DnfFormula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=12);
    let names = var_names(n);
    let count = rng.gen_range(1..=20);
    let clauses = random_clauses(&mut rng, &names, count, 4);
    DnfFormula::new(clauses, Some(names.into_iter().collect())).unwrap().canonicalize()
}

/// Aggregate lineage with ≤ 10 variables, ≤ 6 terms and values 1–9.
pub fn random_bnp(monoid: MonoidKind, seed: u64) -> BnpExpression {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0000);
    let n = rng.gen_range(2..=10);
    let names = var_names(n);
    let terms = rng.gen_range(1..=6);
    let ts = (0..terms)
        .map(|_| {
            let count = rng.gen_range(1..=3);
            let cs = random_clauses(&mut rng, &names, count, 3);
            let v = if monoid == MonoidKind::Count { 1 } else { rng.gen_range(1..=9) };
            (cs, BigRational::from_integer(v.into()))
        })
        .collect();
    BnpExpression::new(monoid, ts, Some(names.into_iter().collect())).unwrap()
}

/// Boolean tree over `leaves` fresh variables, grouped level by level into
/// IndOr, IndAnd and Shannon gates.
pub fn synthetic_tree(leaves: usize, seed: u64) -> DTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = DTreeBuilder::new();
    let mut q: VecDeque<usize> = (0..leaves).map(|i| b.var(&format!("v{i}"))).collect();
    while q.len() > 1 {
        let k = rng.gen_range(2..=3usize).min(q.len());
        let items: Vec<usize> = (0..k).map(|_| q.pop_front().unwrap()).collect();
        let n = match (k, rng.gen_range(0..3)) {
            (3, 0) => b.shannon(items[0], items[1], items[2]).unwrap(),
            (_, 1) => b.and(items).unwrap(),
            _ => b.or(items).unwrap(),
        };
        q.push_back(n);
    }
    let root = q[0];
    b.finish(root, None)
}
