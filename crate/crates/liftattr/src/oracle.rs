//! Brute-force ground truth by enumerating every valuation of the universe.
//! Bit i of a valuation mask is the i-th variable in name order.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::attribution::shapley_coefficients;
use crate::error::{Error, Result};
use crate::lineage::{Clause, Lineage, MonoidKind, Outcome, VarId};

/// Largest universe the oracle accepts by default.
pub const DEFAULT_CAP: usize = 24;

/// Exhaustive tallies over all valuations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BruteCounts {
    pub vars: usize,
    /// Valuations with a non-Bottom outcome (models, for a DNF).
    pub model_count: u64,
    /// `k_counts[k]`: models with exactly k true variables.
    pub k_counts: Vec<u64>,
    /// Per outcome, Bottom included. A DNF reports its models under value 1.
    pub outcome_counts: BTreeMap<String, u64>,
    pub k_outcome_counts: BTreeMap<String, Vec<u64>>,
    #[serde(skip)]
    pub outcomes: BTreeMap<Outcome, Vec<u64>>,
}

impl BruteCounts {
    pub fn count(&self, o: &Outcome) -> u64 {
        self.outcomes.get(o).map(|v| v.iter().sum()).unwrap_or(0)
    }

    pub fn count_value(&self, v: i64) -> u64 {
        self.count(&Outcome::Value(BigRational::from_integer(v.into())))
    }
}

/// Outcome of every valuation as an index into `values` (0 = Bottom).
struct Table {
    vars: Vec<VarId>,
    values: Vec<BigRational>,
    outcome: Vec<u32>,
}

fn build_table(psi: &Lineage, cap: usize) -> Result<Table> {
    let vars: Vec<VarId> = psi.universe().iter().cloned().collect();
    let n = vars.len();
    if n > cap {
        return Err(Error::OracleCap { vars: n, cap });
    }
    let bit = |v: &VarId| -> u64 { 1u64 << vars.binary_search(v).expect("clause variable in universe") };
    let mask = |c: &Clause| c.vars().iter().map(bit).fold(0u64, |a, b| a | b);
    let fires = |cs: &[u64], m: u64| cs.iter().any(|c| c & m == *c);
    match psi {
        Lineage::Dnf(f) => {
            let clauses: Vec<u64> = f.clauses().iter().map(mask).collect();
            let outcome = (0..(1u64 << n)).into_par_iter().map(|m| u32::from(fires(&clauses, m))).collect();
            let values = vec![BigRational::zero(), BigRational::from_integer(1.into())];
            Ok(Table { vars, values, outcome })
        }
        Lineage::Aggregate(e) => {
            let terms: Vec<(Vec<u64>, &BigRational)> =
                e.terms().iter().map(|t| (t.formula.clauses().iter().map(mask).collect(), &t.value)).collect();
            let raw: Vec<Option<BigRational>> = (0..(1u64 << n))
                .into_par_iter()
                .map(|m| {
                    let mut acc: Option<BigRational> = None;
                    for (cs, v) in &terms {
                        if fires(cs, m) {
                            acc = Some(match (acc, e.monoid()) {
                                (None, _) => (*v).clone(),
                                (Some(a), MonoidKind::Max) => a.max((*v).clone()),
                                (Some(a), MonoidKind::Min) => a.min((*v).clone()),
                                (Some(a), _) => a + *v,
                            });
                        }
                    }
                    acc
                })
                .collect();
            let mut distinct: Vec<BigRational> = raw.iter().flatten().cloned().collect();
            distinct.sort();
            distinct.dedup();
            let outcome = raw
                .into_par_iter()
                .map(|o| o.map_or(0, |v| distinct.binary_search(&v).expect("interned") as u32 + 1))
                .collect();
            let mut values = vec![BigRational::zero()];
            values.extend(distinct);
            Ok(Table { vars, values, outcome })
        }
    }
}

/// Per variable, per size k of the rest, per outcome: counts with x in / out.
struct Marginals {
    hi: Vec<Vec<Vec<u64>>>,
    lo: Vec<Vec<Vec<u64>>>,
}

fn marginals(t: &Table) -> Marginals {
    let n = t.vars.len();
    let o = t.values.len();
    let mut hi = vec![vec![vec![0u64; o]; n.max(1)]; n];
    let mut lo = vec![vec![vec![0u64; o]; n.max(1)]; n];
    for (m, &out) in t.outcome.iter().enumerate() {
        let k = (m as u64).count_ones() as usize;
        for x in 0..n {
            if m >> x & 1 == 1 {
                hi[x][k - 1][out as usize] += 1;
            } else {
                lo[x][k][out as usize] += 1;
            }
        }
    }
    Marginals { hi, lo }
}

fn attribute(t: &Table, weights: &[BigRational]) -> BTreeMap<VarId, BigRational> {
    let mg = marginals(t);
    t.vars
        .iter()
        .enumerate()
        .map(|(x, v)| {
            let mut acc = BigRational::zero();
            for (k, w) in weights.iter().enumerate() {
                for (oi, val) in t.values.iter().enumerate().skip(1) {
                    let d = mg.hi[x][k][oi] as i128 - mg.lo[x][k][oi] as i128;
                    if d != 0 {
                        acc += w * val * BigRational::from_integer(BigInt::from(d));
                    }
                }
            }
            (v.clone(), acc)
        })
        .collect()
}

/// Banzhaf value of every variable, Σ_Y Ψ[Y∪{x}] − Ψ[Y].
pub fn brute_banzhaf_all(psi: &Lineage, cap: usize) -> Result<BTreeMap<VarId, BigRational>> {
    let t = build_table(psi, cap)?;
    let ones = vec![BigRational::from_integer(1.into()); t.vars.len()];
    Ok(attribute(&t, &ones))
}

/// Shapley value of every variable.
pub fn brute_shapley_all(psi: &Lineage, cap: usize) -> Result<BTreeMap<VarId, BigRational>> {
    let t = build_table(psi, cap)?;
    if t.vars.is_empty() {
        return Ok(BTreeMap::new());
    }
    let c = shapley_coefficients(t.vars.len())?;
    Ok(attribute(&t, &c))
}

fn pick(map: BTreeMap<VarId, BigRational>, x: &VarId) -> Result<BigRational> {
    map.get(x).cloned().ok_or_else(|| Error::input(format!("{x} is not in the universe")))
}

pub fn brute_banzhaf(psi: &Lineage, x: &VarId) -> Result<BigRational> {
    pick(brute_banzhaf_all(psi, DEFAULT_CAP)?, x)
}

pub fn brute_shapley(psi: &Lineage, x: &VarId) -> Result<BigRational> {
    pick(brute_shapley_all(psi, DEFAULT_CAP)?, x)
}

/// Model counts, size-resolved counts and outcome tallies.
pub fn brute_counts(psi: &Lineage, cap: usize) -> Result<BruteCounts> {
    let t = build_table(psi, cap)?;
    let n = t.vars.len();
    let mut per: Vec<Vec<u64>> = vec![vec![0; n + 1]; t.values.len()];
    for (m, &o) in t.outcome.iter().enumerate() {
        per[o as usize][(m as u64).count_ones() as usize] += 1;
    }
    let mut k_counts = vec![0u64; n + 1];
    for row in &per[1..] {
        for (k, c) in row.iter().enumerate() {
            k_counts[k] += c;
        }
    }
    let model_count = k_counts.iter().sum();
    let mut outcomes = BTreeMap::new();
    for (i, row) in per.into_iter().enumerate() {
        if row.iter().all(|&c| c == 0) {
            continue;
        }
        let o = if i == 0 { Outcome::Bottom } else { Outcome::Value(t.values[i].clone()) };
        outcomes.insert(o, row);
    }
    let outcome_counts = outcomes.iter().map(|(o, r)| (o.to_string(), r.iter().sum())).collect();
    let k_outcome_counts = outcomes.iter().map(|(o, r)| (o.to_string(), r.clone())).collect();
    Ok(BruteCounts { vars: n, model_count, k_counts, outcome_counts, k_outcome_counts, outcomes })
}
