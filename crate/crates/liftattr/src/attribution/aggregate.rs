use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::gradient::{backward, forward, Outcomes};
use super::{check_universe, gradient_banzhaf, gradient_shapley, int, shapley_coefficients, shapley_from_delta, zero_map, Measure};
use crate::compile::{compile_aggregate_with, compile_dnf, CompileOptions};
use crate::dtree::{DTree, NodeId, NodeKind};
use crate::error::{Error, Result};
use crate::lineage::{BnpExpression, MonoidKind, Outcome, VarId};
use crate::num::{CountRing, Poly};

/// SUM/COUNT attribution by linearity: Σ_i measure(φ_i, x)·m_i, every term
/// measured over the expression's full universe.
pub fn linear_aggregate_attribution(
    phi: &BnpExpression,
    measure: Measure,
    opts: &CompileOptions,
) -> Result<BTreeMap<VarId, BigRational>> {
    if phi.monoid().idempotent() {
        return Err(Error::contract("linearity applies to SUM and COUNT only"));
    }
    let universe = phi.universe();
    let mut out = zero_map(universe, BigRational::zero());
    for term in phi.terms() {
        let tree = compile_dnf(&term.formula, opts)?;
        match measure {
            Measure::Banzhaf => {
                for (x, b) in gradient_banzhaf(&tree, universe)? {
                    *out.get_mut(&x).expect("same universe") += int(b) * &term.value;
                }
            }
            Measure::Shapley => {
                for (x, s) in gradient_shapley(&tree, universe)? {
                    *out.get_mut(&x).expect("same universe") += s * &term.value;
                }
            }
        }
    }
    Ok(out)
}

/// Number of valuations of a node's variables per outcome, Bottom included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeDistribution {
    pub var_count: usize,
    pub counts: BTreeMap<Outcome, BigInt>,
    /// Counts split by the number of true variables, when requested.
    pub k_counts: Option<BTreeMap<Outcome, Vec<BigInt>>>,
}

impl OutcomeDistribution {
    pub fn count(&self, o: &Outcome) -> BigInt {
        self.counts.get(o).cloned().unwrap_or_default()
    }

    pub fn count_value(&self, v: i64) -> BigInt {
        self.count(&Outcome::Value(BigRational::from_integer(v.into())))
    }

    pub fn bottom(&self) -> BigInt {
        self.count(&Outcome::Bottom)
    }
}

/// Bottom-up counting pass on the semimodule nodes, combining children by
/// the pairwise rules (sum over value pairs with their combination equal to
/// the target, plus one-sided terms against the other child's Bottom count).
fn count_pass<R: CountRing>(tree: &DTree, outcomes: &Outcomes) -> (Vec<NodeId>, Vec<Vec<R>>, Vec<usize>) {
    let order = tree.topological();
    let k = outcomes.len();
    let f = forward::<R>(tree, &order, outcomes, None);
    let mut w: Vec<Vec<R>> = vec![Vec::new(); tree.nodes().len()];
    let semi = |w: &Vec<Vec<R>>, id: NodeId| -> Vec<R> {
        if w[id].is_empty() {
            let mut e = vec![R::nil(); k];
            e[0] = R::unit();
            e
        } else {
            w[id].clone()
        }
    };
    for &id in &order {
        let node = tree.node(id);
        if !node.is_semimodule() {
            continue;
        }
        w[id] = match &node.kind {
            NodeKind::Value(v) => {
                let mut e = vec![R::nil(); k];
                e[outcomes.idx(v)] = R::unit();
                e
            }
            NodeKind::ScalarMul { guards, inner } => {
                let mg = guards.iter().fold(R::unit(), |acc, &g| acc.mul(&f.m[g]));
                let mut out: Vec<R> = w[*inner].iter().map(|x| mg.mul(x)).collect();
                let sat = out[1..].iter().fold(R::nil(), |acc, x| acc.add(x));
                out[0] = R::total(node.vars.len()).sub(&sat);
                out
            }
            NodeKind::IndOr(cs) => {
                let mut acc = w[cs[0]].clone();
                for &c in &cs[1..] {
                    let b = &w[c];
                    let mut out = vec![R::nil(); k];
                    for p in 1..k {
                        let mut s = acc[p].mul(&b[0]).add(&b[p].mul(&acc[0]));
                        for r in 1..=p {
                            s = s.add(&acc[p].mul(&b[r]));
                        }
                        for r in 1..p {
                            s = s.add(&acc[r].mul(&b[p]));
                        }
                        out[p] = s;
                    }
                    out[0] = acc[0].mul(&b[0]);
                    acc = out;
                }
                acc
            }
            NodeKind::Shannon { cond, one, zero } => {
                let u = node.vars.len() - f.n[*cond];
                let e1 = R::total(u - f.n[*one]);
                let e0 = R::total(u - f.n[*zero]);
                let a = f.m[*cond].mul(&e1);
                let b = R::total(f.n[*cond]).sub(&f.m[*cond]).mul(&e0);
                let (w1, w0) = (semi(&w, *one), semi(&w, *zero));
                w1.iter().zip(&w0).map(|(x, y)| a.mul(x).add(&b.mul(y))).collect()
            }
            _ => unreachable!("semimodule nodes only"),
        };
    }
    let n = tree.nodes().iter().map(|n| n.vars.len()).collect();
    (order, w, n)
}

fn check_semimodule(tree: &DTree) -> Result<bool> {
    if tree.is_semimodule() {
        return Ok(true);
    }
    if tree.node(tree.root()).kind == NodeKind::Const(false) {
        return Ok(false);
    }
    Err(Error::contract("value counts need a semimodule tree"))
}

/// Outcome distribution of every semimodule node (`None` for Boolean nodes).
pub fn value_counts(tree: &DTree, k_resolved: bool) -> Result<Vec<Option<OutcomeDistribution>>> {
    let mut out = vec![None; tree.nodes().len()];
    if !check_semimodule(tree)? {
        let counts = BTreeMap::from([(Outcome::Bottom, BigInt::from(1))]);
        let k_counts = k_resolved.then(|| BTreeMap::from([(Outcome::Bottom, vec![BigInt::from(1)])]));
        out[tree.root()] = Some(OutcomeDistribution { var_count: 0, counts, k_counts });
        return Ok(out);
    }
    let outcomes = Outcomes::of(tree);
    let label = |o: usize| if o == 0 { Outcome::Bottom } else { Outcome::Value(outcomes.values[o - 1].clone()) };
    let (order, w, n) = count_pass::<BigInt>(tree, &outcomes);
    let wk = if k_resolved { Some(count_pass::<Poly>(tree, &outcomes).1) } else { None };
    for &id in &order {
        if w[id].is_empty() {
            continue;
        }
        let counts = w[id].iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(o, c)| (label(o), c.clone())).collect();
        let k_counts = wk.as_ref().map(|wk| {
            wk[id]
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_nil())
                .map(|(o, p)| {
                    let mut v = p.0.clone();
                    v.resize(n[id] + 1, BigInt::zero());
                    (label(o), v)
                })
                .collect()
        });
        out[id] = Some(OutcomeDistribution { var_count: n[id], counts, k_counts });
    }
    Ok(out)
}

/// Root outcome counts extended to `universe_size` variables.
fn root_counts<R: CountRing>(tree: &DTree, universe_size: usize) -> Result<BTreeMap<BigRational, R>> {
    if !check_semimodule(tree)? {
        return Ok(BTreeMap::new());
    }
    let outcomes = Outcomes::of(tree);
    let (_, w, n) = count_pass::<R>(tree, &outcomes);
    let ext = R::total(universe_size - n[tree.root()]);
    Ok(outcomes
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), w[tree.root()][i + 1].mul(&ext)))
        .collect())
}

fn require_idempotent(phi: &BnpExpression) -> Result<()> {
    if phi.monoid().idempotent() {
        Ok(())
    } else {
        Err(Error::contract("MIN/MAX attribution needs an idempotent monoid"))
    }
}

/// Reference MIN/MAX method: recompile Φ[x:=1] and Φ[x:=0] for every x and
/// weigh the outcome-count differences by their values.
pub fn minmax_attribution_counts(
    phi: &BnpExpression,
    measure: Measure,
    opts: &CompileOptions,
) -> Result<BTreeMap<VarId, BigRational>> {
    require_idempotent(phi)?;
    let universe = phi.universe();
    let rest = universe.len().saturating_sub(1);
    let mut out = zero_map(universe, BigRational::zero());
    let coeffs = if universe.is_empty() { Vec::new() } else { shapley_coefficients(universe.len())? };
    for x in universe {
        let hi = compile_aggregate_with(&phi.substitute(x, true), opts)?;
        let lo = compile_aggregate_with(&phi.substitute(x, false), opts)?;
        let total = match measure {
            Measure::Banzhaf => {
                let (a, b) = (root_counts::<BigInt>(&hi, rest)?, root_counts::<BigInt>(&lo, rest)?);
                weigh(&a, &b, |d| int(d.clone()))
            }
            Measure::Shapley => {
                let (a, b) = (root_counts::<Poly>(&hi, rest)?, root_counts::<Poly>(&lo, rest)?);
                weigh(&a, &b, |d| shapley_from_delta(d, &coeffs))
            }
        };
        out.insert(x.clone(), total);
    }
    Ok(out)
}

fn weigh<R: CountRing>(
    hi: &BTreeMap<BigRational, R>,
    lo: &BTreeMap<BigRational, R>,
    measure: impl Fn(&R) -> BigRational,
) -> BigRational {
    let keys: BTreeSet<&BigRational> = hi.keys().chain(lo.keys()).collect();
    let mut acc = BigRational::zero();
    for v in keys {
        let a = hi.get(v).cloned().unwrap_or_else(R::nil);
        let b = lo.get(v).cloned().unwrap_or_else(R::nil);
        acc += measure(&a.sub(&b)) * v;
    }
    acc
}

/// All-variables MIN/MAX attribution: one bottom-up pass over outcome counts
/// and one top-down pass carrying their adjoints.
pub fn minmax_gradient(
    tree: &DTree,
    universe: &BTreeSet<VarId>,
    measure: Measure,
) -> Result<BTreeMap<VarId, BigRational>> {
    check_universe(tree.var_table(), universe)?;
    let mut out = zero_map(universe, BigRational::zero());
    if !check_semimodule(tree)? {
        return Ok(out);
    }
    if !matches!(tree.monoid(), Some(MonoidKind::Max | MonoidKind::Min)) {
        return Err(Error::contract("semimodule tree without a MIN/MAX monoid"));
    }
    let outcomes = Outcomes::of(tree);
    let (scaled, l) = outcomes.scaled();
    let order = tree.topological();
    let missing = universe.len() - tree.node(tree.root()).vars.len();
    let denom = int(l);
    match measure {
        Measure::Banzhaf => {
            let f = forward::<BigInt>(tree, &order, &outcomes, None);
            let ext = BigInt::total(missing);
            let root: Vec<BigInt> = scaled.iter().map(|v| v * &ext).collect();
            let (grads, _) = backward(tree, &order, &f, &outcomes, BigInt::zero(), root);
            for (i, g) in grads.into_iter().enumerate() {
                *out.get_mut(tree.var_name(i as u32)).expect("checked") += int(g) / &denom;
            }
        }
        Measure::Shapley => {
            let coeffs = shapley_coefficients(universe.len())?;
            let f = forward::<Poly>(tree, &order, &outcomes, None);
            let ext = Poly::total(missing);
            let root: Vec<Poly> = scaled.iter().map(|v| ext.scale(v)).collect();
            let (grads, _) = backward(tree, &order, &f, &outcomes, Poly::nil(), root);
            for (i, g) in grads.into_iter().enumerate() {
                *out.get_mut(tree.var_name(i as u32)).expect("checked") += shapley_from_delta(&g, &coeffs) / &denom;
            }
        }
    }
    Ok(out)
}
