use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{check_universe, shapley_coefficients, shapley_from_delta, zero_map};
use crate::dtree::{DTree, NodeId, NodeKind};
use crate::error::{Error, Result};
use crate::lineage::{MonoidKind, VarId};
use crate::num::{products_excluding_self, CountRing, Poly};

/// Outcome index space of a semimodule tree: 0 is Bottom, then values by
/// increasing rank (value for MAX, negated value for MIN).
pub(crate) struct Outcomes {
    pub values: Vec<BigRational>,
    index: HashMap<BigRational, usize>,
}

impl Outcomes {
    pub fn of(tree: &DTree) -> Outcomes {
        let mut values: Vec<BigRational> = tree
            .nodes()
            .iter()
            .filter_map(|n| match &n.kind {
                NodeKind::Value(v) => Some(v.clone()),
                _ => None,
            })
            .collect();
        values.sort();
        values.dedup();
        if tree.monoid() == Some(MonoidKind::Min) {
            values.reverse();
        }
        let index = values.iter().enumerate().map(|(i, v)| (v.clone(), i + 1)).collect();
        Outcomes { values, index }
    }

    pub fn len(&self) -> usize {
        self.values.len() + 1
    }

    pub fn idx(&self, v: &BigRational) -> usize {
        self.index[v]
    }

    /// Outcome values as integers after scaling by a common denominator.
    pub fn scaled(&self) -> (Vec<BigInt>, BigInt) {
        let l = self.values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let mut out = vec![BigInt::zero()];
        out.extend(self.values.iter().map(|v| (v * BigRational::from_integer(l.clone())).to_integer()));
        (out, l)
    }
}

/// Per-node counts from the bottom-up pass.
pub(crate) struct Forward<R> {
    /// Model count of Boolean nodes.
    pub m: Vec<R>,
    /// Outcome counts of semimodule nodes.
    pub w: Vec<Vec<R>>,
    pub n: Vec<usize>,
}

impl<R: CountRing> Forward<R> {
    fn non_model(&self, id: NodeId) -> R {
        R::total(self.n[id]).sub(&self.m[id])
    }

    /// Outcome counts, reading a Boolean constant-false node as always Bottom.
    pub fn semi(&self, id: NodeId, outcomes: usize) -> Vec<R> {
        if self.w[id].is_empty() {
            let mut e = vec![R::nil(); outcomes];
            e[0] = R::unit();
            e
        } else {
            self.w[id].clone()
        }
    }
}

/// Bottom-up pass. `pin` forces one variable to a constant (its leaf then
/// counts 2 or 0 valuations of itself).
pub(crate) fn forward<R: CountRing>(
    tree: &DTree,
    order: &[NodeId],
    outcomes: &Outcomes,
    pin: Option<(u32, bool)>,
) -> Forward<R> {
    let len = tree.nodes().len();
    let k = outcomes.len();
    let mut f = Forward { m: vec![R::nil(); len], w: vec![Vec::new(); len], n: vec![0; len] };
    for &id in order {
        let node = tree.node(id);
        f.n[id] = node.vars.len();
        match &node.kind {
            NodeKind::Const(b) => f.m[id] = if *b { R::unit() } else { R::nil() },
            NodeKind::Var(i) => {
                f.m[id] = match pin {
                    Some((p, true)) if p == *i => R::total(1),
                    Some((p, false)) if p == *i => R::nil(),
                    _ => R::var(),
                }
            }
            NodeKind::Value(v) => {
                let mut w = vec![R::nil(); k];
                w[outcomes.idx(v)] = R::unit();
                f.w[id] = w;
            }
            NodeKind::IndAnd(cs) => {
                f.m[id] = cs.iter().fold(R::unit(), |acc, &c| acc.mul(&f.m[c]));
            }
            NodeKind::IndOr(cs) if node.is_semimodule() => {
                // cumulative counts multiply across independent children
                let mut cdf = vec![R::unit(); k];
                for &c in cs {
                    let mut run = R::nil();
                    for (o, slot) in cdf.iter_mut().enumerate() {
                        run = run.add(&f.w[c][o]);
                        *slot = slot.mul(&run);
                    }
                }
                let mut w = Vec::with_capacity(k);
                let mut prev = R::nil();
                for c in cdf {
                    w.push(c.sub(&prev));
                    prev = c;
                }
                f.w[id] = w;
            }
            NodeKind::IndOr(cs) => {
                let non = cs.iter().fold(R::unit(), |acc, &c| acc.mul(&f.non_model(c)));
                f.m[id] = R::total(f.n[id]).sub(&non);
            }
            NodeKind::Shannon { cond, one, zero } => {
                let u = f.n[id] - f.n[*cond];
                let e1 = R::total(u - f.n[*one]);
                let e0 = R::total(u - f.n[*zero]);
                let a = f.m[*cond].mul(&e1);
                let b = f.non_model(*cond).mul(&e0);
                if node.is_semimodule() {
                    let (w1, w0) = (f.semi(*one, k), f.semi(*zero, k));
                    f.w[id] = w1.iter().zip(&w0).map(|(x, y)| a.mul(x).add(&b.mul(y))).collect();
                } else {
                    f.m[id] = a.mul(&f.m[*one]).add(&b.mul(&f.m[*zero]));
                }
            }
            NodeKind::ScalarMul { guards, inner } => {
                let mg = guards.iter().fold(R::unit(), |acc, &g| acc.mul(&f.m[g]));
                let ng: usize = guards.iter().map(|&g| f.n[g]).sum();
                let non = R::total(ng).sub(&mg);
                let t_inner = R::total(f.n[*inner]);
                let mut w: Vec<R> = f.w[*inner].iter().map(|x| mg.mul(x)).collect();
                w[0] = non.mul(&t_inner).add(&w[0]);
                f.w[id] = w;
            }
        }
    }
    f
}

/// Top-down pass; returns the per-variable-index leaf sums of the Boolean adjoint.
pub(crate) fn backward<R: CountRing>(
    tree: &DTree,
    order: &[NodeId],
    f: &Forward<R>,
    outcomes: &Outcomes,
    root_bool: R,
    root_semi: Vec<R>,
) -> (Vec<R>, Vec<R>) {
    let len = tree.nodes().len();
    let k = outcomes.len();
    let mut d: Vec<R> = vec![R::nil(); len];
    let mut a: Vec<Vec<R>> = vec![Vec::new(); len];
    let root = tree.root();
    if tree.node(root).is_semimodule() {
        a[root] = root_semi;
    } else {
        d[root] = root_bool;
    }
    let mut grads = vec![R::nil(); tree.var_table().len()];
    let add_vec = |slot: &mut Vec<R>, v: Vec<R>| {
        if slot.is_empty() {
            *slot = v;
        } else {
            for (s, x) in slot.iter_mut().zip(v) {
                *s = s.add(&x);
            }
        }
    };
    for &id in order.iter().rev() {
        let node = tree.node(id);
        if node.is_semimodule() {
            let adj = std::mem::take(&mut a[id]);
            if adj.is_empty() {
                continue;
            }
            match &node.kind {
                NodeKind::Value(_) => {}
                NodeKind::ScalarMul { guards, inner } => {
                    let mg = guards.iter().fold(R::unit(), |acc, &g| acc.mul(&f.m[g]));
                    let wi = &f.w[*inner];
                    let mut dpsi = adj.iter().zip(wi).fold(R::nil(), |acc, (x, y)| acc.add(&x.mul(y)));
                    dpsi = dpsi.sub(&adj[0].mul(&R::total(f.n[*inner])));
                    add_vec(&mut a[*inner], adj.iter().map(|x| x.mul(&mg)).collect());
                    let ms: Vec<R> = guards.iter().map(|&g| f.m[g].clone()).collect();
                    for (g, p) in guards.iter().zip(products_excluding_self(&ms)) {
                        d[*g] = d[*g].add(&dpsi.mul(&p));
                    }
                }
                NodeKind::IndOr(cs) => {
                    let bar: Vec<R> = (0..k)
                        .map(|o| if o + 1 < k { adj[o].sub(&adj[o + 1]) } else { adj[o].clone() })
                        .collect();
                    let cdfs: Vec<Vec<R>> = cs
                        .iter()
                        .map(|&c| {
                            let mut run = R::nil();
                            f.w[c]
                                .iter()
                                .map(|x| {
                                    run = run.add(x);
                                    run.clone()
                                })
                                .collect()
                        })
                        .collect();
                    let mut child_adj: Vec<Vec<R>> = vec![vec![R::nil(); k]; cs.len()];
                    for o in 0..k {
                        let col: Vec<R> = cdfs.iter().map(|c| c[o].clone()).collect();
                        for (i, p) in products_excluding_self(&col).into_iter().enumerate() {
                            child_adj[i][o] = bar[o].mul(&p);
                        }
                    }
                    for (&c, mut b) in cs.iter().zip(child_adj) {
                        // cumulative adjoint back to per-outcome adjoint
                        for o in (0..k.saturating_sub(1)).rev() {
                            b[o] = b[o].add(&b[o + 1]);
                        }
                        add_vec(&mut a[c], b);
                    }
                }
                NodeKind::Shannon { cond, one, zero } => {
                    let u = f.n[id] - f.n[*cond];
                    let e1 = R::total(u - f.n[*one]);
                    let e0 = R::total(u - f.n[*zero]);
                    let s1 = f.m[*cond].mul(&e1);
                    let s0 = f.non_model(*cond).mul(&e0);
                    let (w1, w0) = (f.semi(*one, k), f.semi(*zero, k));
                    let mut dc = R::nil();
                    for o in 0..k {
                        dc = dc.add(&adj[o].mul(&w1[o].mul(&e1).sub(&w0[o].mul(&e0))));
                    }
                    d[*cond] = d[*cond].add(&dc);
                    if tree.node(*one).is_semimodule() {
                        add_vec(&mut a[*one], adj.iter().map(|x| x.mul(&s1)).collect());
                    }
                    if tree.node(*zero).is_semimodule() {
                        add_vec(&mut a[*zero], adj.iter().map(|x| x.mul(&s0)).collect());
                    }
                }
                _ => {}
            }
            continue;
        }
        let adj = std::mem::replace(&mut d[id], R::nil());
        if adj.is_nil() {
            continue;
        }
        match &node.kind {
            NodeKind::Var(i) => grads[*i as usize] = grads[*i as usize].add(&adj),
            NodeKind::IndAnd(cs) => {
                let ms: Vec<R> = cs.iter().map(|&c| f.m[c].clone()).collect();
                for (&c, p) in cs.iter().zip(products_excluding_self(&ms)) {
                    d[c] = d[c].add(&adj.mul(&p));
                }
            }
            NodeKind::IndOr(cs) => {
                let ns: Vec<R> = cs.iter().map(|&c| f.non_model(c)).collect();
                for (&c, p) in cs.iter().zip(products_excluding_self(&ns)) {
                    d[c] = d[c].add(&adj.mul(&p));
                }
            }
            NodeKind::Shannon { cond, one, zero } => {
                let u = f.n[id] - f.n[*cond];
                let e1 = R::total(u - f.n[*one]);
                let e0 = R::total(u - f.n[*zero]);
                d[*one] = d[*one].add(&adj.mul(&f.m[*cond]).mul(&e1));
                d[*zero] = d[*zero].add(&adj.mul(&f.non_model(*cond)).mul(&e0));
                let diff = f.m[*one].mul(&e1).sub(&f.m[*zero].mul(&e0));
                d[*cond] = d[*cond].add(&adj.mul(&diff));
            }
            _ => {}
        }
    }
    (grads, d)
}

fn boolean_grads<R: CountRing>(tree: &DTree, universe: &BTreeSet<VarId>) -> Result<Vec<R>> {
    if tree.is_semimodule() {
        return Err(Error::contract("Boolean attribution on a semimodule tree"));
    }
    check_universe(tree.var_table(), universe)?;
    let order = tree.topological();
    let outcomes = Outcomes::of(tree);
    let f = forward::<R>(tree, &order, &outcomes, None);
    let missing = universe.len() - f.n[tree.root()];
    let (grads, _) = backward(tree, &order, &f, &outcomes, R::total(missing), Vec::new());
    Ok(grads)
}

/// Banzhaf value of every universe variable from one bottom-up and one top-down pass.
pub fn gradient_banzhaf(tree: &DTree, universe: &BTreeSet<VarId>) -> Result<BTreeMap<VarId, BigInt>> {
    let grads = boolean_grads::<BigInt>(tree, universe)?;
    let mut out = zero_map(universe, BigInt::zero());
    for (i, g) in grads.into_iter().enumerate() {
        *out.get_mut(tree.var_name(i as u32)).expect("checked") += g;
    }
    Ok(out)
}

/// Shapley value of every universe variable, using size-resolved counts.
pub fn gradient_shapley(tree: &DTree, universe: &BTreeSet<VarId>) -> Result<BTreeMap<VarId, BigRational>> {
    let grads = boolean_grads::<Poly>(tree, universe)?;
    let mut out = zero_map(universe, BigRational::zero());
    if universe.is_empty() {
        return Ok(out);
    }
    let coeffs = shapley_coefficients(universe.len())?;
    for (i, g) in grads.into_iter().enumerate() {
        *out.get_mut(tree.var_name(i as u32)).expect("checked") += shapley_from_delta(&g, &coeffs);
    }
    Ok(out)
}

/// Probability and scaled gradient of one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeAnnotation {
    /// Probability at the all-½ point.
    pub p: BigRational,
    /// 2^{|universe|−1} times the derivative of the root probability.
    pub g: BigRational,
}

/// Partial derivative of a Boolean node's model count with respect to each
/// child's, in the difference form used by the backward pass.
fn local_partials(tree: &DTree, f: &Forward<BigInt>, id: NodeId) -> Vec<(NodeId, BigInt)> {
    match &tree.node(id).kind {
        NodeKind::IndAnd(cs) => {
            let ms: Vec<BigInt> = cs.iter().map(|&c| f.m[c].clone()).collect();
            cs.iter().copied().zip(products_excluding_self(&ms)).collect()
        }
        NodeKind::IndOr(cs) => {
            let ns: Vec<BigInt> = cs.iter().map(|&c| f.non_model(c)).collect();
            cs.iter().copied().zip(products_excluding_self(&ns)).collect()
        }
        NodeKind::Shannon { cond, one, zero } => {
            let u = f.n[id] - f.n[*cond];
            let e1 = BigInt::one() << (u - f.n[*one]);
            let e0 = BigInt::one() << (u - f.n[*zero]);
            vec![
                (*cond, &f.m[*one] * &e1 - &f.m[*zero] * &e0),
                (*one, &f.m[*cond] * &e1),
                (*zero, f.non_model(*cond) * &e0),
            ]
        }
        _ => Vec::new(),
    }
}

fn annotation(f: &Forward<BigInt>, id: NodeId, adj: &BigInt) -> NodeAnnotation {
    let n = f.n[id];
    let p = BigRational::new(f.m[id].clone(), BigInt::one() << n);
    // g = adjoint · 2^{n−1}
    let g = if n == 0 { BigRational::new(adj.clone(), 2.into()) } else { BigRational::from_integer(adj << (n - 1)) };
    NodeAnnotation { p, g }
}

fn boolean_forward(tree: &DTree, universe: &BTreeSet<VarId>) -> Result<(Vec<NodeId>, Forward<BigInt>, usize)> {
    if tree.is_semimodule() {
        return Err(Error::contract("annotations are defined for Boolean trees"));
    }
    check_universe(tree.var_table(), universe)?;
    let order = tree.topological();
    let outcomes = Outcomes::of(tree);
    let f = forward::<BigInt>(tree, &order, &outcomes, None);
    let missing = universe.len() - f.n[tree.root()];
    Ok((order, f, missing))
}

/// Annotations for every reachable node of a Boolean tree (`None` elsewhere).
/// A shared node carries the sum over its occurrences.
pub fn node_annotations(tree: &DTree, universe: &BTreeSet<VarId>) -> Result<Vec<Option<NodeAnnotation>>> {
    let (order, f, missing) = boolean_forward(tree, universe)?;
    let mut adj = vec![BigInt::zero(); tree.nodes().len()];
    adj[tree.root()] = BigInt::one() << missing;
    for &id in order.iter().rev() {
        let dv = adj[id].clone();
        for (c, p) in local_partials(tree, &f, id) {
            adj[c] += &dv * p;
        }
    }
    let mut out = vec![None; tree.nodes().len()];
    for &id in &order {
        out[id] = Some(annotation(&f, id, &adj[id]));
    }
    Ok(out)
}

/// One node occurrence in the tree with shared subtrees expanded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub node: NodeId,
    /// Index of the parent occurrence.
    pub parent: Option<usize>,
    pub annotation: NodeAnnotation,
}

/// Annotations per occurrence (preorder), or `None` once the expansion
/// exceeds `limit` occurrences.
pub fn occurrence_annotations(
    tree: &DTree,
    universe: &BTreeSet<VarId>,
    limit: usize,
) -> Result<Option<Vec<Occurrence>>> {
    let (_, f, missing) = boolean_forward(tree, universe)?;
    let mut out: Vec<Occurrence> = Vec::new();
    let mut stack = vec![(tree.root(), None, BigInt::one() << missing)];
    while let Some((id, parent, adj)) = stack.pop() {
        if out.len() == limit {
            return Ok(None);
        }
        let me = out.len();
        out.push(Occurrence { node: id, parent, annotation: annotation(&f, id, &adj) });
        for (c, p) in local_partials(tree, &f, id).into_iter().rev() {
            stack.push((c, Some(me), &adj * p));
        }
    }
    Ok(Some(out))
}

/// Reference per-variable method: for every variable, re-evaluate the root
/// count with the variable pinned to 1 and to 0.
pub fn banzhaf_by_substitution(tree: &DTree, universe: &BTreeSet<VarId>) -> Result<BTreeMap<VarId, BigInt>> {
    if tree.is_semimodule() {
        return Err(Error::contract("Boolean attribution on a semimodule tree"));
    }
    check_universe(tree.var_table(), universe)?;
    let order = tree.topological();
    let outcomes = Outcomes::of(tree);
    let missing = universe.len() - tree.node(tree.root()).vars.len();
    let mut out = zero_map(universe, BigInt::zero());
    for &i in &tree.node(tree.root()).vars {
        let hi = forward::<BigInt>(tree, &order, &outcomes, Some((i, true)));
        let lo = forward::<BigInt>(tree, &order, &outcomes, Some((i, false)));
        let diff = (&hi.m[tree.root()] - &lo.m[tree.root()]) << missing;
        *out.get_mut(tree.var_name(i)).expect("checked") = diff / 2;
    }
    Ok(out)
}
