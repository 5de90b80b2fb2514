//! Decomposition trees, stored as a hash-consed arena (structurally equal
//! subtrees share one node).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lineage::{MonoidKind, Outcome, Valuation, VarId};
use crate::num::format_rational;

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Const(bool),
    /// Index into [`DTree::var_table`].
    Var(u32),
    Value(BigRational),
    IndOr(Vec<NodeId>),
    IndAnd(Vec<NodeId>),
    Shannon { cond: NodeId, one: NodeId, zero: NodeId },
    ScalarMul { guards: Vec<NodeId>, inner: NodeId },
}

#[derive(Clone, Debug)]
pub struct Node {
    pub kind: NodeKind,
    /// Sorted variable indices below this node.
    pub vars: Vec<u32>,
    semimodule: bool,
}

impl Node {
    pub fn is_semimodule(&self) -> bool {
        self.semimodule
    }

    pub fn children(&self) -> Vec<NodeId> {
        match &self.kind {
            NodeKind::Const(_) | NodeKind::Var(_) | NodeKind::Value(_) => Vec::new(),
            NodeKind::IndOr(cs) | NodeKind::IndAnd(cs) => cs.clone(),
            NodeKind::Shannon { cond, one, zero } => vec![*cond, *one, *zero],
            NodeKind::ScalarMul { guards, inner } => guards.iter().copied().chain([*inner]).collect(),
        }
    }

    fn kind_name(&self) -> &'static str {
        match self.kind {
            NodeKind::Const(_) => "const",
            NodeKind::Var(_) => "var",
            NodeKind::Value(_) => "value",
            NodeKind::IndOr(_) => "ind_or",
            NodeKind::IndAnd(_) => "ind_and",
            NodeKind::Shannon { .. } => "shannon",
            NodeKind::ScalarMul { .. } => "scalar_mul",
        }
    }
}

/// Builds trees bottom-up, simplifying constants and checking independence.
#[derive(Clone, Debug, Default)]
pub struct DTreeBuilder {
    vars: Vec<VarId>,
    var_index: HashMap<VarId, u32>,
    nodes: Vec<Node>,
    cons: HashMap<NodeKind, NodeId>,
}

impl DTreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder whose variable table is fixed up front (index i is `vars[i]`).
    pub fn with_vars(vars: Vec<VarId>) -> Self {
        let var_index = vars.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
        DTreeBuilder { vars, var_index, ..Self::default() }
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn intern(&mut self, kind: NodeKind, vars: Vec<u32>, semimodule: bool) -> NodeId {
        if let Some(&id) = self.cons.get(&kind) {
            return id;
        }
        let id = self.nodes.len();
        self.cons.insert(kind.clone(), id);
        self.nodes.push(Node { kind, vars, semimodule });
        id
    }

    fn is_const(&self, id: NodeId, b: bool) -> bool {
        self.nodes[id].kind == NodeKind::Const(b)
    }

    pub fn constant(&mut self, b: bool) -> NodeId {
        self.intern(NodeKind::Const(b), Vec::new(), false)
    }

    pub fn var(&mut self, name: &str) -> NodeId {
        let v = VarId::from(name);
        let idx = match self.var_index.get(&v) {
            Some(&i) => i,
            None => {
                let i = self.vars.len() as u32;
                self.vars.push(v.clone());
                self.var_index.insert(v, i);
                i
            }
        };
        self.var_index_leaf(idx)
    }

    pub(crate) fn var_index_leaf(&mut self, idx: u32) -> NodeId {
        self.intern(NodeKind::Var(idx), vec![idx], false)
    }

    pub fn value(&mut self, v: BigRational) -> NodeId {
        self.intern(NodeKind::Value(v), Vec::new(), true)
    }

    pub fn value_int(&mut self, v: i64) -> NodeId {
        self.value(BigRational::from_integer(v.into()))
    }

    fn disjoint_union(&self, children: &[NodeId]) -> Result<Vec<u32>> {
        let mut all: Vec<u32> = children.iter().flat_map(|&c| self.nodes[c].vars.iter().copied()).collect();
        let n = all.len();
        all.sort_unstable();
        all.dedup();
        if all.len() != n {
            return Err(Error::contract("children of an independent gate share variables"));
        }
        Ok(all)
    }

    fn flatten(&self, children: Vec<NodeId>, or: bool) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(children.len());
        for c in children {
            match &self.nodes[c].kind {
                NodeKind::IndOr(cs) if or => out.extend(cs.iter().copied()),
                NodeKind::IndAnd(cs) if !or => out.extend(cs.iter().copied()),
                _ => out.push(c),
            }
        }
        out
    }

    /// Independent OR (⊕), over Boolean children or over semimodule children.
    pub fn or(&mut self, children: Vec<NodeId>) -> Result<NodeId> {
        if children.iter().any(|&c| self.is_const(c, true)) {
            if children.iter().any(|&c| self.nodes[c].semimodule) {
                return Err(Error::contract("constant true cannot join a semimodule sum"));
            }
            return Ok(self.constant(true));
        }
        let kept: Vec<NodeId> = children.into_iter().filter(|&c| !self.is_const(c, false)).collect();
        let mut kept = self.flatten(kept, true);
        match kept.len() {
            0 => return Ok(self.constant(false)),
            1 => return Ok(kept[0]),
            _ => {}
        }
        let semi = kept.iter().filter(|&&c| self.nodes[c].semimodule).count();
        if semi != 0 && semi != kept.len() {
            return Err(Error::contract("⊕ mixes Boolean and semimodule children"));
        }
        let vars = self.disjoint_union(&kept)?;
        kept.sort_unstable();
        Ok(self.intern(NodeKind::IndOr(kept), vars, semi != 0))
    }

    /// Independent AND (⊙) over Boolean children.
    pub fn and(&mut self, children: Vec<NodeId>) -> Result<NodeId> {
        if children.iter().any(|&c| self.nodes[c].semimodule) {
            return Err(Error::contract("⊙ takes Boolean children only"));
        }
        if children.iter().any(|&c| self.is_const(c, false)) {
            return Ok(self.constant(false));
        }
        let kept: Vec<NodeId> = children.into_iter().filter(|&c| !self.is_const(c, true)).collect();
        let mut kept = self.flatten(kept, false);
        match kept.len() {
            0 => return Ok(self.constant(true)),
            1 => return Ok(kept[0]),
            _ => {}
        }
        let vars = self.disjoint_union(&kept)?;
        kept.sort_unstable();
        Ok(self.intern(NodeKind::IndAnd(kept), vars, false))
    }

    /// Shannon gate: `(cond ∧ one) ∨ (¬cond ∧ zero)`.
    pub fn shannon(&mut self, cond: NodeId, one: NodeId, zero: NodeId) -> Result<NodeId> {
        if self.nodes[cond].semimodule {
            return Err(Error::contract("Shannon condition must be Boolean"));
        }
        if one == zero || self.is_const(cond, true) {
            return Ok(one);
        }
        if self.is_const(cond, false) {
            return Ok(zero);
        }
        let (s1, s0) = (self.nodes[one].semimodule, self.nodes[zero].semimodule);
        if s1 != s0 {
            let other = if s1 { zero } else { one };
            if !self.is_const(other, false) {
                return Err(Error::contract("Shannon branches mix Boolean and semimodule trees"));
            }
        }
        let mut branch: Vec<u32> = self.nodes[one].vars.iter().chain(&self.nodes[zero].vars).copied().collect();
        branch.sort_unstable();
        branch.dedup();
        let cv = &self.nodes[cond].vars;
        if cv.iter().any(|v| branch.binary_search(v).is_ok()) {
            return Err(Error::contract("Shannon condition shares variables with a branch"));
        }
        let mut vars = branch;
        vars.extend(cv.iter().copied());
        vars.sort_unstable();
        Ok(self.intern(NodeKind::Shannon { cond, one, zero }, vars, s1 || s0))
    }

    /// Scalar gate `(⋀ guards) ⊗ inner`.
    pub fn scalar(&mut self, guards: Vec<NodeId>, inner: NodeId) -> Result<NodeId> {
        if guards.iter().any(|&g| self.nodes[g].semimodule) {
            return Err(Error::contract("⊗ guards must be Boolean"));
        }
        if !self.nodes[inner].semimodule {
            if self.is_const(inner, false) {
                return Ok(inner);
            }
            return Err(Error::contract("⊗ needs a semimodule operand"));
        }
        if guards.iter().any(|&g| self.is_const(g, false)) {
            return Ok(self.constant(false));
        }
        let guards: Vec<NodeId> = guards.into_iter().filter(|&g| !self.is_const(g, true)).collect();
        let mut guards = self.flatten(guards, false);
        if guards.is_empty() {
            return Ok(inner);
        }
        guards.sort_unstable();
        let mut all = guards.clone();
        all.push(inner);
        let vars = self.disjoint_union(&all)?;
        Ok(self.intern(NodeKind::ScalarMul { guards, inner }, vars, true))
    }

    pub fn finish(self, root: NodeId, monoid: Option<MonoidKind>) -> DTree {
        DTree { nodes: self.nodes, root, vars: self.vars, monoid }
    }
}

/// A decomposition tree (shared subtrees are stored once).
#[derive(Clone, Debug)]
pub struct DTree {
    nodes: Vec<Node>,
    root: NodeId,
    vars: Vec<VarId>,
    monoid: Option<MonoidKind>,
}

/// Size summary of a tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeStats {
    /// Node count of the tree with shared subtrees expanded.
    pub size: u64,
    /// Distinct nodes actually stored.
    pub dag_size: u64,
    pub depth: u64,
    pub var_count: u64,
    pub histogram: BTreeMap<String, u64>,
}

impl DTree {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Names of the variable indices used by [`NodeKind::Var`].
    pub fn var_table(&self) -> &[VarId] {
        &self.vars
    }

    pub fn var_name(&self, idx: u32) -> &VarId {
        &self.vars[idx as usize]
    }

    /// Aggregation monoid of a semimodule tree.
    pub fn monoid(&self) -> Option<MonoidKind> {
        self.monoid
    }

    pub fn is_semimodule(&self) -> bool {
        self.nodes[self.root].semimodule
    }

    /// Variables the tree depends on.
    pub fn vars(&self) -> Vec<VarId> {
        self.nodes[self.root].vars.iter().map(|&i| self.vars[i as usize].clone()).collect()
    }

    /// Node ids reachable from the root, children before parents.
    pub fn topological(&self) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut stack = vec![(self.root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                order.push(id);
                continue;
            }
            if seen[id] {
                continue;
            }
            seen[id] = true;
            stack.push((id, true));
            for c in self.nodes[id].children() {
                if !seen[c] {
                    stack.push((c, false));
                }
            }
        }
        order
    }

    pub fn eval(&self, theta: &Valuation) -> bool {
        let mut memo: Vec<Option<bool>> = vec![None; self.nodes.len()];
        for id in self.topological() {
            let val = match &self.nodes[id].kind {
                NodeKind::Const(b) => *b,
                NodeKind::Var(i) => theta.contains(&self.vars[*i as usize]),
                NodeKind::IndOr(cs) => cs.iter().any(|&c| memo[c] == Some(true)),
                NodeKind::IndAnd(cs) => cs.iter().all(|&c| memo[c] == Some(true)),
                NodeKind::Shannon { cond, one, zero } => {
                    if memo[*cond] == Some(true) {
                        memo[*one] == Some(true)
                    } else {
                        memo[*zero] == Some(true)
                    }
                }
                NodeKind::Value(_) | NodeKind::ScalarMul { .. } => false,
            };
            memo[id] = Some(val);
        }
        memo[self.root].unwrap_or(false)
    }

    /// Outcome of a semimodule tree (Bottom when no term fires).
    pub fn eval_outcome(&self, theta: &Valuation) -> Outcome {
        let min = self.monoid == Some(MonoidKind::Min);
        self.outcome_at(self.root, theta, min)
    }

    fn outcome_at(&self, id: NodeId, theta: &Valuation, min: bool) -> Outcome {
        match &self.nodes[id].kind {
            NodeKind::Const(_) => Outcome::Bottom,
            NodeKind::Var(_) | NodeKind::IndAnd(_) => Outcome::Bottom,
            NodeKind::Value(v) => Outcome::Value(v.clone()),
            NodeKind::IndOr(cs) => {
                let mut best: Option<BigRational> = None;
                for &c in cs {
                    if let Outcome::Value(v) = self.outcome_at(c, theta, min) {
                        best = Some(match best {
                            None => v,
                            Some(b) if min => b.min(v),
                            Some(b) => b.max(v),
                        });
                    }
                }
                best.map_or(Outcome::Bottom, Outcome::Value)
            }
            NodeKind::Shannon { cond, one, zero } => {
                let branch = if self.bool_at(*cond, theta) { *one } else { *zero };
                self.outcome_at(branch, theta, min)
            }
            NodeKind::ScalarMul { guards, inner } => {
                if guards.iter().all(|&g| self.bool_at(g, theta)) {
                    self.outcome_at(*inner, theta, min)
                } else {
                    Outcome::Bottom
                }
            }
        }
    }

    fn bool_at(&self, id: NodeId, theta: &Valuation) -> bool {
        match &self.nodes[id].kind {
            NodeKind::Const(b) => *b,
            NodeKind::Var(i) => theta.contains(&self.vars[*i as usize]),
            NodeKind::IndOr(cs) => cs.iter().any(|&c| self.bool_at(c, theta)),
            NodeKind::IndAnd(cs) => cs.iter().all(|&c| self.bool_at(c, theta)),
            NodeKind::Shannon { cond, one, zero } => {
                if self.bool_at(*cond, theta) {
                    self.bool_at(*one, theta)
                } else {
                    self.bool_at(*zero, theta)
                }
            }
            NodeKind::Value(_) | NodeKind::ScalarMul { .. } => false,
        }
    }

    pub fn stats(&self) -> TreeStats {
        let order = self.topological();
        let mut size = vec![0u64; self.nodes.len()];
        let mut depth = vec![0u64; self.nodes.len()];
        let mut count = vec![0u64; self.nodes.len()];
        for &id in &order {
            let cs = self.nodes[id].children();
            size[id] = cs.iter().fold(1u64, |a, &c| a.saturating_add(size[c]));
            depth[id] = 1 + cs.iter().map(|&c| depth[c]).max().unwrap_or(0);
        }
        // occurrences of each stored node in the expanded tree
        count[self.root] = 1;
        for &id in order.iter().rev() {
            for c in self.nodes[id].children() {
                count[c] = count[c].saturating_add(count[id]);
            }
        }
        let mut histogram = BTreeMap::new();
        for &id in &order {
            *histogram.entry(self.nodes[id].kind_name().to_string()).or_insert(0u64) += count[id];
        }
        TreeStats {
            size: size[self.root],
            dag_size: order.len() as u64,
            depth: depth[self.root],
            var_count: self.nodes[self.root].vars.len() as u64,
            histogram,
        }
    }

    /// Re-check every structural invariant.
    pub fn check_invariants(&self) -> Result<()> {
        for id in self.topological() {
            let n = &self.nodes[id];
            let union = |cs: &[NodeId]| -> (Vec<u32>, usize) {
                let mut all: Vec<u32> = cs.iter().flat_map(|&c| self.nodes[c].vars.iter().copied()).collect();
                let total = all.len();
                all.sort_unstable();
                all.dedup();
                (all, total)
            };
            let ok = match &n.kind {
                NodeKind::Const(_) | NodeKind::Value(_) => n.vars.is_empty(),
                NodeKind::Var(i) => n.vars == [*i],
                NodeKind::IndOr(cs) | NodeKind::IndAnd(cs) => {
                    let (u, total) = union(cs);
                    u.len() == total && u == n.vars
                }
                NodeKind::ScalarMul { guards, inner } => {
                    let mut cs = guards.clone();
                    cs.push(*inner);
                    let (u, total) = union(&cs);
                    u.len() == total && u == n.vars && guards.iter().all(|&g| !self.nodes[g].semimodule)
                }
                NodeKind::Shannon { cond, one, zero } => {
                    let (b, _) = union(&[*one, *zero]);
                    let c = &self.nodes[*cond].vars;
                    let (u, _) = union(&[*cond, *one, *zero]);
                    !c.iter().any(|v| b.binary_search(v).is_ok()) && u == n.vars
                }
            };
            if !ok {
                return Err(Error::invariant(format!("node {id} violates the d-tree independence rules")));
            }
        }
        Ok(())
    }

    fn sexpr(&self, id: NodeId, out: &mut String) {
        let list = |out: &mut String, tag: &str, cs: &[NodeId], me: &Self| {
            let mut parts: Vec<String> = cs
                .iter()
                .map(|&c| {
                    let mut s = String::new();
                    me.sexpr(c, &mut s);
                    s
                })
                .collect();
            parts.sort();
            out.push_str(&format!("{tag}({})", parts.join(",")));
        };
        match &self.nodes[id].kind {
            NodeKind::Const(b) => out.push_str(if *b { "1" } else { "0" }),
            NodeKind::Var(i) => out.push_str(self.vars[*i as usize].as_str()),
            NodeKind::Value(v) => out.push_str(&format_rational(v)),
            NodeKind::IndOr(cs) => list(out, "or", cs, self),
            NodeKind::IndAnd(cs) => list(out, "and", cs, self),
            NodeKind::Shannon { cond, one, zero } => {
                out.push_str("shannon(");
                self.sexpr(*cond, out);
                out.push(',');
                self.sexpr(*one, out);
                out.push(',');
                self.sexpr(*zero, out);
                out.push(')');
            }
            NodeKind::ScalarMul { guards, inner } => {
                let mut parts: Vec<String> = guards
                    .iter()
                    .map(|&g| {
                        let mut s = String::new();
                        self.sexpr(g, &mut s);
                        s
                    })
                    .collect();
                parts.sort();
                let mut s = String::new();
                self.sexpr(*inner, &mut s);
                parts.push(s);
                out.push_str(&format!("mul({})", parts.join(",")));
            }
        }
    }
}

/// Canonical s-expression: children of commutative gates sorted, e.g.
/// `and(or(d1,d2),shannon(or(a1,a3),or(m2,m3),and(a2,m3)))`.
impl fmt::Display for DTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.sexpr(self.root, &mut s);
        f.write_str(&s)
    }
}
