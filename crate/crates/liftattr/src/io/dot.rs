//! Graphviz export of d-trees.
//!
//! Small trees are drawn with shared subtrees expanded so every occurrence
//! gets its own annotation; past [`EXPAND_LIMIT`] occurrences the stored DAG
//! is drawn instead.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::attribution::{node_annotations, occurrence_annotations, value_counts, NodeAnnotation, OutcomeDistribution};
use crate::dtree::{DTree, NodeId, NodeKind};
use crate::error::Result;
use crate::lineage::VarId;
use crate::num::format_rational;

pub const EXPAND_LIMIT: usize = 5000;

fn gate_label(tree: &DTree, id: NodeId) -> String {
    match &tree.node(id).kind {
        NodeKind::Const(b) => if *b { "1" } else { "0" }.to_string(),
        NodeKind::Var(i) => tree.var_name(*i).to_string(),
        NodeKind::Value(v) => format_rational(v),
        NodeKind::IndOr(_) => "⊕".to_string(),
        NodeKind::IndAnd(_) => "⊙".to_string(),
        NodeKind::Shannon { cond, .. } => format!("⊔_{{{}}}", formula_text(tree, *cond)),
        NodeKind::ScalarMul { .. } => "⊗".to_string(),
    }
}

/// Plain-text formula of a Boolean subtree, used for Shannon conditions.
fn formula_text(tree: &DTree, id: NodeId) -> String {
    let join = |cs: &[NodeId], sep: &str| {
        let parts: Vec<String> = cs
            .iter()
            .map(|&c| {
                let t = formula_text(tree, c);
                if tree.node(c).children().is_empty() { t } else { format!("({t})") }
            })
            .collect();
        parts.join(sep)
    };
    match &tree.node(id).kind {
        NodeKind::IndOr(cs) => join(cs, " ∨ "),
        NodeKind::IndAnd(cs) => join(cs, " ∧ "),
        NodeKind::Shannon { cond, one, zero } => format!(
            "{} ? {} : {}",
            formula_text(tree, *cond),
            formula_text(tree, *one),
            formula_text(tree, *zero)
        ),
        _ => gate_label(tree, id),
    }
}

fn annotation_text(a: &NodeAnnotation) -> String {
    format!("\\np={}\\ng={}", format_rational(&a.p), format_rational(&a.g))
}

fn distribution_text(d: &OutcomeDistribution) -> String {
    let parts: Vec<String> = d.counts.iter().map(|(o, c)| format!("{c}⊗{o}")).collect();
    format!("\\n({})", parts.join(", "))
}

fn escape(s: &str) -> String {
    s.replace('"', "\\\"")
}

/// Preorder expansion: (node, parent occurrence).
fn expand(tree: &DTree, limit: usize) -> Option<Vec<(NodeId, Option<usize>)>> {
    let mut out = Vec::new();
    let mut stack = vec![(tree.root(), None)];
    while let Some((id, parent)) = stack.pop() {
        if out.len() == limit {
            return None;
        }
        let me = out.len();
        out.push((id, parent));
        for c in tree.node(id).children().into_iter().rev() {
            stack.push((c, Some(me)));
        }
    }
    Some(out)
}

fn edge_label(tree: &DTree, parent: NodeId, position: usize) -> &'static str {
    match tree.node(parent).kind {
        NodeKind::Shannon { .. } => ["cond", "1", "0"][position.min(2)],
        _ => "",
    }
}

/// DOT text. With a universe, Boolean trees carry p and g annotations and
/// semimodule trees their outcome counts.
pub fn to_dot(tree: &DTree, universe: Option<&BTreeSet<VarId>>) -> Result<String> {
    let semi = if universe.is_some() && tree.is_semimodule() { Some(value_counts(tree, false)?) } else { None };
    let boolean = universe.filter(|_| !tree.is_semimodule());
    let mut out = String::from("digraph dtree {\n  node [shape=box, fontname=\"Helvetica\"];\n");
    let extra = |id: NodeId, ann: Option<&NodeAnnotation>| -> String {
        let mut s = String::new();
        if let Some(a) = ann {
            s.push_str(&annotation_text(a));
        }
        if let Some(Some(d)) = semi.as_ref().map(|v| &v[id]) {
            s.push_str(&distribution_text(d));
        }
        s
    };
    if let Some(occ) = expand(tree, EXPAND_LIMIT) {
        let anns = match boolean {
            Some(u) => occurrence_annotations(tree, u, EXPAND_LIMIT)?,
            None => None,
        };
        let mut seen_children = vec![0usize; occ.len()];
        for (i, &(id, parent)) in occ.iter().enumerate() {
            let ann = anns.as_ref().map(|a| &a[i].annotation);
            let label = escape(&(gate_label(tree, id) + &extra(id, ann)));
            writeln!(out, "  n{i} [label=\"{label}\"];").unwrap();
            if let Some(p) = parent {
                let l = edge_label(tree, occ[p].0, seen_children[p]);
                seen_children[p] += 1;
                if l.is_empty() {
                    writeln!(out, "  n{p} -> n{i};").unwrap();
                } else {
                    writeln!(out, "  n{p} -> n{i} [label=\"{l}\"];").unwrap();
                }
            }
        }
    } else {
        let anns = match boolean {
            Some(u) => Some(node_annotations(tree, u)?),
            None => None,
        };
        for id in tree.topological() {
            let ann = anns.as_ref().and_then(|a| a[id].as_ref());
            let label = escape(&(gate_label(tree, id) + &extra(id, ann)));
            writeln!(out, "  n{id} [label=\"{label}\"];").unwrap();
            for (pos, c) in tree.node(id).children().into_iter().enumerate() {
                let l = edge_label(tree, id, pos);
                if l.is_empty() {
                    writeln!(out, "  n{id} -> n{c};").unwrap();
                } else {
                    writeln!(out, "  n{id} -> n{c} [label=\"{l}\"];").unwrap();
                }
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

pub fn dot_export(tree: &DTree, universe: Option<&BTreeSet<VarId>>, path: &Path) -> Result<()> {
    std::fs::write(path, to_dot(tree, universe)?)?;
    Ok(())
}
