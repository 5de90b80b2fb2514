//! Lifting: rewrite a DNF into a saturated lifted formula by repeatedly
//! merging cofactor-equivalent variables into a fresh OR-variable and
//! interchangeable variables into a fresh AND-variable.
//!
//! Fresh names join the sorted member names with `|` (OR) or `&` (AND);
//! both characters are rejected in input names.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lineage::{BnpExpression, Clause, DnfFormula, MonoidKind, Outcome, Valuation, VarId};

/// Separator used in the names of OR-lifted variables.
pub const OR_SEPARATOR: char = '|';
/// Separator used in the names of AND-lifted variables.
pub const AND_SEPARATOR: char = '&';

/// A read-once formula over original variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ReadOnce {
    Var(VarId),
    Or(Vec<ReadOnce>),
    And(Vec<ReadOnce>),
}

impl ReadOnce {
    pub fn eval(&self, theta: &Valuation) -> bool {
        match self {
            ReadOnce::Var(v) => theta.contains(v),
            ReadOnce::Or(cs) => cs.iter().any(|c| c.eval(theta)),
            ReadOnce::And(cs) => cs.iter().all(|c| c.eval(theta)),
        }
    }

    /// Leaf occurrences, in tree order (duplicates kept).
    pub fn leaves(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<VarId>) {
        match self {
            ReadOnce::Var(v) => out.push(v.clone()),
            ReadOnce::Or(cs) | ReadOnce::And(cs) => cs.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.leaves().into_iter().collect()
    }

    /// True iff every variable occurs exactly once.
    pub fn is_read_once(&self) -> bool {
        let leaves = self.leaves();
        leaves.len() == leaves.iter().collect::<BTreeSet<_>>().len()
    }
}

impl fmt::Display for ReadOnce {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReadOnce::Var(v) => write!(f, "{v}"),
            ReadOnce::Or(cs) | ReadOnce::And(cs) => {
                let op = if matches!(self, ReadOnce::Or(_)) { " ∨ " } else { " ∧ " };
                let parts: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
                write!(f, "({})", parts.join(op))
            }
        }
    }
}

/// What a lifted variable stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binding {
    Formula(ReadOnce),
    /// `guard ⊗ value`; a `None` guard is trivially true.
    ValueTerm { guard: Option<ReadOnce>, value: BigRational },
}

impl Binding {
    pub fn original_vars(&self) -> BTreeSet<VarId> {
        match self {
            Binding::Formula(f) => f.vars(),
            Binding::ValueTerm { guard, .. } => guard.as_ref().map(ReadOnce::vars).unwrap_or_default(),
        }
    }

    pub fn is_read_once(&self) -> bool {
        match self {
            Binding::Formula(f) => f.is_read_once(),
            Binding::ValueTerm { guard, .. } => guard.as_ref().is_none_or(ReadOnce::is_read_once),
        }
    }

    pub fn is_value_term(&self) -> bool {
        matches!(self, Binding::ValueTerm { .. })
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Formula(r) => write!(f, "{r}"),
            Binding::ValueTerm { guard: Some(g), value } => {
                write!(f, "{g} ⊗ {}", crate::num::format_rational(value))
            }
            Binding::ValueTerm { guard: None, value } => f.write_str(&crate::num::format_rational(value)),
        }
    }
}

// ---------------------------------------------------------------------------
// Symbol table and clause-set operations shared with the compiler.

pub(crate) type Sym = u32;
pub(crate) type Clauses = Vec<Vec<Sym>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Op {
    Or,
    And,
}

#[derive(Clone, Debug)]
pub(crate) enum SymKind {
    /// Original variable with the given index into `originals`.
    Original(u32),
    /// Bare aggregate value, trivially guarded.
    Value,
    Lifted(Op, Vec<Sym>),
}

#[derive(Clone, Debug)]
pub(crate) struct Entry {
    pub name: Arc<str>,
    pub kind: SymKind,
    /// Carried value for value-term symbols.
    pub value: Option<BigRational>,
}

#[derive(Clone, Debug)]
pub(crate) struct SymbolTable {
    pub originals: Vec<VarId>,
    pub entries: Vec<Entry>,
    intern: HashMap<(Op, Vec<Sym>), Sym>,
    by_name: HashMap<Arc<str>, Sym>,
}

impl SymbolTable {
    /// One symbol per original variable; symbol i is original i.
    pub fn new(originals: Vec<VarId>) -> SymbolTable {
        let mut t = SymbolTable { originals: Vec::new(), entries: Vec::new(), intern: HashMap::new(), by_name: HashMap::new() };
        for (i, v) in originals.iter().enumerate() {
            let name: Arc<str> = Arc::from(v.as_str());
            t.by_name.insert(name.clone(), i as Sym);
            t.entries.push(Entry { name, kind: SymKind::Original(i as u32), value: None });
        }
        t.originals = originals;
        t
    }

    pub fn add_value(&mut self, value: BigRational) -> Sym {
        let name: Arc<str> = Arc::from(format!("@{}", crate::num::format_rational(&value)).as_str());
        if let Some(&s) = self.by_name.get(&name) {
            return s;
        }
        let s = self.entries.len() as Sym;
        self.by_name.insert(name.clone(), s);
        self.entries.push(Entry { name, kind: SymKind::Value, value: Some(value) });
        s
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.entries[s as usize].name
    }

    pub fn value(&self, s: Sym) -> Option<&BigRational> {
        self.entries[s as usize].value.as_ref()
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.by_name.get(name).copied()
    }

    fn top_op(&self, s: Sym) -> Option<Op> {
        match &self.entries[s as usize].kind {
            SymKind::Lifted(op, _) => Some(*op),
            _ => None,
        }
    }

    /// Fresh (or previously interned) symbol for `op` over `members`.
    pub fn fresh(&mut self, op: Op, members: &[Sym]) -> Sym {
        let mut key: Vec<Sym> = members.to_vec();
        key.sort_unstable();
        if let Some(&s) = self.intern.get(&(op, key.clone())) {
            return s;
        }
        let (sep, other) = match op {
            Op::Or => (OR_SEPARATOR, Op::And),
            Op::And => (AND_SEPARATOR, Op::Or),
        };
        let mut parts: Vec<String> = key
            .iter()
            .map(|&m| {
                let n = self.name(m);
                if self.top_op(m) == Some(other) {
                    format!("({n})")
                } else {
                    n.to_string()
                }
            })
            .collect();
        parts.sort();
        let name: Arc<str> = Arc::from(parts.join(&sep.to_string()).as_str());
        let value = match op {
            Op::Or => self.value(key[0]).cloned(),
            Op::And => key.iter().find_map(|&m| self.value(m).cloned()),
        };
        let s = self.entries.len() as Sym;
        self.entries.push(Entry { name: name.clone(), kind: SymKind::Lifted(op, key.clone()), value });
        self.intern.insert((op, key), s);
        self.by_name.entry(name).or_insert(s);
        s
    }

    /// Boolean read-once formula a symbol stands for (guard part only for value terms).
    pub fn guard(&self, s: Sym) -> Option<ReadOnce> {
        match &self.entries[s as usize].kind {
            SymKind::Original(i) => Some(ReadOnce::Var(self.originals[*i as usize].clone())),
            SymKind::Value => None,
            SymKind::Lifted(op, members) => {
                let parts: Vec<ReadOnce> = members.iter().filter_map(|&m| self.guard(m)).collect();
                if *op == Op::Or && self.value(s).is_some() && members.iter().any(|&m| self.guard(m).is_none()) {
                    return None;
                }
                let mut flat = Vec::new();
                for p in parts {
                    match (op, p) {
                        (Op::Or, ReadOnce::Or(cs)) | (Op::And, ReadOnce::And(cs)) => flat.extend(cs),
                        (_, p) => flat.push(p),
                    }
                }
                match flat.len() {
                    0 => None,
                    1 => flat.pop(),
                    _ => Some(match op {
                        Op::Or => ReadOnce::Or(flat),
                        Op::And => ReadOnce::And(flat),
                    }),
                }
            }
        }
    }

    pub fn binding(&self, s: Sym) -> Binding {
        match self.value(s) {
            Some(v) => Binding::ValueTerm { guard: self.guard(s), value: v.clone() },
            None => Binding::Formula(self.guard(s).expect("boolean symbols have a formula")),
        }
    }
}

/// Sort, deduplicate and drop subsumed clauses.
pub(crate) fn canonicalize(mut clauses: Clauses) -> Clauses {
    for c in clauses.iter_mut() {
        c.sort_unstable();
        c.dedup();
    }
    clauses.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    clauses.dedup();
    if clauses.first().is_some_and(|c| c.is_empty()) {
        return vec![Vec::new()];
    }
    // kept clauses indexed by their smallest symbol
    let mut by_first: HashMap<Sym, Vec<usize>> = HashMap::new();
    let mut kept: Clauses = Vec::with_capacity(clauses.len());
    for c in clauses {
        let subsumed = c.iter().any(|v| {
            by_first.get(v).is_some_and(|ids| ids.iter().any(|&i| is_subset(&kept[i], &c)))
        });
        if !subsumed {
            by_first.entry(c[0]).or_default().push(kept.len());
            kept.push(c);
        }
    }
    kept.sort_unstable();
    kept
}

fn is_subset(small: &[Sym], big: &[Sym]) -> bool {
    if small.len() > big.len() {
        return false;
    }
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

pub(crate) fn occurring(clauses: &Clauses) -> Vec<Sym> {
    let mut v: Vec<Sym> = clauses.iter().flatten().copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn group_classes<K: std::hash::Hash + Eq>(keys: Vec<(Sym, K)>) -> Vec<Vec<Sym>> {
    let mut groups: HashMap<K, Vec<Sym>> = HashMap::new();
    for (s, k) in keys {
        groups.entry(k).or_default().push(s);
    }
    let mut classes: Vec<Vec<Sym>> = groups.into_values().collect();
    for c in classes.iter_mut() {
        c.sort_unstable();
    }
    classes.sort_unstable();
    classes
}

/// Cofactors {C∖{x} : x ∈ C}, each sorted.
fn cofactors(clauses: &Clauses) -> HashMap<Sym, Vec<Vec<Sym>>> {
    let mut cof: HashMap<Sym, Vec<Vec<Sym>>> = HashMap::new();
    for c in clauses {
        for (i, &x) in c.iter().enumerate() {
            let rest: Vec<Sym> = c[..i].iter().chain(&c[i + 1..]).copied().collect();
            cof.entry(x).or_default().push(rest);
        }
    }
    for v in cof.values_mut() {
        v.sort_unstable();
    }
    cof
}

/// Maximal cofactor-equivalent classes; value terms only group with equal values.
pub(crate) fn cofactor_classes(table: &SymbolTable, clauses: &Clauses) -> Vec<Vec<Sym>> {
    let cof = cofactors(clauses);
    let keys = cof.into_iter().map(|(s, c)| (s, (c, table.value(s).cloned()))).collect();
    group_classes(keys)
}

/// Maximal classes of variables with identical clause membership.
pub(crate) fn interchangeable_classes(clauses: &Clauses) -> Vec<Vec<Sym>> {
    let mut membership: HashMap<Sym, Vec<usize>> = HashMap::new();
    for (i, c) in clauses.iter().enumerate() {
        for &x in c {
            membership.entry(x).or_default().push(i);
        }
    }
    group_classes(membership.into_iter().collect())
}

fn is_cofactor_class(table: &SymbolTable, clauses: &Clauses, class: &[Sym]) -> bool {
    if class.len() < 2 {
        return false;
    }
    let v0 = table.value(class[0]);
    if class.iter().any(|&s| table.value(s) != v0) {
        return false;
    }
    let cof = cofactors(clauses);
    let first = match cof.get(&class[0]) {
        Some(c) => c,
        None => return false,
    };
    class[1..].iter().all(|s| cof.get(s) == Some(first))
}

fn is_interchangeable_class(clauses: &Clauses, class: &[Sym]) -> bool {
    if class.len() < 2 {
        return false;
    }
    let mut seen = false;
    for c in clauses {
        let hits = class.iter().filter(|s| c.binary_search(s).is_ok()).count();
        if hits != 0 && hits != class.len() {
            return false;
        }
        seen |= hits != 0;
    }
    seen
}

/// lift-or on a verified class; returns the rewritten clauses and the fresh symbol.
pub(crate) fn apply_lift_or(table: &mut SymbolTable, clauses: &Clauses, class: &[Sym]) -> Option<(Clauses, Sym)> {
    if !is_cofactor_class(table, clauses, class) {
        return None;
    }
    let y = table.fresh(Op::Or, class);
    let members: BTreeSet<Sym> = class.iter().copied().collect();
    let mut out: Clauses = Vec::with_capacity(clauses.len());
    for c in clauses {
        let hit: Vec<Sym> = c.iter().copied().filter(|s| members.contains(s)).collect();
        match hit.as_slice() {
            [] => out.push(c.clone()),
            [m] if *m == class[0] => {
                let mut n: Vec<Sym> = c.iter().copied().filter(|s| s != m).collect();
                n.push(y);
                out.push(n);
            }
            _ => {}
        }
    }
    Some((canonicalize(out), y))
}

/// lift-and on a verified class.
pub(crate) fn apply_lift_and(table: &mut SymbolTable, clauses: &Clauses, class: &[Sym]) -> Option<(Clauses, Sym)> {
    if !is_interchangeable_class(clauses, class) {
        return None;
    }
    if class.iter().filter(|&&s| table.value(s).is_some()).count() > 1 {
        return None;
    }
    let y = table.fresh(Op::And, class);
    let out = clauses
        .iter()
        .map(|c| {
            if c.binary_search(&class[0]).is_ok() {
                let mut n: Vec<Sym> = c.iter().copied().filter(|s| !class.contains(s)).collect();
                n.push(y);
                n
            } else {
                c.clone()
            }
        })
        .collect();
    Some((canonicalize(out), y))
}

/// Apply lift-or and lift-and rewrites until a full pass changes nothing.
pub(crate) fn saturate(table: &mut SymbolTable, mut clauses: Clauses) -> Clauses {
    loop {
        let mut changed = false;
        for class in cofactor_classes(table, &clauses).into_iter().filter(|c| c.len() > 1) {
            if let Some((next, _)) = apply_lift_or(table, &clauses, &class) {
                clauses = next;
                changed = true;
            }
        }
        for class in interchangeable_classes(&clauses).into_iter().filter(|c| c.len() > 1) {
            if let Some((next, _)) = apply_lift_and(table, &clauses, &class) {
                clauses = next;
                changed = true;
            }
        }
        if !changed {
            return clauses;
        }
    }
}

pub(crate) fn is_saturated(table: &SymbolTable, clauses: &Clauses) -> bool {
    let cof_ok = cofactor_classes(table, clauses).iter().all(|c| c.len() == 1);
    let inter_ok = interchangeable_classes(clauses)
        .iter()
        .all(|c| c.len() == 1 || c.iter().filter(|&&s| table.value(s).is_some()).count() > 1);
    cof_ok && inter_ok
}

// ---------------------------------------------------------------------------
// Public lifted formulas.

/// A DNF over lifted variables together with the binding of every lifted variable.
#[derive(Clone, Debug)]
pub struct LiftedFormula {
    pub(crate) table: SymbolTable,
    pub(crate) clauses: Clauses,
    pub(crate) universe: BTreeSet<VarId>,
    pub(crate) monoid: Option<MonoidKind>,
}

impl LiftedFormula {
    /// The identity lifting of a formula: every variable bound to itself.
    pub fn identity(phi: &DnfFormula) -> LiftedFormula {
        let (table, clauses) = encode_dnf(phi);
        LiftedFormula { table, clauses, universe: phi.universe().clone(), monoid: None }
    }

    /// The formula over lifted variable names.
    pub fn formula(&self) -> DnfFormula {
        let clauses: Vec<Clause> = self
            .clauses
            .iter()
            .map(|c| Clause::new(c.iter().map(|&s| VarId::from(self.table.name(s)))))
            .collect();
        DnfFormula::new(clauses, None).expect("universe derived from clauses")
    }

    /// Binding of every variable that occurs in the formula.
    pub fn bindings(&self) -> BTreeMap<VarId, Binding> {
        occurring(&self.clauses)
            .into_iter()
            .map(|s| (VarId::from(self.table.name(s)), self.table.binding(s)))
            .collect()
    }

    pub fn binding(&self, name: &str) -> Option<Binding> {
        let s = self.table.lookup(name)?;
        occurring(&self.clauses).contains(&s).then(|| self.table.binding(s))
    }

    /// The original universe the bindings range over.
    pub fn universe(&self) -> &BTreeSet<VarId> {
        &self.universe
    }

    pub fn monoid(&self) -> Option<MonoidKind> {
        self.monoid
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    /// Evaluate the inlined formula under a valuation of the original variables.
    pub fn eval_inline(&self, theta: &Valuation) -> bool {
        self.clauses.iter().any(|c| c.iter().all(|&s| self.sym_true(s, theta)))
    }

    /// Outcome of the inlined aggregate formula (each clause yields its value term's value).
    pub fn eval_inline_outcome(&self, theta: &Valuation) -> Outcome {
        let monoid = self.monoid.unwrap_or(MonoidKind::Max);
        let mut best: Option<BigRational> = None;
        for c in &self.clauses {
            if !c.iter().all(|&s| self.sym_true(s, theta)) {
                continue;
            }
            let Some(v) = c.iter().find_map(|&s| self.table.value(s)) else { continue };
            best = Some(match best {
                None => v.clone(),
                Some(b) if monoid == MonoidKind::Min => b.min(v.clone()),
                Some(b) => b.max(v.clone()),
            });
        }
        best.map_or(Outcome::Bottom, Outcome::Value)
    }

    fn sym_true(&self, s: Sym, theta: &Valuation) -> bool {
        self.table.guard(s).is_none_or(|g| g.eval(theta))
    }

    /// Every clause has exactly one value-term variable.
    pub fn is_valid_aggregate(&self) -> bool {
        self.clauses.iter().all(|c| c.iter().filter(|&&s| self.table.value(s).is_some()).count() == 1)
    }

    /// No cofactor-equivalent or interchangeable class of size > 1 remains.
    pub fn is_saturated(&self) -> bool {
        is_saturated(&self.table, &self.clauses)
    }

    /// Bindings of distinct variables mention disjoint original variables.
    pub fn bindings_disjoint(&self) -> bool {
        let mut seen = BTreeSet::new();
        for b in self.bindings().values() {
            for v in b.original_vars() {
                if !seen.insert(v) {
                    return false;
                }
            }
        }
        true
    }

    pub fn bindings_read_once(&self) -> bool {
        self.bindings().values().all(Binding::is_read_once)
    }

    fn syms_of(&self, vars: &BTreeSet<VarId>) -> Result<Vec<Sym>> {
        let present = occurring(&self.clauses);
        let mut out = Vec::new();
        for v in vars {
            match self.table.lookup(v.as_str()) {
                Some(s) if present.contains(&s) => out.push(s),
                _ => return Err(Error::contract(format!("{v} is not a variable of the lifted formula"))),
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Replace a cofactor-equivalent class by one fresh OR-variable.
    pub fn lift_or(&self, vars: &BTreeSet<VarId>) -> Result<LiftedFormula> {
        let class = self.syms_of(vars)?;
        if class.len() < 2 {
            return Err(Error::contract("lift-or needs at least two variables"));
        }
        let mut table = self.table.clone();
        let (clauses, _) = apply_lift_or(&mut table, &self.clauses, &class)
            .ok_or_else(|| Error::contract("variables are not cofactor-equivalent"))?;
        Ok(LiftedFormula { table, clauses, universe: self.universe.clone(), monoid: self.monoid })
    }

    /// Replace an interchangeable class by one fresh AND-variable.
    pub fn lift_and(&self, vars: &BTreeSet<VarId>) -> Result<LiftedFormula> {
        let class = self.syms_of(vars)?;
        if class.len() < 2 {
            return Err(Error::contract("lift-and needs at least two variables"));
        }
        let mut table = self.table.clone();
        let (clauses, _) = apply_lift_and(&mut table, &self.clauses, &class)
            .ok_or_else(|| Error::contract("variables are not interchangeable"))?;
        Ok(LiftedFormula { table, clauses, universe: self.universe.clone(), monoid: self.monoid })
    }

    /// Lift until saturated.
    pub fn saturate(&self) -> LiftedFormula {
        let mut table = self.table.clone();
        let clauses = saturate(&mut table, self.clauses.clone());
        LiftedFormula { table, clauses, universe: self.universe.clone(), monoid: self.monoid }
    }
}

pub(crate) fn encode_dnf(phi: &DnfFormula) -> (SymbolTable, Clauses) {
    let originals: Vec<VarId> = phi.universe().iter().cloned().collect();
    let index: HashMap<&VarId, Sym> = originals.iter().enumerate().map(|(i, v)| (v, i as Sym)).collect();
    let clauses = phi.clauses().iter().map(|c| c.vars().iter().map(|v| index[v]).collect()).collect();
    let table = SymbolTable::new(originals);
    (table, canonicalize(clauses))
}

/// Terms conjoined with one value variable per distinct value (not yet lifted).
pub(crate) fn encode_bnp(phi: &BnpExpression) -> Result<(SymbolTable, Clauses)> {
    if !phi.monoid().idempotent() {
        return Err(Error::contract("semimodule lifting needs an idempotent monoid (MAX or MIN)"));
    }
    let originals: Vec<VarId> = phi.universe().iter().cloned().collect();
    let index: HashMap<&VarId, Sym> = originals.iter().enumerate().map(|(i, v)| (v, i as Sym)).collect();
    let mut table = SymbolTable::new(originals.clone());
    let mut clauses = Vec::new();
    for t in phi.terms() {
        let w = table.add_value(t.value.clone());
        for c in t.formula.clauses() {
            let mut cl: Vec<Sym> = c.vars().iter().map(|v| index[v]).collect();
            cl.push(w);
            clauses.push(cl);
        }
    }
    Ok((table, canonicalize(clauses)))
}

/// Maximal cofactor-equivalent classes of a canonical formula (singletons included).
pub fn cofactor_partition(phi: &DnfFormula) -> Vec<BTreeSet<VarId>> {
    let (table, clauses) = encode_dnf(phi);
    name_classes(&table, cofactor_classes(&table, &clauses))
}

/// Maximal interchangeable classes of a canonical formula (singletons included).
pub fn interchangeable_partition(phi: &DnfFormula) -> Vec<BTreeSet<VarId>> {
    let (table, clauses) = encode_dnf(phi);
    name_classes(&table, interchangeable_classes(&clauses))
}

fn name_classes(table: &SymbolTable, classes: Vec<Vec<Sym>>) -> Vec<BTreeSet<VarId>> {
    let mut out: Vec<BTreeSet<VarId>> = classes
        .into_iter()
        .map(|c| c.into_iter().map(|s| VarId::from(table.name(s))).collect())
        .collect();
    out.sort();
    out
}

/// Saturated lifting of a DNF.
pub fn lift(phi: &DnfFormula) -> LiftedFormula {
    LiftedFormula::identity(phi).saturate()
}

/// Valid lifted form of a MAX/MIN expression, lifted until saturated.
pub fn bnp_to_lifted(phi: &BnpExpression) -> Result<LiftedFormula> {
    Ok(bnp_unlifted(phi)?.saturate())
}

/// The valid lifted form before any lifting: every clause conjoined with its value variable.
pub fn bnp_unlifted(phi: &BnpExpression) -> Result<LiftedFormula> {
    let (table, clauses) = encode_bnp(phi)?;
    Ok(LiftedFormula { table, clauses, universe: phi.universe().clone(), monoid: Some(phi.monoid()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(names: &[&str]) -> BTreeSet<VarId> {
        names.iter().map(|&n| VarId::from(n)).collect()
    }

    #[test]
    fn canonicalize_absorbs() {
        let c = canonicalize(vec![vec![2, 1], vec![1], vec![1, 2], vec![3, 4]]);
        assert_eq!(c, vec![vec![1], vec![3, 4]]);
        assert_eq!(canonicalize(vec![vec![1], vec![]]), vec![Vec::<Sym>::new()]);
    }

    #[test]
    fn or_names_and_nesting() {
        let phi = DnfFormula::from_names(&[&["x"], &["y"]]);
        let l = lift(&phi);
        assert_eq!(l.formula().to_string(), "(x|y)");
        let b = l.binding("x|y").unwrap();
        assert_eq!(b.to_string(), "(x ∨ y)");
    }

    #[test]
    fn lift_or_rejects_non_class() {
        let phi = DnfFormula::from_names(&[&["x", "y"], &["x", "z"]]);
        let l = LiftedFormula::identity(&phi);
        assert!(l.lift_or(&set(&["x", "y"])).is_err());
        assert!(l.lift_and(&set(&["y", "z"])).is_err());
        assert!(l.lift_or(&set(&["y"])).is_err());
    }

    #[test]
    fn value_terms_with_distinct_values_stay_apart() {
        let e = BnpExpression::from_names(MonoidKind::Max, &[(&[&["x"]], 3), (&[&["x"]], 7)]);
        let l = bnp_to_lifted(&e).unwrap();
        assert!(l.is_valid_aggregate());
        assert_eq!(l.clause_count(), 2);
    }
}
