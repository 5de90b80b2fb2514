//! Lifted compilation of DNF and MAX/MIN lineage into d-trees.

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use crate::dtree::{DTree, DTreeBuilder, NodeId};
use crate::error::{Error, Result};
use crate::lifting::{self, Clauses, Op, ReadOnce, Sym, SymKind, SymbolTable};
use crate::lineage::{BnpExpression, Clause, DnfFormula, VarId};

/// Knobs for [`compile_dnf`] and [`compile_aggregate_with`].
#[derive(Clone, Debug)]
pub struct CompileOptions {
    /// Lift before every decomposition step; off means plain d-tree compilation.
    pub lift: bool,
    /// Share compiled sub-formulas by canonical form.
    pub memoize: bool,
    /// Cooperative deadline, checked between recursive steps.
    pub deadline: Option<Instant>,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { lift: true, memoize: true, deadline: None }
    }
}

impl CompileOptions {
    pub fn without_lifting() -> Self {
        CompileOptions { lift: false, ..Self::default() }
    }
}

struct Compiler<'a> {
    table: SymbolTable,
    builder: DTreeBuilder,
    memo: HashMap<Clauses, NodeId>,
    guards: HashMap<Sym, Option<NodeId>>,
    opts: &'a CompileOptions,
}

impl<'a> Compiler<'a> {
    fn new(table: SymbolTable, opts: &'a CompileOptions) -> Self {
        let builder = DTreeBuilder::with_vars(table.originals.clone());
        Compiler { table, builder, memo: HashMap::new(), guards: HashMap::new(), opts }
    }

    fn check_deadline(&self) -> Result<()> {
        match self.opts.deadline {
            Some(d) if Instant::now() >= d => Err(Error::Timeout),
            _ => Ok(()),
        }
    }

    fn is_value(&self, s: Sym) -> bool {
        self.table.value(s).is_some()
    }

    /// Boolean part of a symbol's binding; `None` is the constant true.
    fn guard(&mut self, s: Sym) -> Result<Option<NodeId>> {
        if let Some(&g) = self.guards.get(&s) {
            return Ok(g);
        }
        let kind = self.table.entries[s as usize].kind.clone();
        let g = match kind {
            SymKind::Original(i) => Some(self.builder.var_index_leaf(i)),
            SymKind::Value => None,
            SymKind::Lifted(op, members) => {
                let mut parts = Vec::with_capacity(members.len());
                let mut trivially_true = false;
                for m in members {
                    match self.guard(m)? {
                        Some(n) => parts.push(n),
                        None => trivially_true = true,
                    }
                }
                match op {
                    Op::Or if trivially_true => None,
                    Op::Or => Some(self.builder.or(parts)?),
                    Op::And if parts.is_empty() => None,
                    Op::And => Some(self.builder.and(parts)?),
                }
            }
        };
        self.guards.insert(s, g);
        Ok(g)
    }

    fn expand_bool(&mut self, s: Sym) -> Result<NodeId> {
        Ok(match self.guard(s)? {
            Some(n) => n,
            None => self.builder.constant(true),
        })
    }

    /// `guard ⊗ value` for a value-term symbol.
    fn expand_semi(&mut self, s: Sym, extra_guards: Vec<NodeId>) -> Result<NodeId> {
        let value = self.table.value(s).cloned().expect("value symbol");
        let leaf = self.builder.value(value);
        let mut guards = extra_guards;
        guards.extend(self.guard(s)?);
        self.builder.scalar(guards, leaf)
    }

    fn compile(&mut self, clauses: Clauses) -> Result<NodeId> {
        self.check_deadline()?;
        if clauses.is_empty() {
            return Ok(self.builder.constant(false));
        }
        if clauses.iter().any(|c| c.is_empty()) {
            return Ok(self.builder.constant(true));
        }
        if self.opts.memoize {
            if let Some(&n) = self.memo.get(&clauses) {
                return Ok(n);
            }
        }
        let lifted = if self.opts.lift { lifting::saturate(&mut self.table, clauses.clone()) } else { clauses.clone() };
        let node = self.decompose(lifted)?;
        if self.opts.memoize {
            self.memo.insert(clauses, node);
        }
        Ok(node)
    }

    fn decompose(&mut self, clauses: Clauses) -> Result<NodeId> {
        if clauses.len() == 1 && clauses[0].len() == 1 {
            let s = clauses[0][0];
            return if self.is_value(s) { self.expand_semi(s, Vec::new()) } else { self.expand_bool(s) };
        }
        let comps = components(&clauses);
        if comps.len() > 1 {
            let mut children = Vec::with_capacity(comps.len());
            for c in comps {
                children.push(self.compile(c)?);
            }
            return self.builder.or(children);
        }
        let common = common_syms(&clauses);
        if !common.is_empty() {
            let rest: Clauses = lifting::canonicalize(
                clauses.iter().map(|c| c.iter().copied().filter(|s| !common.contains(s)).collect()).collect(),
            );
            let value_sym = common.iter().copied().find(|&s| self.is_value(s));
            let mut guards = Vec::new();
            let bool_syms: Vec<Sym> = common.iter().copied().filter(|&s| !self.is_value(s)).collect();
            for s in bool_syms {
                guards.push(self.expand_bool(s)?);
            }
            let semimodule = clauses.iter().any(|c| c.iter().any(|&s| self.is_value(s)));
            let rest_node = self.compile(rest)?;
            return match (semimodule, value_sym) {
                (true, Some(v)) => {
                    guards.push(rest_node);
                    self.expand_semi(v, guards)
                }
                (true, None) => self.builder.scalar(guards, rest_node),
                (false, _) => {
                    guards.push(rest_node);
                    self.builder.and(guards)
                }
            };
        }
        let y = self.pick_shannon_var(&clauses)?;
        let cond = self.expand_bool(y)?;
        let one = self.compile(substitute(&clauses, y, true))?;
        let zero = self.compile(substitute(&clauses, y, false))?;
        self.builder.shannon(cond, one, zero)
    }

    fn pick_shannon_var(&self, clauses: &Clauses) -> Result<Sym> {
        let mut freq: HashMap<Sym, usize> = HashMap::new();
        for c in clauses {
            for &s in c {
                if !self.is_value(s) {
                    *freq.entry(s).or_default() += 1;
                }
            }
        }
        freq.into_iter()
            .max_by(|(a, fa), (b, fb)| fa.cmp(fb).then_with(|| self.table.name(*b).cmp(self.table.name(*a))))
            .map(|(s, _)| s)
            .ok_or_else(|| Error::invariant("no Boolean variable to expand on"))
    }
}

fn substitute(clauses: &Clauses, y: Sym, value: bool) -> Clauses {
    let out = clauses
        .iter()
        .filter_map(|c| match (c.binary_search(&y), value) {
            (Err(_), _) => Some(c.clone()),
            (Ok(i), true) => {
                let mut n = c.clone();
                n.remove(i);
                Some(n)
            }
            (Ok(_), false) => None,
        })
        .collect();
    lifting::canonicalize(out)
}

fn components(clauses: &Clauses) -> Vec<Clauses> {
    let syms = lifting::occurring(clauses);
    let index: HashMap<Sym, usize> = syms.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut parent: Vec<usize> = (0..syms.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for c in clauses {
        if let Some((&first, rest)) = c.split_first() {
            let a = find(&mut parent, index[&first]);
            for s in rest {
                let b = find(&mut parent, index[s]);
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<Clauses> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for c in clauses {
        let r = find(&mut parent, index[&c[0]]);
        let g = *slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(c.clone());
    }
    groups
}

fn common_syms(clauses: &Clauses) -> Vec<Sym> {
    let mut common = clauses[0].clone();
    for c in &clauses[1..] {
        common.retain(|s| c.binary_search(s).is_ok());
        if common.is_empty() {
            break;
        }
    }
    common
}

/// Compile a DNF with explicit options.
pub fn compile_dnf(phi: &DnfFormula, opts: &CompileOptions) -> Result<DTree> {
    let (table, clauses) = lifting::encode_dnf(phi);
    let mut c = Compiler::new(table, opts);
    let root = c.compile(clauses)?;
    Ok(c.builder.finish(root, None))
}

/// Lifted compilation with default options.
pub fn lifted_compile(phi: &DnfFormula) -> DTree {
    compile_dnf(phi, &CompileOptions::default()).expect("no deadline set")
}

/// Compile a MAX/MIN expression into a semimodule d-tree.
pub fn compile_aggregate(phi: &BnpExpression) -> Result<DTree> {
    compile_aggregate_with(phi, &CompileOptions::default())
}

pub fn compile_aggregate_with(phi: &BnpExpression, opts: &CompileOptions) -> Result<DTree> {
    let (table, clauses) = lifting::encode_bnp(phi)?;
    let mut c = Compiler::new(table, opts);
    let root = c.compile(clauses)?;
    Ok(c.builder.finish(root, Some(phi.monoid())))
}

/// Connected components of the variable co-occurrence graph, one sub-formula each.
pub fn independent_components(phi: &DnfFormula) -> Vec<DnfFormula> {
    let (table, clauses) = lifting::encode_dnf(phi);
    components(&clauses)
        .into_iter()
        .map(|cs| {
            let clauses = cs
                .iter()
                .map(|c| Clause::new(c.iter().map(|&s| VarId::from(table.name(s)))))
                .collect();
            DnfFormula::new(clauses, None).expect("universe derived from clauses")
        })
        .collect()
}

/// Variables present in every clause.
pub fn common_variables(phi: &DnfFormula) -> BTreeSet<VarId> {
    let mut it = phi.clauses().iter();
    let Some(first) = it.next() else { return BTreeSet::new() };
    let mut common: BTreeSet<VarId> = first.vars().iter().cloned().collect();
    for c in it {
        common.retain(|v| c.contains(v));
    }
    common
}

/// A read-once formula as a tree of independent gates.
pub fn expand_readonce(f: &ReadOnce) -> DTree {
    fn go(b: &mut DTreeBuilder, f: &ReadOnce) -> NodeId {
        match f {
            ReadOnce::Var(v) => b.var(v.as_str()),
            ReadOnce::Or(cs) => {
                let ids = cs.iter().map(|c| go(b, c)).collect();
                b.or(ids).expect("read-once children are independent")
            }
            ReadOnce::And(cs) => {
                let ids = cs.iter().map(|c| go(b, c)).collect();
                b.and(ids).expect("read-once children are independent")
            }
        }
    }
    let mut b = DTreeBuilder::new();
    let root = go(&mut b, f);
    b.finish(root, None)
}
