//! Lineage formulas: positive DNF over named variables and aggregate
//! (Boolean-number pair) expressions.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A variable name. Ordering and equality are by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(Arc<str>);

impl VarId {
    /// Validated constructor: the name must be non-empty.
    pub fn new(name: &str) -> Result<VarId> {
        if name.is_empty() {
            return Err(Error::input("empty variable name"));
        }
        Ok(VarId(Arc::from(name)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for VarId {
    fn from(s: &str) -> Self {
        VarId(Arc::from(s))
    }
}

impl From<String> for VarId {
    fn from(s: String) -> Self {
        VarId(Arc::from(s.as_str()))
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for VarId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for VarId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        VarId::new(&s).map_err(serde::de::Error::custom)
    }
}

/// Conjunction of positive literals, kept sorted and duplicate-free.
/// The empty clause is the constant true; input files never contain one,
/// but substitution can produce it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Clause(Vec<VarId>);

impl Clause {
    pub fn new<I, V>(vars: I) -> Clause
    where
        I: IntoIterator<Item = V>,
        V: Into<VarId>,
    {
        let mut v: Vec<VarId> = vars.into_iter().map(Into::into).collect();
        v.sort();
        v.dedup();
        Clause(v)
    }

    pub fn vars(&self) -> &[VarId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: &VarId) -> bool {
        self.0.binary_search(x).is_ok()
    }

    pub fn is_subset_of(&self, other: &Clause) -> bool {
        self.0.iter().all(|v| other.contains(v))
    }

    pub fn satisfied_by(&self, theta: &Valuation) -> bool {
        self.0.iter().all(|v| theta.contains(v))
    }

    fn without(&self, x: &VarId) -> Clause {
        Clause(self.0.iter().filter(|v| *v != x).cloned().collect())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("⊤");
        }
        let names: Vec<&str> = self.0.iter().map(|v| v.as_str()).collect();
        write!(f, "({})", names.join(" ∧ "))
    }
}

/// A valuation, identified with the set of variables mapped to 1.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation(BTreeSet<VarId>);

impl Valuation {
    pub fn new<I, V>(true_set: I) -> Valuation
    where
        I: IntoIterator<Item = V>,
        V: Into<VarId>,
    {
        Valuation(true_set.into_iter().map(Into::into).collect())
    }

    pub fn contains(&self, x: &VarId) -> bool {
        self.0.contains(x)
    }

    pub fn true_set(&self) -> &BTreeSet<VarId> {
        &self.0
    }

    fn check_within(&self, universe: &BTreeSet<VarId>) -> Result<()> {
        match self.0.iter().find(|v| !universe.contains(*v)) {
            Some(v) => Err(Error::input(format!("valuation mentions unknown variable {v}"))),
            None => Ok(()),
        }
    }
}

/// Positive DNF with an explicit universe of attributable variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DnfFormula {
    clauses: Vec<Clause>,
    universe: BTreeSet<VarId>,
}

impl DnfFormula {
    /// Build a formula. Without an explicit universe, the universe is the
    /// set of variables that occur in the clauses.
    pub fn new(clauses: Vec<Clause>, universe: Option<BTreeSet<VarId>>) -> Result<DnfFormula> {
        let occurring: BTreeSet<VarId> = clauses.iter().flat_map(|c| c.0.iter().cloned()).collect();
        let universe = match universe {
            Some(u) => {
                if let Some(v) = occurring.iter().find(|v| !u.contains(*v)) {
                    return Err(Error::input(format!("variable {v} is not in the declared universe")));
                }
                u
            }
            None => occurring,
        };
        Ok(DnfFormula { clauses, universe })
    }

    /// Convenience constructor from name lists; the universe is the occurring variables.
    pub fn from_names(clauses: &[&[&str]]) -> DnfFormula {
        let cs = clauses.iter().map(|c| Clause::new(c.iter().copied())).collect();
        DnfFormula::new(cs, None).expect("universe derived from clauses")
    }

    /// The constant-false formula over `universe`.
    pub fn constant_false(universe: BTreeSet<VarId>) -> DnfFormula {
        DnfFormula { clauses: Vec::new(), universe }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn universe(&self) -> &BTreeSet<VarId> {
        &self.universe
    }

    /// Variables that occur in some clause.
    pub fn vars(&self) -> BTreeSet<VarId> {
        self.clauses.iter().flat_map(|c| c.0.iter().cloned()).collect()
    }

    pub fn with_universe(mut self, universe: BTreeSet<VarId>) -> Result<DnfFormula> {
        if let Some(v) = self.vars().into_iter().find(|v| !universe.contains(v)) {
            return Err(Error::input(format!("variable {v} is not in the declared universe")));
        }
        self.universe = universe;
        Ok(self)
    }

    pub fn is_constant_false(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn is_constant_true(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    pub fn eval(&self, theta: &Valuation) -> Result<bool> {
        theta.check_within(&self.universe)?;
        Ok(self.eval_unchecked(theta))
    }

    pub(crate) fn eval_unchecked(&self, theta: &Valuation) -> bool {
        self.clauses.iter().any(|c| c.satisfied_by(theta))
    }

    /// Deduplicate clauses, sort them, and drop clauses that contain another clause.
    pub fn canonicalize(&self) -> DnfFormula {
        DnfFormula { clauses: canonical_clauses(self.clauses.clone()), universe: self.universe.clone() }
    }

    pub fn is_canonical(&self) -> bool {
        canonical_clauses(self.clauses.clone()) == self.clauses
    }

    /// φ[x := b]. The universe loses `x`.
    pub fn substitute(&self, x: &VarId, value: bool) -> DnfFormula {
        let clauses = self
            .clauses
            .iter()
            .filter_map(|c| match (c.contains(x), value) {
                (false, _) => Some(c.clone()),
                (true, true) => Some(c.without(x)),
                (true, false) => None,
            })
            .collect();
        let mut universe = self.universe.clone();
        universe.remove(x);
        DnfFormula { clauses: canonical_clauses(clauses), universe }
    }
}

impl fmt::Display for DnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("⊥");
        }
        let parts: Vec<String> = self.clauses.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(" ∨ "))
    }
}

pub(crate) fn canonical_clauses(mut clauses: Vec<Clause>) -> Vec<Clause> {
    clauses.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    clauses.dedup();
    let mut kept: Vec<Clause> = Vec::with_capacity(clauses.len());
    for c in clauses {
        if !kept.iter().any(|k| k.len() < c.len() && k.is_subset_of(&c)) {
            kept.push(c);
        }
    }
    kept.sort();
    kept
}

/// Aggregation monoid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonoidKind {
    Sum,
    Count,
    Max,
    Min,
}

/// Neutral element of a monoid, over the extended reals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Neutral {
    Zero,
    NegInfinity,
    PosInfinity,
}

impl MonoidKind {
    pub fn neutral(self) -> Neutral {
        match self {
            MonoidKind::Sum | MonoidKind::Count => Neutral::Zero,
            MonoidKind::Max => Neutral::NegInfinity,
            MonoidKind::Min => Neutral::PosInfinity,
        }
    }

    pub fn idempotent(self) -> bool {
        matches!(self, MonoidKind::Max | MonoidKind::Min)
    }

    pub fn name(self) -> &'static str {
        match self {
            MonoidKind::Sum => "sum",
            MonoidKind::Count => "count",
            MonoidKind::Max => "max",
            MonoidKind::Min => "min",
        }
    }

    pub fn parse(s: &str) -> Result<MonoidKind> {
        match s.to_ascii_lowercase().as_str() {
            "sum" => Ok(MonoidKind::Sum),
            "count" => Ok(MonoidKind::Count),
            "max" => Ok(MonoidKind::Max),
            "min" => Ok(MonoidKind::Min),
            other => Err(Error::input(format!("unknown monoid {other:?}"))),
        }
    }

    fn combine(self, a: &BigRational, b: &BigRational) -> BigRational {
        match self {
            MonoidKind::Sum | MonoidKind::Count => a + b,
            MonoidKind::Max => a.max(b).clone(),
            MonoidKind::Min => a.min(b).clone(),
        }
    }
}

/// Result of evaluating an aggregate expression: no satisfied term, or a value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Bottom,
    Value(BigRational),
}

impl Outcome {
    /// The real number used for marginal contributions (Bottom counts as 0).
    pub fn to_real(&self) -> BigRational {
        match self {
            Outcome::Bottom => BigRational::zero(),
            Outcome::Value(v) => v.clone(),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Bottom => f.write_str("⊥"),
            Outcome::Value(v) => f.write_str(&crate::num::format_rational(v)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BnpTerm {
    pub formula: DnfFormula,
    pub value: BigRational,
}

/// Bag of (formula, value) pairs aggregated under a monoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BnpExpression {
    monoid: MonoidKind,
    terms: Vec<BnpTerm>,
    universe: BTreeSet<VarId>,
}

impl BnpExpression {
    /// Build an expression; every term formula is re-homed on the common universe.
    pub fn new(
        monoid: MonoidKind,
        terms: Vec<(Vec<Clause>, BigRational)>,
        universe: Option<BTreeSet<VarId>>,
    ) -> Result<BnpExpression> {
        let occurring: BTreeSet<VarId> =
            terms.iter().flat_map(|(cs, _)| cs.iter().flat_map(|c| c.0.iter().cloned())).collect();
        let universe = match universe {
            Some(u) => {
                if let Some(v) = occurring.iter().find(|v| !u.contains(*v)) {
                    return Err(Error::input(format!("variable {v} is not in the declared universe")));
                }
                u
            }
            None => occurring,
        };
        let one = BigRational::from_integer(1.into());
        let mut out = Vec::with_capacity(terms.len());
        for (clauses, value) in terms {
            if monoid == MonoidKind::Count && value != one {
                return Err(Error::input("COUNT terms must carry value 1"));
            }
            let formula = DnfFormula { clauses: canonical_clauses(clauses), universe: universe.clone() };
            out.push(BnpTerm { formula, value });
        }
        Ok(BnpExpression { monoid, terms: out, universe })
    }

    /// Convenience constructor: each term is a list of clauses of names and an integer value.
    pub fn from_names(monoid: MonoidKind, terms: &[(&[&[&str]], i64)]) -> BnpExpression {
        let ts = terms
            .iter()
            .map(|(cs, v)| {
                let clauses = cs.iter().map(|c| Clause::new(c.iter().copied())).collect();
                (clauses, BigRational::from_integer((*v).into()))
            })
            .collect();
        BnpExpression::new(monoid, ts, None).expect("valid literal expression")
    }

    pub fn monoid(&self) -> MonoidKind {
        self.monoid
    }

    pub fn terms(&self) -> &[BnpTerm] {
        &self.terms
    }

    pub fn universe(&self) -> &BTreeSet<VarId> {
        &self.universe
    }

    pub fn with_universe(self, universe: BTreeSet<VarId>) -> Result<BnpExpression> {
        let terms = self.terms.into_iter().map(|t| (t.formula.clauses, t.value)).collect();
        BnpExpression::new(self.monoid, terms, Some(universe))
    }

    /// Outcome under θ: Bottom when no term is satisfied.
    pub fn eval_outcome(&self, theta: &Valuation) -> Result<Outcome> {
        theta.check_within(&self.universe)?;
        Ok(self.eval_outcome_unchecked(theta))
    }

    pub(crate) fn eval_outcome_unchecked(&self, theta: &Valuation) -> Outcome {
        let mut acc: Option<BigRational> = None;
        for t in &self.terms {
            if t.formula.eval_unchecked(theta) {
                acc = Some(match acc {
                    None => t.value.clone(),
                    Some(a) => self.monoid.combine(&a, &t.value),
                });
            }
        }
        acc.map_or(Outcome::Bottom, Outcome::Value)
    }

    /// Query value under θ, with the empty aggregate read as 0.
    pub fn eval(&self, theta: &Valuation) -> Result<BigRational> {
        Ok(self.eval_outcome(theta)?.to_real())
    }

    /// Φ[x := b]; terms left without clauses are dropped. The universe loses `x`.
    pub fn substitute(&self, x: &VarId, value: bool) -> BnpExpression {
        let terms = self
            .terms
            .iter()
            .map(|t| BnpTerm { formula: t.formula.substitute(x, value), value: t.value.clone() })
            .filter(|t| !t.formula.is_constant_false())
            .collect();
        let mut universe = self.universe.clone();
        universe.remove(x);
        BnpExpression { monoid: self.monoid, terms, universe }
    }

    /// The same terms with every value negated (MIN over Φ is −MAX over −Φ).
    pub fn negated(&self, monoid: MonoidKind) -> BnpExpression {
        let terms = self
            .terms
            .iter()
            .map(|t| BnpTerm { formula: t.formula.clone(), value: -t.value.clone() })
            .collect();
        BnpExpression { monoid, terms, universe: self.universe.clone() }
    }
}

/// Either kind of lineage instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lineage {
    Dnf(DnfFormula),
    Aggregate(BnpExpression),
}

impl Lineage {
    pub fn universe(&self) -> &BTreeSet<VarId> {
        match self {
            Lineage::Dnf(f) => f.universe(),
            Lineage::Aggregate(e) => e.universe(),
        }
    }

    /// Query value Ψ[θ] as a rational (Boolean results as 0/1).
    pub fn eval(&self, theta: &Valuation) -> Result<BigRational> {
        match self {
            Lineage::Dnf(f) => Ok(BigRational::from_integer(u8::from(f.eval(theta)?).into())),
            Lineage::Aggregate(e) => e.eval(theta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clause_set_semantics() {
        let c = Clause::new(["y", "x", "y"]);
        assert_eq!(c.vars(), &[VarId::from("x"), VarId::from("y")]);
    }

    #[test]
    fn canonical_absorption_and_dedup() {
        let f = DnfFormula::from_names(&[&["x", "y"], &["x", "y"]]).canonicalize();
        assert_eq!(f.clauses().len(), 1);
        let g = DnfFormula::from_names(&[&["x"], &["x", "y"]]).canonicalize();
        assert_eq!(g.clauses(), &[Clause::new(["x"])]);
        assert!(g.is_canonical());
    }

    #[test]
    fn universe_must_cover_clauses() {
        let u: BTreeSet<VarId> = [VarId::from("x")].into_iter().collect();
        assert!(DnfFormula::new(vec![Clause::new(["x", "y"])], Some(u)).is_err());
    }

    #[test]
    fn substitution() {
        let f = DnfFormula::from_names(&[&["x", "y"], &["z"]]);
        let one = f.substitute(&"x".into(), true);
        assert_eq!(one.to_string(), "(y) ∨ (z)");
        let zero = f.substitute(&"x".into(), false);
        assert_eq!(zero.to_string(), "(z)");
        assert!(!zero.universe().contains(&VarId::from("x")));
        let t = DnfFormula::from_names(&[&["x"]]).substitute(&"x".into(), true);
        assert!(t.is_constant_true());
    }

    #[test]
    fn count_requires_unit_values() {
        let r = BnpExpression::new(
            MonoidKind::Count,
            vec![(vec![Clause::new(["x"])], BigRational::from_integer(2.into()))],
            None,
        );
        assert!(r.is_err());
    }

    #[test]
    fn monoid_properties() {
        assert!(MonoidKind::Max.idempotent() && MonoidKind::Min.idempotent());
        assert!(!MonoidKind::Sum.idempotent() && !MonoidKind::Count.idempotent());
        assert_eq!(MonoidKind::Max.neutral(), Neutral::NegInfinity);
        assert_eq!(MonoidKind::Min.neutral(), Neutral::PosInfinity);
        assert_eq!(MonoidKind::Sum.neutral(), Neutral::Zero);
    }
}
