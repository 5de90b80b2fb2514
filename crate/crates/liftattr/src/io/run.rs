//! One attribution run: method dispatch, timing and consistency checks.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;

use super::report::AttributionReport;
use crate::attribution::{
    gradient_banzhaf, gradient_shapley, linear_aggregate_attribution, minmax_attribution_counts, minmax_gradient,
    Measure,
};
use crate::compile::{compile_aggregate_with, compile_dnf, CompileOptions};
use crate::dtree::{DTree, TreeStats};
use crate::error::{Error, Result};
use crate::lineage::{Lineage, MonoidKind, Valuation, VarId};
use crate::oracle::{brute_banzhaf_all, brute_shapley_all, DEFAULT_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// One bottom-up and one top-down pass over the compiled tree.
    Gradient,
    /// Per-variable recompilation of Φ[x:=1] and Φ[x:=0] (MIN/MAX only).
    Counts,
    /// Exhaustive enumeration.
    Oracle,
}

impl Method {
    pub fn parse(s: &str) -> Result<Method> {
        match s {
            "gradient" => Ok(Method::Gradient),
            "counts" => Ok(Method::Counts),
            "oracle" => Ok(Method::Oracle),
            _ => Err(Error::input(format!("unknown method {s:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Gradient => "gradient",
            Method::Counts => "counts",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub method: Method,
    pub lift: bool,
    pub timeout: Option<Duration>,
    pub measures: Vec<Measure>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { method: Method::Gradient, lift: true, timeout: None, measures: vec![Measure::Banzhaf, Measure::Shapley] }
    }
}

impl RunConfig {
    pub fn compile_options(&self) -> CompileOptions {
        CompileOptions { lift: self.lift, memoize: true, deadline: self.timeout.map(|t| Instant::now() + t) }
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn to_rational(m: BTreeMap<VarId, num_bigint::BigInt>) -> BTreeMap<VarId, BigRational> {
    m.into_iter().map(|(k, v)| (k, BigRational::from_integer(v))).collect()
}

/// Compile a lineage with the given options (one tree; SUM/COUNT have none).
pub fn compile_lineage(l: &Lineage, opts: &CompileOptions) -> Result<Option<DTree>> {
    let tree = match l {
        Lineage::Dnf(f) => compile_dnf(f, opts)?,
        Lineage::Aggregate(e) if e.monoid().idempotent() => compile_aggregate_with(e, opts)?,
        Lineage::Aggregate(_) => return Ok(None),
    };
    tree.check_invariants()?;
    Ok(Some(tree))
}

/// Ψ[full] − Ψ[empty].
pub fn efficiency_target(l: &Lineage) -> Result<BigRational> {
    let full = Valuation::new(l.universe().iter().cloned());
    let empty = Valuation::new(Vec::<VarId>::new());
    Ok(l.eval(&full)? - l.eval(&empty)?)
}

/// Attribute every universe variable of `l`.
pub fn run_attribution(l: &Lineage, instance: &str, cfg: &RunConfig) -> Result<AttributionReport> {
    let opts = cfg.compile_options();
    let monoid = match l {
        Lineage::Dnf(_) => None,
        Lineage::Aggregate(e) => Some(e.monoid()),
    };
    if cfg.method == Method::Counts && !matches!(monoid, Some(MonoidKind::Max | MonoidKind::Min)) {
        return Err(Error::input("--method counts applies to MIN/MAX lineage only"));
    }
    let universe = l.universe();
    let mut timings = BTreeMap::new();
    let mut stats: Option<TreeStats> = None;
    let mut banzhaf = BTreeMap::new();
    let mut shapley = BTreeMap::new();
    let start = Instant::now();
    match cfg.method {
        Method::Oracle => {
            for m in &cfg.measures {
                match m {
                    Measure::Banzhaf => banzhaf = brute_banzhaf_all(l, DEFAULT_CAP)?,
                    Measure::Shapley => shapley = brute_shapley_all(l, DEFAULT_CAP)?,
                }
            }
        }
        Method::Counts => {
            let Lineage::Aggregate(e) = l else { unreachable!() };
            for m in &cfg.measures {
                let r = minmax_attribution_counts(e, *m, &opts)?;
                match m {
                    Measure::Banzhaf => banzhaf = r,
                    Measure::Shapley => shapley = r,
                }
            }
        }
        Method::Gradient => match l {
            Lineage::Aggregate(e) if !e.monoid().idempotent() => {
                for m in &cfg.measures {
                    let r = linear_aggregate_attribution(e, *m, &opts)?;
                    match m {
                        Measure::Banzhaf => banzhaf = r,
                        Measure::Shapley => shapley = r,
                    }
                }
            }
            _ => {
                let tree = compile_lineage(l, &opts)?.expect("tree for Boolean and MIN/MAX lineage");
                timings.insert("compile".to_string(), ms(start.elapsed()));
                stats = Some(tree.stats());
                let t = Instant::now();
                for m in &cfg.measures {
                    match (l, m) {
                        (Lineage::Dnf(_), Measure::Banzhaf) => banzhaf = to_rational(gradient_banzhaf(&tree, universe)?),
                        (Lineage::Dnf(_), Measure::Shapley) => shapley = gradient_shapley(&tree, universe)?,
                        (_, Measure::Banzhaf) => banzhaf = minmax_gradient(&tree, universe, *m)?,
                        (_, Measure::Shapley) => shapley = minmax_gradient(&tree, universe, *m)?,
                    }
                }
                timings.insert("attribute".to_string(), ms(t.elapsed()));
            }
        },
    }
    timings.insert("total".to_string(), ms(start.elapsed()));
    if cfg.measures.contains(&Measure::Shapley) {
        let sum: BigRational = shapley.values().fold(BigRational::zero(), |a, v| a + v);
        let target = efficiency_target(l)?;
        if sum != target {
            return Err(Error::invariant(format!("Shapley values sum to {sum}, expected {target}")));
        }
    }
    Ok(AttributionReport {
        instance: instance.to_string(),
        method: cfg.method.name().to_string(),
        lifted: cfg.lift,
        variables: universe.iter().cloned().collect(),
        banzhaf,
        shapley,
        stats,
        timings_ms: timings,
    })
}
