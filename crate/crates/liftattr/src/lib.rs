//! Exact Banzhaf and Shapley attribution for database lineage.
//!
//! Lineage is either a positive DNF over fact variables ([`lineage::DnfFormula`])
//! or an aggregate expression pairing formulas with values under SUM, COUNT,
//! MIN or MAX ([`lineage::BnpExpression`]). Formulas are compiled into
//! decomposition trees ([`dtree::DTree`]) after lifting symmetric variables
//! into fresh ones; attribution then takes one bottom-up and one top-down
//! pass over the tree for all variables at once.
//!
//! The runnable programs under `examples/` are the main tour:
//!
//! * `boolean_banzhaf`: compile a DNF and read off every Banzhaf value
//! * `shapley_values`: Shapley values with exact rationals
//! * `lifting`: cofactor and interchangeable classes, saturation, bindings
//! * `aggregate_max`: MAX lineage, outcome counts and both MIN/MAX methods
//! * `aggregate_sum`: SUM and COUNT by linearity
//! * `dot_export`: annotated Graphviz output
//! * `generate_and_bench`: synthetic corpora and the benchmark runner
//! * `oracle_check`: brute-force cross-checking
//!
//! ```
//! use liftattr::{compile::lifted_compile, attribution::gradient_banzhaf, lineage::DnfFormula};
//!
//! let phi = DnfFormula::from_names(&[&["x"], &["y"]]);
//! let tree = lifted_compile(&phi);
//! let b = gradient_banzhaf(&tree, phi.universe()).unwrap();
//! assert!(b.values().all(|v| *v == 1.into()));
//! ```

pub mod attribution;
pub mod compile;
pub mod dtree;
pub mod error;
pub mod io;
pub mod lifting;
pub mod lineage;
pub mod num;
pub mod oracle;

pub use error::{Error, ExitCode, Result};
pub use lineage::{BnpExpression, Clause, DnfFormula, Lineage, MonoidKind, Outcome, Valuation, VarId};
