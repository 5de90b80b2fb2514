//! MAX lineage: outcome counts per node and attribution by both methods.
//!
//! `cargo run --example aggregate_max [lineage.json]`

use std::path::PathBuf;

use liftattr::attribution::{minmax_attribution_counts, minmax_gradient, value_counts, Measure};
use liftattr::compile::{compile_aggregate, CompileOptions};
use liftattr::io::load_lineage;
use liftattr::lifting::bnp_to_lifted;
use liftattr::num::format_rational;
use liftattr::Lineage;

fn main() -> liftattr::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/movies_max.json")));
    let Lineage::Aggregate(phi) = load_lineage(&path)? else {
        return Err(liftattr::Error::input("expected an aggregate lineage"));
    };

    let lifted = bnp_to_lifted(&phi)?.saturate();
    println!("lifted:  {}", lifted.formula());
    for (name, binding) in lifted.bindings() {
        println!("  {name} -> {binding}");
    }

    let tree = compile_aggregate(&phi)?;
    println!("tree:    {tree}");

    // outcome counts at every node, Bottom included
    let counts = value_counts(&tree, false)?;
    for id in tree.topological() {
        if let Some(d) = &counts[id] {
            let parts: Vec<String> = d.counts.iter().map(|(o, c)| format!("{o}:{c}")).collect();
            println!("  node {id:>2} over {} vars: {{{}}}", d.var_count, parts.join(", "));
        }
    }

    for measure in [Measure::Banzhaf, Measure::Shapley] {
        let fast = minmax_gradient(&tree, phi.universe(), measure)?;
        let slow = minmax_attribution_counts(&phi, measure, &CompileOptions::default())?;
        assert_eq!(fast, slow);
        println!("{measure:?}:");
        for (x, v) in fast {
            println!("  {x:>4}  {}", format_rational(&v));
        }
    }
    Ok(())
}
