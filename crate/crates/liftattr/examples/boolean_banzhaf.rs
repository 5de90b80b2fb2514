//! Banzhaf values of every fact in a DNF lineage from one compiled tree.
//!
//! Run with `cargo run --example boolean_banzhaf [lineage.json]`; without an
//! argument the bundled movie-database lineage is used.

use std::path::PathBuf;

use liftattr::attribution::{gradient_banzhaf, node_annotations};
use liftattr::compile::lifted_compile;
use liftattr::io::load_lineage;
use liftattr::num::format_rational;
use liftattr::Lineage;

fn main() -> liftattr::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/movies.json")));
    let Lineage::Dnf(phi) = load_lineage(&path)? else {
        return Err(liftattr::Error::input("expected a DNF lineage"));
    };
    println!("lineage: {phi}");

    let tree = lifted_compile(&phi);
    println!("tree:    {tree}");
    let stats = tree.stats();
    println!("size {} (stored {}), depth {}", stats.size, stats.dag_size, stats.depth);

    let ann = node_annotations(&tree, phi.universe())?;
    let root = ann[tree.root()].as_ref().expect("root is annotated");
    println!("root p = {}, g = {}", format_rational(&root.p), format_rational(&root.g));

    for (x, b) in gradient_banzhaf(&tree, phi.universe())? {
        println!("  {x:>6}  {b}");
    }
    Ok(())
}
