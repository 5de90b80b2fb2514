//! Graphviz output with p/g annotations (Boolean) or outcome counts (MAX).
//!
//! `cargo run --example dot_export > movies.dot && dot -Tsvg movies.dot -o movies.svg`

use std::path::Path;

use liftattr::compile::{compile_aggregate, lifted_compile};
use liftattr::io::{load_lineage, to_dot};
use liftattr::Lineage;

fn main() -> liftattr::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let Lineage::Dnf(movies) = load_lineage(&data.join("movies.json"))? else { unreachable!() };
    print!("{}", to_dot(&lifted_compile(&movies), Some(movies.universe()))?);

    if std::env::args().any(|a| a == "--max") {
        let Lineage::Aggregate(top) = load_lineage(&data.join("movies_max.json"))? else { unreachable!() };
        print!("{}", to_dot(&compile_aggregate(&top)?, Some(top.universe()))?);
    }
    Ok(())
}
