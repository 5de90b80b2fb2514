//! SUM and COUNT lineage are attributed term by term (both measures are linear).

use liftattr::attribution::{linear_aggregate_attribution, Measure};
use liftattr::compile::CompileOptions;
use liftattr::num::format_rational;
use liftattr::oracle::{brute_banzhaf_all, brute_shapley_all, DEFAULT_CAP};
use liftattr::{BnpExpression, Lineage, MonoidKind};

fn main() -> liftattr::Result<()> {
    // total box-office of the movies an actor appears in, say
    let phi = BnpExpression::from_names(
        MonoidKind::Sum,
        &[(&[&["a1", "m1"]], 120), (&[&["a1", "m2"], &["a2", "m2"]], 80), (&[&["a3", "m3"]], 45)],
    );
    let opts = CompileOptions::default();
    let b = linear_aggregate_attribution(&phi, Measure::Banzhaf, &opts)?;
    let s = linear_aggregate_attribution(&phi, Measure::Shapley, &opts)?;
    let psi = Lineage::Aggregate(phi.clone());
    assert_eq!(b, brute_banzhaf_all(&psi, DEFAULT_CAP)?);
    assert_eq!(s, brute_shapley_all(&psi, DEFAULT_CAP)?);
    println!("SUM      banzhaf  shapley");
    for x in phi.universe() {
        println!("  {x:>3}  {:>7}  {:>7}", format_rational(&b[x]), format_rational(&s[x]));
    }

    let count = BnpExpression::from_names(MonoidKind::Count, &[(&[&["a1", "m1"]], 1), (&[&["a2", "m1"]], 1)]);
    let c = linear_aggregate_attribution(&count, Measure::Shapley, &opts)?;
    println!("COUNT shapley: {:?}", c.iter().map(|(k, v)| format!("{k}={}", format_rational(v))).collect::<Vec<_>>());
    Ok(())
}
