//! Lifting: cofactor-equivalent variables merge into one OR-variable,
//! interchangeable ones into an AND-variable, until nothing is left to merge.

use std::collections::BTreeSet;

use liftattr::lifting::{cofactor_partition, interchangeable_partition, lift, LiftedFormula};
use liftattr::{DnfFormula, VarId};

fn main() -> liftattr::Result<()> {
    let phi = DnfFormula::from_names(&[
        &["d1", "a1", "m3"], &["d1", "a1", "m2"], &["d1", "a3", "m3"], &["d1", "a2", "m3"], &["d1", "a3", "m2"],
        &["d2", "a1", "m3"], &["d2", "a1", "m2"], &["d2", "a3", "m3"], &["d2", "a2", "m3"], &["d2", "a3", "m2"],
    ]);
    println!("{} clauses: {phi}", phi.clauses().len());
    println!("same cofactor:   {:?}", cofactor_partition(&phi));
    println!("interchangeable: {:?}", interchangeable_partition(&phi));

    // one step by hand
    let step = LiftedFormula::identity(&phi).lift_or(&BTreeSet::from([VarId::from("d1"), VarId::from("d2")]))?;
    println!("after lifting d1, d2: {}", step.formula());

    // and all the way
    let lifted = lift(&phi);
    println!("saturated ({} clauses): {}", lifted.clause_count(), lifted.formula());
    for (name, binding) in lifted.bindings() {
        println!("  {name:>6} -> {binding}");
    }
    assert!(lifted.is_saturated() && lifted.bindings_read_once() && lifted.bindings_disjoint());

    // AND-lifting: x and y only ever appear together
    let psi = DnfFormula::from_names(&[&["x", "y", "z"], &["x", "y", "w"], &["v"]]);
    println!("{psi}  =>  {}", lift(&psi).formula());
    Ok(())
}
