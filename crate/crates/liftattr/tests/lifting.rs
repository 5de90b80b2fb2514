mod common;

use std::collections::BTreeSet;

use common::*;
use liftattr::lifting::{
    bnp_to_lifted, cofactor_partition, interchangeable_partition, lift, Binding, LiftedFormula, ReadOnce,
};
use liftattr::{BnpExpression, DnfFormula, MonoidKind, Outcome, Valuation, VarId};

fn classes(list: &[&[&str]]) -> Vec<BTreeSet<VarId>> {
    list.iter().map(|c| vars(c)).collect()
}

fn set(names: &[&str]) -> BTreeSet<VarId> {
    vars(names)
}

fn every_valuation(universe: &BTreeSet<VarId>) -> Vec<Valuation> {
    let names: Vec<&VarId> = universe.iter().collect();
    (0u32..1 << names.len())
        .map(|m| Valuation::new(names.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, v)| (*v).clone())))
        .collect()
}

fn inline_equivalent(phi: &DnfFormula, lifted: &LiftedFormula) -> bool {
    every_valuation(phi.universe()).iter().all(|t| lifted.eval_inline(t) == phi.eval(t).unwrap())
}

#[test]
fn cofactor_classes() {
    let phi1 = DnfFormula::from_names(&[&["y1", "y2"], &["y3", "y2"]]);
    assert_eq!(cofactor_partition(&phi1), classes(&[&["y1", "y3"], &["y2"]]));
    assert!(cofactor_partition(&movies()).contains(&set(&["d1", "d2"])));
    assert_eq!(cofactor_partition(&DnfFormula::from_names(&[&["x"]])), classes(&[&["x"]]));
}

#[test]
fn interchangeable_classes() {
    let phi0 = DnfFormula::from_names(&[&["x1", "x2", "x3"], &["x4", "x5", "x3"]]);
    let mut got = interchangeable_partition(&phi0);
    got.sort();
    let mut want = classes(&[&["x1", "x2"], &["x4", "x5"], &["x3"]]);
    want.sort();
    assert_eq!(got, want);
    let xy = DnfFormula::from_names(&[&["x", "y"], &["x", "z"]]);
    assert!(interchangeable_partition(&xy).iter().all(|c| c.len() == 1));
    let xyuw = DnfFormula::from_names(&[&["x", "y", "u"], &["x", "y", "w"]]);
    assert!(interchangeable_partition(&xyuw).contains(&set(&["x", "y"])));
}

#[test]
fn lift_or_steps() {
    let phi1 = DnfFormula::from_names(&[&["y1", "y2"], &["y3", "y2"]]);
    let l = LiftedFormula::identity(&phi1).lift_or(&set(&["y1", "y3"])).unwrap();
    assert_eq!(l.clause_count(), 1);
    assert_eq!(l.binding("y1|y3").unwrap().to_string(), "(y1 ∨ y3)");
    assert!(inline_equivalent(&phi1, &l));

    let m = movies();
    let step1 = LiftedFormula::identity(&m).lift_or(&set(&["d1", "d2"])).unwrap();
    assert_eq!(step1.clause_count(), 5);
    let step2 = step1.lift_or(&set(&["a1", "a3"])).unwrap();
    assert_eq!(step2.clause_count(), 3);
    assert!(inline_equivalent(&m, &step2));
}

#[test]
fn lift_or_rejects_a_non_class() {
    let phi = DnfFormula::from_names(&[&["x", "y"], &["z"]]);
    assert!(LiftedFormula::identity(&phi).lift_or(&set(&["x", "z"])).is_err());
}

#[test]
fn lift_and_steps() {
    let phi0 = DnfFormula::from_names(&[&["x1", "x2", "x3"], &["x4", "x5", "x3"]]);
    let l = LiftedFormula::identity(&phi0).lift_and(&set(&["x1", "x2"])).unwrap();
    assert_eq!(l.binding("x1&x2").unwrap().to_string(), "(x1 ∧ x2)");
    assert!(inline_equivalent(&phi0, &l));

    let phi = DnfFormula::from_names(&[&["x", "y", "u"], &["x", "y", "w"]]);
    let g = LiftedFormula::identity(&phi).lift_and(&set(&["x", "y"])).unwrap();
    assert_eq!(g.formula().to_string(), "(u ∧ x&y) ∨ (w ∧ x&y)");
    assert!(inline_equivalent(&phi, &g));
    assert!(LiftedFormula::identity(&phi).lift_and(&set(&["x", "u"])).is_err());
}

#[test]
fn saturated_movie_lineage() {
    let m = movies();
    let l = lift(&m);
    assert_eq!(l.clause_count(), 3);
    let b = l.bindings();
    let names: Vec<&str> = b.keys().map(|k| k.as_str()).collect();
    assert_eq!(names, ["a1|a3", "a2", "d1|d2", "m2", "m3"]);
    assert_eq!(b[&VarId::from("d1|d2")].to_string(), "(d1 ∨ d2)");
    assert!(l.is_saturated() && l.bindings_disjoint() && l.bindings_read_once());
    assert!(inline_equivalent(&m, &l));
}

#[test]
fn already_saturated_is_unchanged() {
    let phi2 = DnfFormula::from_names(&[&["y4", "y2"]]);
    // y4 and y2 are interchangeable, so this collapses to one AND-variable
    let l = lift(&phi2);
    assert!(l.is_saturated());
    let single = DnfFormula::from_names(&[&["y4"], &["y2", "y5"], &["y2", "y6"]]);
    let once = lift(&single);
    assert_eq!(lift(&once.formula()).formula(), once.formula());
}

#[test]
fn disjunction_of_two_variables() {
    let l = lift(&DnfFormula::from_names(&[&["x"], &["y"]]));
    assert_eq!(l.clause_count(), 1);
    assert_eq!(l.bindings()[&VarId::from("x|y")], Binding::Formula(ReadOnce::Or(vec![ReadOnce::Var("x".into()), ReadOnce::Var("y".into())])));
}

#[test]
fn aggregate_lifting() {
    let top = movies_max();
    let l = bnp_to_lifted(&top).unwrap().saturate();
    assert_eq!(l.clause_count(), 4);
    assert!(l.is_valid_aggregate());
    let shown: Vec<String> = l.bindings().values().map(|b| b.to_string()).collect();
    for want in ["(a1 ∨ a3)", "(a4 ∧ m1) ⊗ 176", "m2 ⊗ 322", "m3 ⊗ 377", "a2"] {
        assert!(shown.contains(&want.to_string()), "{want} missing from {shown:?}");
    }
    for t in every_valuation(top.universe()) {
        assert_eq!(l.eval_inline_outcome(&t), top.eval_outcome(&t).unwrap());
    }
}

#[test]
fn aggregate_single_term_and_shared_formula() {
    let x5 = BnpExpression::from_names(MonoidKind::Max, &[(&[&["x"]], 5)]);
    let l = bnp_to_lifted(&x5).unwrap();
    assert_eq!(l.clause_count(), 1);
    assert!(l.is_valid_aggregate());

    let shared = BnpExpression::from_names(MonoidKind::Max, &[(&[&["c1", "c2"]], 3), (&[&["c1", "c2"]], 7)]);
    let l = bnp_to_lifted(&shared).unwrap();
    assert_eq!(l.clause_count(), 2);
    for t in every_valuation(shared.universe()) {
        assert_eq!(l.eval_inline_outcome(&t), shared.eval_outcome(&t).unwrap());
    }
    let all = Valuation::new(["c1", "c2"]);
    assert_eq!(l.eval_inline_outcome(&all), Outcome::Value(rat(7, 1)));
}

#[test]
fn sum_is_not_liftable() {
    let s = BnpExpression::from_names(MonoidKind::Sum, &[(&[&["x"]], 5)]);
    assert!(bnp_to_lifted(&s).is_err());
}

#[test]
fn random_corpus_soundness() {
    for seed in 0..150 {
        let phi = random_dnf(seed);
        let l = lift(&phi);
        assert!(inline_equivalent(&phi, &l), "seed {seed}");
        assert!(l.is_saturated() && l.bindings_disjoint() && l.bindings_read_once(), "seed {seed}");
    }
    for seed in 0..100 {
        let m = if seed % 2 == 0 { MonoidKind::Max } else { MonoidKind::Min };
        let phi = random_bnp(m, seed);
        let l = bnp_to_lifted(&phi).unwrap().saturate();
        assert!(l.is_valid_aggregate() && l.is_saturated(), "seed {seed}");
        for t in every_valuation(phi.universe()) {
            assert_eq!(l.eval_inline_outcome(&t), phi.eval_outcome(&t).unwrap(), "seed {seed}");
        }
    }
}
