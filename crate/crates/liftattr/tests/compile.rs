mod common;

use std::collections::BTreeSet;

use common::*;
use liftattr::compile::{
    common_variables, compile_aggregate, compile_dnf, expand_readonce, independent_components, lifted_compile,
    CompileOptions,
};
use liftattr::dtree::{DTreeBuilder, NodeKind};
use liftattr::io::{generate, GeneratorParams};
use liftattr::lifting::{lift, ReadOnce};
use liftattr::{BnpExpression, DnfFormula, Lineage, MonoidKind, Valuation, VarId};

fn every_valuation(universe: &BTreeSet<VarId>) -> Vec<Valuation> {
    let names: Vec<&VarId> = universe.iter().collect();
    (0u32..1 << names.len())
        .map(|m| Valuation::new(names.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, v)| (*v).clone())))
        .collect()
}

#[test]
fn components() {
    let two = DnfFormula::from_names(&[&["x", "y"], &["u", "w"]]);
    assert_eq!(independent_components(&two).len(), 2);
    let three = DnfFormula::from_names(&[&["x"], &["y"], &["z"]]);
    assert_eq!(independent_components(&three).len(), 3);
    let lifted = lift(&movies());
    assert_eq!(independent_components(&lifted.formula()).len(), 1);
}

#[test]
fn common_vars() {
    let lifted = lift(&movies());
    assert_eq!(common_variables(&lifted.formula()), vars(&["d1|d2"]));
    assert_eq!(common_variables(&DnfFormula::from_names(&[&["x", "y"], &["y", "z"]])), vars(&["y"]));
    assert!(common_variables(&DnfFormula::from_names(&[&["x"], &["y"]])).is_empty());
}

#[test]
fn read_once_expansion() {
    let or = ReadOnce::Or(vec![ReadOnce::Var("d1".into()), ReadOnce::Var("d2".into())]);
    assert_eq!(expand_readonce(&or).to_string(), "or(d1,d2)");
    assert_eq!(expand_readonce(&ReadOnce::Var("x".into())).to_string(), "x");
    let nested = ReadOnce::And(vec![ReadOnce::Var("a".into()), or]);
    assert_eq!(expand_readonce(&nested).to_string(), "and(a,or(d1,d2))");
}

#[test]
fn movie_tree() {
    let t = lifted_compile(&movies());
    assert_eq!(t.to_string(), "and(or(d1,d2),shannon(or(a1,a3),or(m2,m3),and(a2,m3)))");
    let s = t.stats();
    assert_eq!((s.size, s.dag_size, s.var_count, s.depth), (14, 13, 7, 4));
    assert_eq!(s.histogram["var"], 8);
    assert_eq!(s.histogram["shannon"], 1);
}

#[test]
fn small_shapes() {
    let x = lifted_compile(&DnfFormula::from_names(&[&["x"]]));
    assert_eq!(x.to_string(), "x");
    assert_eq!((x.stats().size, x.stats().depth), (1, 1));
    let xy = lifted_compile(&DnfFormula::from_names(&[&["x"], &["y"]]));
    assert_eq!(xy.to_string(), "or(x,y)");
    assert_eq!(xy.stats().size, 3);
    let phi = DnfFormula::from_names(&[&["x", "y"], &["u", "w"]]);
    let t = compile_dnf(&phi, &CompileOptions::without_lifting()).unwrap();
    assert_eq!(t.to_string(), "or(and(u,w),and(x,y))");
    for v in every_valuation(phi.universe()) {
        assert_eq!(t.eval(&v), phi.eval(&v).unwrap());
    }
}

#[test]
fn aggregate_shapes() {
    let x5 = BnpExpression::from_names(MonoidKind::Max, &[(&[&["x"]], 5)]);
    assert_eq!(compile_aggregate(&x5).unwrap().to_string(), "mul(x,5)");
    let ab = BnpExpression::from_names(MonoidKind::Max, &[(&[&["a1", "b1"]], 3), (&[&["a1", "b2"]], 7)]);
    assert_eq!(compile_aggregate(&ab).unwrap().to_string(), "mul(a1,or(mul(b1,3),mul(b2,7)))");
    let sum = BnpExpression::from_names(MonoidKind::Sum, &[(&[&["x"]], 5)]);
    assert!(compile_aggregate(&sum).is_err());
}

#[test]
fn builder_rejects_shared_variables() {
    let mut b = DTreeBuilder::new();
    let x = b.var("x");
    let y = b.var("y");
    let xy = b.and(vec![x, y]).unwrap();
    assert!(b.or(vec![xy, x]).is_err());
    assert!(b.shannon(x, x, y).is_err());
}

#[test]
fn equivalence_on_random_corpus() {
    for seed in 0..120 {
        let phi = random_dnf(seed);
        for opts in [CompileOptions::default(), CompileOptions::without_lifting()] {
            let t = compile_dnf(&phi, &opts).unwrap();
            t.check_invariants().unwrap();
            for v in every_valuation(phi.universe()) {
                assert_eq!(t.eval(&v), phi.eval(&v).unwrap(), "seed {seed}");
            }
        }
    }
    for seed in 0..80 {
        let m = if seed % 2 == 0 { MonoidKind::Max } else { MonoidKind::Min };
        let phi = random_bnp(m, seed);
        let t = compile_aggregate(&phi).unwrap();
        t.check_invariants().unwrap();
        for v in every_valuation(phi.universe()) {
            assert_eq!(t.eval_outcome(&v), phi.eval_outcome(&v).unwrap(), "seed {seed}");
        }
    }
}

#[test]
fn deterministic() {
    for seed in 0..20 {
        let phi = random_dnf(seed);
        assert_eq!(lifted_compile(&phi).to_string(), lifted_compile(&phi).to_string());
    }
}

#[test]
fn lifting_never_grows_the_tree() {
    for seed in 0..40 {
        let params = GeneratorParams { vars: 6, clauses: 4, width: 3, duplication: 2 + (seed as usize % 2), seed, ..Default::default() };
        let Lineage::Dnf(phi) = generate(&params).unwrap().to_lineage().unwrap() else { panic!("boolean generator") };
        let lifted = compile_dnf(&phi, &CompileOptions::default()).unwrap().stats().size;
        let plain = compile_dnf(&phi, &CompileOptions::without_lifting()).unwrap().stats().size;
        assert!(lifted <= plain, "seed {seed}: {lifted} > {plain}");
    }
}

#[test]
fn deadline_reports_timeout() {
    let opts = CompileOptions { deadline: Some(std::time::Instant::now()), ..CompileOptions::default() };
    let phi = random_dnf(3);
    match compile_dnf(&phi, &opts) {
        Err(liftattr::Error::Timeout) | Ok(_) => {}
        Err(e) => panic!("unexpected {e}"),
    }
}

#[test]
fn constant_results() {
    let t = DnfFormula::from_names(&[&["x"]]).substitute(&VarId::from("x"), true);
    let tree = compile_dnf(&t, &CompileOptions::default()).unwrap();
    assert!(matches!(tree.node(tree.root()).kind, NodeKind::Const(true)));
}
