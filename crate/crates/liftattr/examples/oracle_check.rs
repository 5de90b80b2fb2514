//! Cross-check the compiled methods against exhaustive enumeration on random
//! instances from the generator.

use liftattr::attribution::{gradient_banzhaf, gradient_shapley, minmax_gradient, Measure};
use liftattr::compile::{compile_aggregate, lifted_compile};
use liftattr::io::{generate, GeneratorParams};
use liftattr::oracle::{brute_banzhaf_all, brute_counts, brute_shapley_all, DEFAULT_CAP};
use liftattr::{Lineage, MonoidKind};
use num_rational::BigRational;

fn main() -> liftattr::Result<()> {
    let mut checked = 0;
    for seed in 0..40 {
        let monoid = [None, Some(MonoidKind::Max), Some(MonoidKind::Min)][seed as usize % 3];
        let p = GeneratorParams { vars: 9, clauses: 6, width: 3, monoid, values: Some((1, 9)), seed, ..Default::default() };
        let psi = generate(&p)?.to_lineage()?;
        let (b, s) = match &psi {
            Lineage::Dnf(phi) => {
                let t = lifted_compile(phi);
                let b = gradient_banzhaf(&t, phi.universe())?.into_iter().map(|(k, v)| (k, BigRational::from_integer(v))).collect();
                (b, gradient_shapley(&t, phi.universe())?)
            }
            Lineage::Aggregate(e) => {
                let t = compile_aggregate(e)?;
                (minmax_gradient(&t, e.universe(), Measure::Banzhaf)?, minmax_gradient(&t, e.universe(), Measure::Shapley)?)
            }
        };
        assert_eq!(b, brute_banzhaf_all(&psi, DEFAULT_CAP)?, "seed {seed}");
        assert_eq!(s, brute_shapley_all(&psi, DEFAULT_CAP)?, "seed {seed}");
        checked += 1;
    }
    println!("{checked} instances agree with enumeration");

    let x_or_y = liftattr::DnfFormula::from_names(&[&["x"], &["y"]]);
    let c = brute_counts(&Lineage::Dnf(x_or_y), DEFAULT_CAP)?;
    println!("x ∨ y: {} models, by size {:?}", c.model_count, c.k_counts);
    Ok(())
}
