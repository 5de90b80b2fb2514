//! Exact Shapley values, checked against efficiency: they sum to the query
//! result on the full database minus the result on the empty one.

use liftattr::attribution::{gradient_shapley, shapley_coefficients};
use liftattr::compile::lifted_compile;
use liftattr::num::{format_rational, rational_to_f64};
use liftattr::DnfFormula;
use num_rational::BigRational;

fn main() -> liftattr::Result<()> {
    let phi = DnfFormula::from_names(&[
        &["d1", "a1", "m3"], &["d1", "a1", "m2"], &["d1", "a3", "m3"], &["d1", "a2", "m3"], &["d1", "a3", "m2"],
        &["d2", "a1", "m3"], &["d2", "a1", "m2"], &["d2", "a3", "m3"], &["d2", "a2", "m3"], &["d2", "a3", "m2"],
    ]);
    let n = phi.universe().len();
    let c: Vec<String> = shapley_coefficients(n)?.iter().map(|x| x.to_string()).collect();
    println!("coefficients for n = {n}: [{}]", c.join(", "));

    let tree = lifted_compile(&phi);
    let values = gradient_shapley(&tree, phi.universe())?;
    let mut total = BigRational::from_integer(0.into());
    for (x, v) in &values {
        println!("  {x:>3}  {:>6}  ({:.6})", v.to_string(), rational_to_f64(v));
        total += v;
    }
    println!("sum = {}", format_rational(&total));
    assert_eq!(total, BigRational::from_integer(1.into()));
    Ok(())
}
