//! Banzhaf and Shapley values from d-trees.
//!
//! Node quantities at the all-½ point are kept as integer counts over the
//! node's own variables. With size resolution they become polynomials in z
//! whose coefficient k counts valuations with k true variables. The backward
//! pass carries, for every node, the difference between the derivatives of
//! the root count with respect to the node's model and non-model counts;
//! summed over the leaves of x it is #φ[x:=1] − #φ[x:=0] (per size k).

mod aggregate;
mod gradient;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use aggregate::{
    linear_aggregate_attribution, minmax_attribution_counts, minmax_gradient, value_counts, OutcomeDistribution,
};
pub use gradient::{
    banzhaf_by_substitution, gradient_banzhaf, gradient_shapley, node_annotations, occurrence_annotations, NodeAnnotation,
    Occurrence,
};

use crate::error::{Error, Result};
use crate::lineage::VarId;
use crate::num::{factorial, Poly};

/// Which attribution measure to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Banzhaf,
    Shapley,
}

/// C[k] = k!(n−k−1)!/n! for k = 0..n−1.
pub fn shapley_coefficients(n: usize) -> Result<Vec<BigRational>> {
    if n == 0 {
        return Err(Error::input("Shapley coefficients need at least one variable"));
    }
    let nf = factorial(n);
    Ok((0..n)
        .map(|k| BigRational::new(factorial(k) * factorial(n - k - 1), nf.clone()))
        .collect())
}

/// Σ_k C[k]·δ_k.
pub(crate) fn shapley_from_delta(delta: &Poly, coeffs: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (k, c) in delta.0.iter().enumerate() {
        if !c.is_zero() {
            acc += &coeffs[k] * BigRational::from_integer(c.clone());
        }
    }
    acc
}

pub(crate) fn check_universe(tree_vars: &[VarId], universe: &BTreeSet<VarId>) -> Result<()> {
    match tree_vars.iter().find(|v| !universe.contains(*v)) {
        Some(v) => Err(Error::input(format!("tree variable {v} is outside the universe"))),
        None => Ok(()),
    }
}

pub(crate) fn zero_map<T: Clone>(universe: &BTreeSet<VarId>, zero: T) -> BTreeMap<VarId, T> {
    universe.iter().map(|v| (v.clone(), zero.clone())).collect()
}

pub(crate) fn int(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}
