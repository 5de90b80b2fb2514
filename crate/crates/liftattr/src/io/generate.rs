//! Seeded synthetic lineage with symmetric variable copies.
//!
//! Every base variable `x{i}` is replaced by `duplication` copies
//! `x{i}_{j}`, and every base clause by the product of its variables' copies.
//! Copies of one base variable are then cofactor-equivalent, which gives the
//! lifting step something to find.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::format::{LineageFile, TermFile};
use crate::error::{Error, Result};
use crate::lineage::MonoidKind;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorParams {
    /// Base variables before duplication.
    pub vars: usize,
    pub clauses: usize,
    /// Maximum base clause size.
    pub width: usize,
    pub duplication: usize,
    /// Inclusive integer range for term values in aggregate mode.
    pub values: Option<(i64, i64)>,
    /// Set for aggregate output; each base clause becomes one term.
    pub monoid: Option<MonoidKind>,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams { vars: 8, clauses: 6, width: 3, duplication: 1, values: None, monoid: None, seed: 0 }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<()> {
        if self.vars == 0 || self.width == 0 || self.duplication == 0 {
            return Err(Error::input("vars, width and duplication must be positive"));
        }
        if self.width > self.vars {
            return Err(Error::input(format!("width {} exceeds vars {}", self.width, self.vars)));
        }
        if let Some((lo, hi)) = self.values {
            if lo > hi {
                return Err(Error::input(format!("empty value range {lo}..{hi}")));
            }
        }
        Ok(())
    }
}

fn copies(base: usize, dup: usize) -> Vec<String> {
    if dup == 1 {
        vec![format!("x{base}")]
    } else {
        (1..=dup).map(|j| format!("x{base}_{j}")).collect()
    }
}

fn expand(base: &[usize], dup: usize) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![Vec::new()];
    for &b in base {
        let cs = copies(b, dup);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                cs.iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(c.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Generate one instance; identical params give an identical file.
pub fn generate(p: &GeneratorParams) -> Result<LineageFile> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut seen = BTreeSet::new();
    let mut bases: Vec<Vec<usize>> = Vec::with_capacity(p.clauses);
    let mut attempts = 0;
    while bases.len() < p.clauses && attempts < 100 * p.clauses.max(1) {
        attempts += 1;
        let w = rng.gen_range(1..=p.width);
        let mut c: Vec<usize> = sample(&mut rng, p.vars, w).into_vec();
        c.sort_unstable();
        if seen.insert(c.clone()) {
            bases.push(c);
        }
    }
    let variables = Some((0..p.vars).flat_map(|b| copies(b, p.duplication)).collect());
    Ok(match p.monoid {
        None => LineageFile::Dnf { variables, clauses: bases.iter().flat_map(|b| expand(b, p.duplication)).collect() },
        Some(monoid) => {
            let (lo, hi) = p.values.unwrap_or((1, 9));
            let terms = bases
                .iter()
                .map(|b| {
                    let v = rng.gen_range(lo..=hi);
                    TermFile {
                        clauses: expand(b, p.duplication),
                        value: (monoid != MonoidKind::Count).then(|| v.to_string()),
                    }
                })
                .collect();
            LineageFile::Aggregate { monoid, variables, terms }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let p = GeneratorParams { vars: 6, clauses: 4, width: 3, duplication: 2, seed: 11, ..Default::default() };
        assert_eq!(generate(&p).unwrap().to_json(), generate(&p).unwrap().to_json());
    }

    #[test]
    fn width_over_vars_rejected() {
        let p = GeneratorParams { vars: 2, width: 3, ..Default::default() };
        assert!(generate(&p).is_err());
    }

    #[test]
    fn product_expansion() {
        assert_eq!(expand(&[0, 1], 2).len(), 4);
        assert_eq!(expand(&[3], 1), vec![vec!["x3".to_string()]]);
    }
}
