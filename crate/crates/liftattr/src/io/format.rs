//! Lineage files: JSON (`dnf` or `aggregate`) and the line-oriented `.dnf` text form.

use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lineage::{BnpExpression, Clause, DnfFormula, Lineage, MonoidKind, VarId};
use crate::num::{format_rational, parse_rational};

/// On-disk lineage instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum LineageFile {
    Dnf {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        variables: Option<Vec<String>>,
        clauses: Vec<Vec<String>>,
    },
    Aggregate {
        monoid: MonoidKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        variables: Option<Vec<String>>,
        terms: Vec<TermFile>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub clauses: Vec<Vec<String>>,
    /// Decimal string; JSON numbers are accepted too. COUNT may omit it.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "value_text")]
    pub value: Option<String>,
}

mod value_text {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<String>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(t) => s.serialize_str(t),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
        match Option::<serde_json::Value>::deserialize(d)? {
            None => Ok(None),
            Some(serde_json::Value::String(s)) => Ok(Some(s)),
            Some(serde_json::Value::Number(n)) => Ok(Some(n.to_string())),
            Some(other) => Err(serde::de::Error::custom(format!("value must be a decimal string, got {other}"))),
        }
    }
}

/// Names are `[A-Za-z0-9_.:-]+`; in particular the lift separators never occur.
pub fn valid_var_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | ':' | '-'))
}

fn var(name: &str, ctx: &str) -> Result<VarId> {
    if valid_var_name(name) {
        Ok(VarId::from(name))
    } else {
        Err(Error::input(format!("{ctx}: invalid variable name {name:?}")))
    }
}

fn clauses_of(raw: &[Vec<String>], ctx: &str) -> Result<Vec<Clause>> {
    raw.iter()
        .enumerate()
        .map(|(i, c)| {
            let here = format!("{ctx} clause {}", i + 1);
            if c.is_empty() {
                return Err(Error::input(format!("{here} is empty")));
            }
            let vars = c.iter().map(|n| var(n, &here)).collect::<Result<Vec<_>>>()?;
            Ok(Clause::new(vars))
        })
        .collect()
}

fn universe_of(vars: &Option<Vec<String>>) -> Result<Option<BTreeSet<VarId>>> {
    vars.as_ref()
        .map(|vs| vs.iter().map(|n| var(n, "variables")).collect::<Result<BTreeSet<_>>>())
        .transpose()
}

impl LineageFile {
    /// Validate and convert to an in-memory, canonical instance.
    pub fn to_lineage(&self) -> Result<Lineage> {
        match self {
            LineageFile::Dnf { variables, clauses } => {
                let cs = clauses_of(clauses, "dnf")?;
                Ok(Lineage::Dnf(DnfFormula::new(cs, universe_of(variables)?)?.canonicalize()))
            }
            LineageFile::Aggregate { monoid, variables, terms } => {
                let mut ts = Vec::with_capacity(terms.len());
                for (i, t) in terms.iter().enumerate() {
                    let ctx = format!("term {}", i + 1);
                    let value = match (&t.value, monoid) {
                        (None, MonoidKind::Count) => parse_rational("1")?,
                        (None, _) => return Err(Error::input(format!("{ctx} has no value"))),
                        (Some(v), _) => parse_rational(v).map_err(|e| Error::input(format!("{ctx}: {e}")))?,
                    };
                    if t.clauses.is_empty() {
                        return Err(Error::input(format!("{ctx} has no clauses")));
                    }
                    ts.push((clauses_of(&t.clauses, &ctx)?, value));
                }
                Ok(Lineage::Aggregate(BnpExpression::new(*monoid, ts, universe_of(variables)?)?))
            }
        }
    }

    /// File representation of an instance (explicit universe included).
    pub fn from_lineage(l: &Lineage) -> LineageFile {
        let names = |cs: &[Clause]| -> Vec<Vec<String>> {
            cs.iter().map(|c| c.vars().iter().map(|v| v.to_string()).collect()).collect()
        };
        let variables = Some(l.universe().iter().map(|v| v.to_string()).collect());
        match l {
            Lineage::Dnf(f) => LineageFile::Dnf { variables, clauses: names(f.clauses()) },
            Lineage::Aggregate(e) => LineageFile::Aggregate {
                monoid: e.monoid(),
                variables,
                terms: e
                    .terms()
                    .iter()
                    .map(|t| TermFile {
                        clauses: names(t.formula.clauses()),
                        value: (e.monoid() != MonoidKind::Count).then(|| format_rational(&t.value)),
                    })
                    .collect(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }
}

/// Parse JSON lineage text.
pub fn parse_json(text: &str) -> Result<Lineage> {
    let file: LineageFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    file.to_lineage()
}

/// Parse the `.dnf` text form: one clause per line, whitespace-separated
/// variables; blank lines and `#` comments are ignored.
pub fn parse_dnf_text(text: &str) -> Result<Lineage> {
    let mut clauses = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        let names: Vec<&str> = body.split_whitespace().collect();
        if names.is_empty() {
            continue;
        }
        let mut vars = Vec::with_capacity(names.len());
        for (col, n) in names.iter().enumerate() {
            if !valid_var_name(n) {
                return Err(Error::Parse {
                    line: i + 1,
                    column: col + 1,
                    message: format!("invalid variable name {n:?}"),
                });
            }
            vars.push(VarId::from(*n));
        }
        clauses.push(Clause::new(vars));
    }
    Ok(Lineage::Dnf(DnfFormula::new(clauses, None)?.canonicalize()))
}

/// Load a lineage file; `-` reads standard input. `.dnf` files use the text
/// form, as does standard input unless it starts with `{`.
pub fn load_lineage(path: &Path) -> Result<Lineage> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path)?
    };
    let stdin_text = path.as_os_str() == "-" && !text.trim_start().starts_with('{');
    if stdin_text || path.extension().is_some_and(|e| e == "dnf") {
        parse_dnf_text(&text)
    } else {
        parse_json(&text)
    }
}

pub fn save_lineage(l: &Lineage, path: &Path) -> Result<()> {
    std::fs::write(path, LineageFile::from_lineage(l).to_json())?;
    Ok(())
}
