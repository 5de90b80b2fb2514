//! Attribution reports as CSV or JSON.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::dtree::TreeStats;
use crate::error::{Error, Result};
use crate::lineage::VarId;
use crate::num::{format_rational, rational_to_f64};

/// Exact per-variable values plus run metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributionReport {
    pub instance: String,
    pub method: String,
    pub lifted: bool,
    pub variables: Vec<VarId>,
    /// Integers for Boolean lineage, rationals for aggregates.
    #[serde(with = "rational_map")]
    pub banzhaf: BTreeMap<VarId, BigRational>,
    #[serde(with = "rational_map")]
    pub shapley: BTreeMap<VarId, BigRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<TreeStats>,
    #[serde(default)]
    pub timings_ms: BTreeMap<String, f64>,
}

mod rational_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<VarId, BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let text: BTreeMap<&VarId, String> = m.iter().map(|(k, v)| (k, format_rational(v))).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<VarId, BigRational>, D::Error> {
        let text = BTreeMap::<VarId, String>::deserialize(d)?;
        text.into_iter()
            .map(|(k, v)| crate::num::parse_rational(&v).map(|r| (k, r)).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Result<ReportFormat> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::input(format!("unknown report format {s:?}"))),
        }
    }
}

impl AttributionReport {
    /// `variable,banzhaf,shapley_num,shapley_den,shapley_float`; the float
    /// column is display-only.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["variable", "banzhaf", "shapley_num", "shapley_den", "shapley_float"])
            .map_err(csv_err)?;
        for v in &self.variables {
            let b = self.banzhaf.get(v).map(format_rational).unwrap_or_default();
            let (num, den, fl) = match self.shapley.get(v) {
                Some(s) => (s.numer().to_string(), s.denom().to_string(), format!("{}", rational_to_f64(s))),
                None => Default::default(),
            };
            w.write_record([v.as_str(), &b, &num, &den, &fl]).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn from_json(text: &str) -> Result<AttributionReport> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => Ok(self.to_json()),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

pub fn write_report(report: &AttributionReport, format: ReportFormat, path: &Path) -> Result<()> {
    std::fs::write(path, report.render(format)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> AttributionReport {
        let x = VarId::from("x");
        let y = VarId::from("y");
        AttributionReport {
            instance: "t".into(),
            method: "gradient".into(),
            lifted: true,
            variables: vec![x.clone(), y.clone()],
            banzhaf: BTreeMap::from([(x.clone(), BigRational::from_integer(3.into())), (y.clone(), BigRational::new(1.into(), 3.into()))]),
            shapley: BTreeMap::from([(x, BigRational::new(2.into(), 3.into()))]),
            stats: None,
            timings_ms: BTreeMap::from([("total".to_string(), 0.125)]),
        }
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        assert_eq!(AttributionReport::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn csv_rows() {
        let csv = sample().to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "variable,banzhaf,shapley_num,shapley_den,shapley_float");
        assert!(lines[1].starts_with("x,3,2,3,0.666"));
        assert_eq!(lines[2], "y,1/3,,,");
    }
}
