//! Corpus benchmark: one attribution run per file on a worker pool,
//! per-instance CSV rows plus percentile summary rows.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::format::load_lineage;
use super::run::{run_attribution, RunConfig};
use crate::error::{Error, Result};
use crate::lineage::Lineage;

pub const JOBS_ENV: &str = "ATTR_JOBS";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub vars: Option<usize>,
    pub clauses: Option<usize>,
    pub tree_size: Option<u64>,
    pub dag_size: Option<u64>,
    pub runtime_ms: f64,
    /// `ok`, `timeout` or `error`.
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Percentiles {
    pub p50: f64,
    pub p90: f64,
    pub p95: f64,
    pub p99: f64,
    pub max: f64,
}

/// Nearest-rank percentiles; `None` for an empty sample.
pub fn percentiles(xs: &[f64]) -> Option<Percentiles> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = |q: f64| v[((q * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
    Some(Percentiles { p50: rank(0.5), p90: rank(0.9), p95: rank(0.95), p99: rank(0.99), max: v[v.len() - 1] })
}

/// `--jobs`, else `ATTR_JOBS`, else the number of logical cores.
pub fn resolve_jobs(flag: Option<usize>) -> usize {
    flag.filter(|&j| j > 0)
        .or_else(|| std::env::var(JOBS_ENV).ok().and_then(|s| s.trim().parse().ok()).filter(|&j: &usize| j > 0))
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Lineage files of a corpus directory in name order.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json" || e == "dnf"))
        .collect();
    files.sort();
    Ok(files)
}

fn clause_count(l: &Lineage) -> usize {
    match l {
        Lineage::Dnf(f) => f.clauses().len(),
        Lineage::Aggregate(e) => e.terms().iter().map(|t| t.formula.clauses().len()).sum(),
    }
}

fn bench_one(path: &Path, cfg: &RunConfig) -> BenchRow {
    let instance = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let start = Instant::now();
    let loaded = load_lineage(path);
    let (vars, clauses) = match &loaded {
        Ok(l) => (Some(l.universe().len()), Some(clause_count(l))),
        Err(_) => (None, None),
    };
    let result = loaded.and_then(|l| run_attribution(&l, &instance, cfg));
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let (tree_size, dag_size, status) = match result {
        Ok(r) => (r.stats.as_ref().map(|s| s.size), r.stats.as_ref().map(|s| s.dag_size), "ok"),
        Err(Error::Timeout) => (None, None, "timeout"),
        Err(_) => (None, None, "error"),
    };
    BenchRow { instance, vars, clauses, tree_size, dag_size, runtime_ms, status: status.to_string() }
}

/// Run every instance of `files` on a pool of `jobs` workers. Row order
/// follows `files`.
pub fn run_bench(files: &[PathBuf], cfg: &RunConfig, jobs: usize) -> Result<Vec<BenchRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::invariant(format!("worker pool: {e}")))?;
    Ok(pool.install(|| files.par_iter().map(|p| bench_one(p, cfg)).collect()))
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

/// Rows, then `summary:<stat>` rows over successful instances and a
/// `summary:success` row holding the success rate.
pub fn bench_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let e = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    w.write_record(["instance", "vars", "clauses", "tree_size", "dag_size", "runtime_ms", "status"]).map_err(e)?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            opt(&r.vars),
            opt(&r.clauses),
            opt(&r.tree_size),
            opt(&r.dag_size),
            format!("{:.3}", r.runtime_ms),
            r.status.clone(),
        ])
        .map_err(e)?;
    }
    let ok: Vec<&BenchRow> = rows.iter().filter(|r| r.status == "ok").collect();
    let times: Vec<f64> = ok.iter().map(|r| r.runtime_ms).collect();
    let sizes: Vec<f64> = ok.iter().filter_map(|r| r.tree_size.map(|s| s as f64)).collect();
    if let Some(t) = percentiles(&times) {
        let s = percentiles(&sizes);
        let stats = [("p50", t.p50), ("p90", t.p90), ("p95", t.p95), ("p99", t.p99), ("max", t.max)];
        for (name, tv) in stats {
            let sv = s.as_ref().map(|s| match name {
                "p50" => s.p50,
                "p90" => s.p90,
                "p95" => s.p95,
                "p99" => s.p99,
                _ => s.max,
            });
            w.write_record([
                format!("summary:{name}"),
                String::new(),
                String::new(),
                sv.map(|v| format!("{v}")).unwrap_or_default(),
                String::new(),
                format!("{tv:.3}"),
                String::new(),
            ])
            .map_err(e)?;
        }
    }
    let rate = if rows.is_empty() { 0.0 } else { ok.len() as f64 / rows.len() as f64 };
    w.write_record(["summary:success", "", "", "", "", "", &format!("{rate:.4}")]).map_err(e)?;
    let bytes = w.into_inner().map_err(|err| Error::Io(err.into_error()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank() {
        let xs: Vec<f64> = (1..=100).map(f64::from).collect();
        let p = percentiles(&xs).unwrap();
        assert_eq!((p.p50, p.p90, p.p95, p.p99, p.max), (50.0, 90.0, 95.0, 99.0, 100.0));
        assert_eq!(percentiles(&[3.0]).unwrap().p50, 3.0);
        assert!(percentiles(&[]).is_none());
    }

    #[test]
    fn explicit_jobs_win() {
        assert_eq!(resolve_jobs(Some(3)), 3);
    }
}
