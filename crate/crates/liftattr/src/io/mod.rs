//! File formats, reports, instance generation, DOT export and the run/bench
//! drivers behind the command-line tool.

pub mod bench;
pub mod dot;
pub mod format;
pub mod generate;
pub mod report;
pub mod run;

pub use bench::{bench_csv, corpus_files, percentiles, resolve_jobs, run_bench, BenchRow, Percentiles};
pub use dot::{dot_export, to_dot};
pub use format::{load_lineage, parse_dnf_text, parse_json, save_lineage, LineageFile, TermFile};
pub use generate::{generate, GeneratorParams};
pub use report::{write_report, AttributionReport, ReportFormat};
pub use run::{compile_lineage, run_attribution, Method, RunConfig};
