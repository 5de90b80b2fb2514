//! Command-line front end. Every error is one `ERROR[<code>]: ...` line on
//! stderr, with exit code 2 (input), 3 (timeout) or 4 (internal).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode as ProcessExit;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use liftattr::attribution::Measure;
use liftattr::compile::CompileOptions;
use liftattr::io::{
    bench_csv, compile_lineage, corpus_files, generate, load_lineage, resolve_jobs, run_attribution, run_bench,
    to_dot, GeneratorParams, Method, ReportFormat, RunConfig,
};
use liftattr::num::format_rational;
use liftattr::oracle::{brute_banzhaf_all, brute_counts, brute_shapley_all, DEFAULT_CAP};
use liftattr::{Error, ExitCode, MonoidKind, Result};

#[derive(Parser)]
#[command(name = "liftattr", version, about = "Exact Banzhaf and Shapley values for lineage")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Banzhaf value of every variable.
    Banzhaf(AttrArgs),
    /// Shapley value of every variable.
    Shapley(AttrArgs),
    /// Compile a lineage into a d-tree.
    Compile(CompileArgs),
    /// Brute-force counts and values by enumeration.
    Oracle(OracleArgs),
    /// Generate synthetic lineage.
    Gen(GenArgs),
    /// Run attribution over a corpus directory and report timings.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Gradient,
    Counts,
    Oracle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Gradient => Method::Gradient,
            MethodArg::Counts => Method::Counts,
            MethodArg::Oracle => Method::Oracle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Banzhaf,
    Shapley,
}

#[derive(Args)]
struct Input {
    /// Lineage file (`-` or absent: standard input).
    #[arg(short = 'i', long = "input")]
    input: Option<PathBuf>,
}

impl Input {
    fn path(&self) -> PathBuf {
        self.input.clone().unwrap_or_else(|| PathBuf::from("-"))
    }

    fn instance(&self) -> String {
        self.input.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "-".to_string())
    }
}

#[derive(Args)]
struct AttrArgs {
    #[command(flatten)]
    input: Input,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long, value_enum, default_value = "gradient")]
    method: MethodArg,
    /// Compile without lifting.
    #[arg(long)]
    no_lift: bool,
    #[arg(long)]
    timeout_secs: Option<u64>,
    /// Report both measures.
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    input: Input,
    /// Write an annotated Graphviz file.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Print size statistics as JSON instead of the tree.
    #[arg(long)]
    stats: bool,
    #[arg(long)]
    no_lift: bool,
    #[arg(long)]
    timeout_secs: Option<u64>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: Input,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 8)]
    vars: usize,
    #[arg(long, default_value_t = 6)]
    clauses: usize,
    #[arg(long, default_value_t = 3)]
    width: usize,
    #[arg(long = "dup", alias = "duplication", default_value_t = 1)]
    duplication: usize,
    /// Inclusive value range for aggregate terms, e.g. `1..9`.
    #[arg(long, value_parser = parse_range)]
    values: Option<(i64, i64)>,
    /// Emit an aggregate lineage under this monoid.
    #[arg(long, value_parser = parse_monoid)]
    monoid: Option<MonoidKind>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    /// Write this many instances (seeds seed, seed+1, ...) into `--dir`.
    #[arg(long)]
    count: Option<u64>,
    #[arg(long)]
    dir: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    dir: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "gradient")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "banzhaf")]
    measure: MeasureArg,
    #[arg(long)]
    no_lift: bool,
    #[arg(long)]
    timeout_secs: Option<u64>,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

fn parse_range(s: &str) -> std::result::Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let lo = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi = b.trim().trim_start_matches('=').parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

fn parse_monoid(s: &str) -> std::result::Result<MonoidKind, String> {
    MonoidKind::parse(s).map_err(|e| e.to_string())
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) if p.as_os_str() != "-" => std::fs::write(p, text)?,
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn timeout(secs: Option<u64>) -> Option<Duration> {
    secs.map(Duration::from_secs)
}

fn attr(a: AttrArgs, measure: Measure) -> Result<()> {
    let lineage = load_lineage(&a.input.path())?;
    let measures = if a.all { vec![Measure::Banzhaf, Measure::Shapley] } else { vec![measure] };
    let cfg = RunConfig { method: a.method.into(), lift: !a.no_lift, timeout: timeout(a.timeout_secs), measures };
    let report = run_attribution(&lineage, &a.input.instance(), &cfg)?;
    let format = match a.format {
        FormatArg::Csv => ReportFormat::Csv,
        FormatArg::Json => ReportFormat::Json,
    };
    emit(a.output.as_deref(), &report.render(format)?)
}

fn compile(a: CompileArgs) -> Result<()> {
    let lineage = load_lineage(&a.input.path())?;
    let opts = CompileOptions {
        lift: !a.no_lift,
        memoize: true,
        deadline: timeout(a.timeout_secs).map(|t| std::time::Instant::now() + t),
    };
    let tree = compile_lineage(&lineage, &opts)?
        .ok_or_else(|| Error::input("SUM and COUNT lineage is attributed term by term; compile each term separately"))?;
    if let Some(path) = &a.dot {
        std::fs::write(path, to_dot(&tree, Some(lineage.universe()))?)?;
    }
    if a.stats {
        emit(None, &(serde_json::to_string_pretty(&tree.stats()).expect("serializable") + "\n"))
    } else {
        emit(None, &format!("{tree}\n"))
    }
}

fn oracle(a: OracleArgs) -> Result<()> {
    let lineage = load_lineage(&a.input.path())?;
    let counts = brute_counts(&lineage, a.cap)?;
    let text = |m: BTreeMap<liftattr::VarId, num_rational::BigRational>| -> BTreeMap<String, String> {
        m.into_iter().map(|(k, v)| (k.to_string(), format_rational(&v))).collect()
    };
    let out = json!({
        "counts": counts,
        "banzhaf": text(brute_banzhaf_all(&lineage, a.cap)?),
        "shapley": text(brute_shapley_all(&lineage, a.cap)?),
    });
    emit(a.output.as_deref(), &(serde_json::to_string_pretty(&out).expect("serializable") + "\n"))
}

fn gen(a: GenArgs) -> Result<()> {
    let params = GeneratorParams {
        vars: a.vars,
        clauses: a.clauses,
        width: a.width,
        duplication: a.duplication,
        values: a.values,
        monoid: a.monoid,
        seed: a.seed,
    };
    match (a.count, &a.dir) {
        (Some(n), Some(dir)) => {
            std::fs::create_dir_all(dir)?;
            for i in 0..n {
                let p = GeneratorParams { seed: a.seed.wrapping_add(i), ..params.clone() };
                std::fs::write(dir.join(format!("gen_{:05}.json", i)), generate(&p)?.to_json())?;
            }
            Ok(())
        }
        (None, None) => emit(a.output.as_deref(), &generate(&params)?.to_json()),
        _ => Err(Error::input("--count and --dir go together")),
    }
}

fn bench(a: BenchArgs) -> Result<()> {
    let measure = match a.measure {
        MeasureArg::Banzhaf => Measure::Banzhaf,
        MeasureArg::Shapley => Measure::Shapley,
    };
    let cfg = RunConfig {
        method: a.method.into(),
        lift: !a.no_lift,
        timeout: timeout(a.timeout_secs),
        measures: vec![measure],
    };
    let files = corpus_files(&a.dir)?;
    if files.is_empty() {
        return Err(Error::input(format!("no .json or .dnf files in {}", a.dir.display())));
    }
    let rows = run_bench(&files, &cfg, resolve_jobs(a.jobs))?;
    emit(a.output.as_deref(), &bench_csv(&rows)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Banzhaf(a) => attr(a, Measure::Banzhaf),
        Cmd::Shapley(a) => attr(a, Measure::Shapley),
        Cmd::Compile(a) => compile(a),
        Cmd::Oracle(a) => oracle(a),
        Cmd::Gen(a) => gen(a),
        Cmd::Bench(a) => bench(a),
    }
}

fn fail(code: ExitCode, msg: &str) -> ProcessExit {
    let line = msg.lines().map(str::trim).filter(|l| !l.is_empty()).collect::<Vec<_>>().join(" ");
    eprintln!("ERROR[{}]: {line}", code as u8);
    ProcessExit::from(code as u8)
}

fn main() -> ProcessExit {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ProcessExit::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            return fail(ExitCode::Input, first);
        }
    };
    std::panic::set_hook(Box::new(|_| {}));
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ProcessExit::SUCCESS,
        Ok(Err(e)) => fail(e.exit_code(), &e.to_string()),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "internal error".to_string());
            fail(ExitCode::Invariant, &format!("internal error: {msg}"))
        }
    }
}
