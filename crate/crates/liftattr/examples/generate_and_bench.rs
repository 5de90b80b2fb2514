//! Generate a small corpus with symmetric copies, then benchmark it with and
//! without lifting.

use liftattr::io::{bench_csv, corpus_files, generate, run_bench, GeneratorParams, RunConfig};

fn main() -> liftattr::Result<()> {
    let dir = std::env::temp_dir().join(format!("liftattr-corpus-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    for seed in 0..12 {
        let p = GeneratorParams { vars: 6, clauses: 5, width: 3, duplication: 2 + seed as usize % 3, seed, ..Default::default() };
        std::fs::write(dir.join(format!("gen_{seed:03}.json")), generate(&p)?.to_json())?;
    }
    let files = corpus_files(&dir)?;
    for lift in [true, false] {
        let cfg = RunConfig { lift, ..RunConfig::default() };
        let rows = run_bench(&files, &cfg, 4)?;
        println!("# lifting {}", if lift { "on" } else { "off" });
        print!("{}", bench_csv(&rows)?);
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
