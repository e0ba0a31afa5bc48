//! Run the bundled benchmark suite in-process and print the report
//! table: each workload in scalar form and, where defined, in-memory
//! form, with instruction counts, cycles, and data-access totals.
//!
//! Run with: cargo run --example bench_suite

use std::path::Path;

use limsim::bench::run_suite;
use limsim::cli::format_bench_table;

fn main() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR")).join("benchmarks/manifest.txt");
    match run_suite(&manifest) {
        Ok(outcomes) => {
            print!("{}", format_bench_table(&outcomes));
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed > 0 {
                eprintln!("{failed} variant(s) failed verification");
                std::process::exit(1);
            }
        }
        Err(err) => {
            eprintln!("suite error: {err}");
            std::process::exit(1);
        }
    }
}
