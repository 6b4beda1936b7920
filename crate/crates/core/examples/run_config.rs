//! Runs a JSON experiment config and prints the resulting CSV.
//!
//! cargo run --example run_config -- crates/core/configs/plan.json

use twi::harness::{load_config, run_experiment, RunOptions};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/analytic.json").to_owned());
    let mut cfg = match load_config(&path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    };
    cfg.output_path = std::env::temp_dir().join("twi-run-config").display().to_string();
    match run_experiment(&cfg, &RunOptions::default()) {
        Ok(report) => {
            print!("{}", report.table.to_csv_string());
            eprintln!("written to {}", report.csv_path.display());
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
