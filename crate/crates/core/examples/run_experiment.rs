//! Drive a config file through the same path as `gwc experiment`.
//!
//! cargo run --release --example run_experiment -- examples/configs/critical_conductance.toml

use std::path::PathBuf;

use gwc::cli::{cmd_experiment, ExperimentArgs};

fn main() {
    let config = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/critical_conductance.toml")));
    let out = std::env::temp_dir().join("gwc-example");
    let args = ExperimentArgs { config, out: Some(out), no_plot: false };
    match cmd_experiment(&args, &mut std::io::stdout().lock()) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(gwc::cli::exit_code(&e));
        }
    }
}
