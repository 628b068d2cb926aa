//! Drives the CLI pipeline in-process on a shipped fixture: classify,
//! solve with CSV + report artifacts, and the nonexistence probe.
//!
//! Run with `cargo run --example cli_pipeline`.

use conebvp::cli::{execute, Cli, Command};
use std::path::{Path, PathBuf};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(command: Command, config: &str, csv: Option<PathBuf>, report: Option<PathBuf>) -> u8 {
    execute(Cli {
        command,
        config: Some(fixture(config)),
        out_csv: csv,
        out_report: report,
        panels: Some((100, 100)),
        seed: Some(7),
    })
}

fn main() {
    let dir = std::env::temp_dir().join("conebvp_cli_pipeline");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let csv = dir.join("solution.csv");
    let report = dir.join("report.json");

    println!("== classify ==");
    let code = run(Command::Classify, "superlinear_p2.json", None, None);
    println!("exit code {code}\n");

    println!("== solve ==");
    let code = run(
        Command::Solve,
        "superlinear_p2.json",
        Some(csv.clone()),
        Some(report.clone()),
    );
    println!("exit code {code}");
    println!("wrote {} and {}\n", csv.display(), report.display());

    println!("== probe ==");
    let code = run(Command::Probe, "nonexistence_probe.json", None, None);
    println!("exit code {code}");
}
