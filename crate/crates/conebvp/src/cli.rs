//! Command-line pipeline.
//!
//! ```text
//! conebvp <classify|solve|verify|limits|probe> --config <path>
//!         [--out-csv <path>] [--out-report <path>] [--panels m,n] [--seed <int>]
//! ```
//!
//! The environment variable `CONEBVP_SEED` overrides `--seed`. Exit codes:
//! 0 success, 2 configuration error, 3 solver non-convergence, 4 check
//! failure, 5 expression error.

use crate::checks::{
    admissible_suite, check_hypotheses, estimate_limits, nonexistence_probe, nonexistence_suite,
    proof_constants,
};
use crate::config::{load_config, ConfigError, RunConfig};
use crate::grid::{GridFunction, Mesh};
use crate::problem::Region;
use crate::report::{write_csv, write_report, ErrorRecord, RunReport, SolveSummary, SuiteBundle};
use crate::solver::{solve, SolveError, SolveReport};
use clap::{Parser, Subcommand};
use std::path::PathBuf;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NO_CONVERGENCE: u8 = 3;
pub const EXIT_CHECK_FAILED: u8 = 4;
pub const EXIT_EXPR: u8 = 5;

const DEFAULT_SEED: u64 = 0;
const SUITE_SAMPLES_ADMISSIBLE: usize = 200;
const SUITE_SAMPLES_NONEXISTENCE: usize = 100;
const SUITE_PANELS: usize = 64;

#[derive(Parser, Debug)]
#[command(
    name = "conebvp",
    about = "Solve and certify second-order boundary value problems with \
             three-point integral boundary conditions",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Path to the JSON problem configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the solution CSV here (overrides the config's output.csv).
    #[arg(long, global = true)]
    pub out_csv: Option<PathBuf>,
    /// Write the JSON report here (overrides the config's output.report).
    #[arg(long, global = true)]
    pub out_report: Option<PathBuf>,
    /// Override the panel counts, e.g. `--panels 400,400`.
    #[arg(long, global = true, value_parser = parse_panels)]
    pub panels: Option<(usize, usize)>,
    /// Seed for the randomized verification suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Print the parameter-region classification.
    Classify,
    /// Run the configured solver; write the CSV and report.
    Solve,
    /// Solve, then run every check plus the randomized property suites.
    Verify,
    /// Print the growth classification of f.
    Limits,
    /// Certify nonexistence for this instance (requires alpha above its
    /// bound); uses y = a as the probe forcing.
    Probe,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Solve => "solve",
            Command::Verify => "verify",
            Command::Limits => "limits",
            Command::Probe => "probe",
        }
    }
}

fn parse_panels(text: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err("expected `m,n`".into());
    }
    let m = parts[0].trim().parse().map_err(|e| format!("m: {e}"))?;
    let n = parts[1].trim().parse().map_err(|e| format!("n: {e}"))?;
    Ok((m, n))
}

fn config_exit_code(e: &ConfigError) -> u8 {
    match e {
        ConfigError::Expr { .. } => EXIT_EXPR,
        _ => EXIT_CONFIG,
    }
}

fn solve_exit_code(e: &SolveError) -> u8 {
    match e {
        SolveError::Eval { .. } | SolveError::NonDifferentiable(_) => EXIT_EXPR,
        SolveError::SingularJacobian { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_CONFIG,
    }
}

fn record_error(report: &mut RunReport, kind: &str, message: String) {
    report.error = Some(ErrorRecord {
        kind: kind.into(),
        message,
    });
}

struct Artifacts {
    csv: Option<PathBuf>,
    report: Option<PathBuf>,
}

fn finish(report: &RunReport, paths: &Artifacts, solution: Option<&GridFunction>, code: u8) -> u8 {
    if let Some(path) = &paths.csv {
        if let Some(solution) = solution {
            if let Err(e) = write_csv(path, solution) {
                eprintln!("error: cannot write csv {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        }
    }
    if let Some(path) = &paths.report {
        if let Err(e) = write_report(path, report) {
            eprintln!("error: cannot write report {}: {e}", path.display());
            return EXIT_CONFIG;
        }
    }
    code
}

/// Parses the seed: environment beats the flag, flag beats the default.
fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    match std::env::var("CONEBVP_SEED") {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|e| format!("CONEBVP_SEED=`{text}` is not a u64: {e}")),
        Err(std::env::VarError::NotPresent) => Ok(flag.unwrap_or(DEFAULT_SEED)),
        Err(e) => Err(format!("CONEBVP_SEED: {e}")),
    }
}

pub fn execute(cli: Cli) -> u8 {
    let mut report = RunReport::new(cli.command.name());
    let paths = Artifacts {
        csv: cli.out_csv.clone(),
        report: cli.out_report.clone(),
    };

    let seed = match resolve_seed(cli.seed) {
        Ok(seed) => seed,
        Err(msg) => {
            eprintln!("error: {msg}");
            record_error(&mut report, "config", msg);
            return finish(&report, &paths, None, EXIT_CONFIG);
        }
    };

    let Some(config_path) = &cli.config else {
        let msg = "missing required --config <path>".to_string();
        eprintln!("error: {msg}");
        record_error(&mut report, "config", msg);
        return finish(&report, &paths, None, EXIT_CONFIG);
    };

    let mut config = match load_config(config_path) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            let code = config_exit_code(&e);
            record_error(
                &mut report,
                if code == EXIT_EXPR { "expression" } else { "config" },
                e.to_string(),
            );
            return finish(&report, &paths, None, code);
        }
    };
    if let Some((m, n)) = cli.panels {
        config.solver.m = m;
        config.solver.n = n;
    }
    let paths = Artifacts {
        csv: cli.out_csv.or(config.csv_path.clone()),
        report: cli.out_report.or(config.report_path.clone()),
    };

    match cli.command {
        Command::Classify => run_classify(&config, report, &paths),
        Command::Limits => run_limits(&config, report, &paths),
        Command::Probe => run_probe(&config, report, &paths),
        Command::Solve => run_solve(&config, report, &paths, false, seed),
        Command::Verify => run_solve(&config, report, &paths, true, seed),
    }
}

fn run_classify(config: &RunConfig, mut report: RunReport, paths: &Artifacts) -> u8 {
    let c = config.spec.classify();
    println!("region: {}", c.region);
    println!("denominator D = {}", c.denominator);
    println!("alpha bound 2T/eta^2 = {}", c.alpha_bound);
    println!("beta bound = {}", c.beta_bound);
    match c.gamma {
        Some(g) => println!("cone constant gamma = {g}"),
        None => println!("cone constant gamma: not defined outside the admissible region"),
    }
    report.classification = Some(c);
    finish(&report, paths, None, EXIT_OK)
}

fn run_limits(config: &RunConfig, mut report: RunReport, paths: &Artifacts) -> u8 {
    let estimate = estimate_limits(config.spec.f());
    println!(
        "f(u)/u near zero: {:?}; near infinity: {:?}; verdict: {:?}",
        estimate.f0_class, estimate.finf_class, estimate.verdict
    );
    for e in &estimate.errors {
        eprintln!("note: {e}");
    }
    report.limits = Some(estimate);
    finish(&report, paths, None, EXIT_OK)
}

fn run_probe(config: &RunConfig, mut report: RunReport, paths: &Artifacts) -> u8 {
    let classification = config.spec.classify();
    let region = classification.region;
    report.classification = Some(classification);
    if region != Region::NoPositiveSolution {
        let msg = format!(
            "probe requires alpha > 2T/eta^2 (region NoPositiveSolutionRegion), got {region}"
        );
        eprintln!("error: {msg}");
        record_error(&mut report, "config", msg);
        return finish(&report, paths, None, EXIT_CONFIG);
    }
    let mesh = match Mesh::build(
        config.spec.t_end(),
        config.spec.eta(),
        config.solver.m,
        config.solver.n,
    ) {
        Ok(mesh) => mesh,
        Err(e) => {
            eprintln!("error: {e}");
            record_error(&mut report, "config", e.to_string());
            return finish(&report, paths, None, EXIT_CONFIG);
        }
    };
    let mut values = Vec::with_capacity(mesh.len());
    for &t in mesh.nodes() {
        match config.spec.a().eval(t) {
            Ok(v) => values.push(v),
            Err(e) => {
                eprintln!("error: {e}");
                record_error(&mut report, "expression", e.to_string());
                return finish(&report, paths, None, EXIT_EXPR);
            }
        }
    }
    let y = match GridFunction::from_values(mesh, values) {
        Ok(y) => y,
        Err(e) => {
            eprintln!("error: {e}");
            record_error(&mut report, "config", e.to_string());
            return finish(&report, paths, None, EXIT_CONFIG);
        }
    };
    match nonexistence_probe(&config.spec, &y) {
        Ok(result) => {
            let code = if result.passed { EXIT_OK } else { EXIT_CHECK_FAILED };
            println!(
                "nonexistence probe: {} ({})",
                if result.passed { "pass" } else { "fail" },
                result.detail
            );
            report.probe = Some(result);
            finish(&report, paths, None, code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            record_error(&mut report, "config", e.to_string());
            finish(&report, paths, None, EXIT_CONFIG)
        }
    }
}

fn run_solve(
    config: &RunConfig,
    mut report: RunReport,
    paths: &Artifacts,
    verify: bool,
    seed: u64,
) -> u8 {
    report.classification = Some(config.spec.classify());
    let solve_report: SolveReport = match solve(&config.spec, &config.solver) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            let code = solve_exit_code(&e);
            let kind = match code {
                x if x == EXIT_EXPR => "expression",
                x if x == EXIT_NO_CONVERGENCE => "solver",
                _ => "config",
            };
            record_error(&mut report, kind, e.to_string());
            return finish(&report, paths, None, code);
        }
    };

    report.solve = Some(SolveSummary::from_report(&solve_report));
    report.checks = solve_report.checks.clone();
    report.constants = solve_report.constants;
    report.limits = Some(estimate_limits(config.spec.f()));

    println!(
        "solver: {:?}, outcome {:?} after {} iterations (start {})",
        config.solver.method, solve_report.outcome, solve_report.iterations, solve_report.init_used
    );
    println!(
        "sup norm {}, residuals: ode {:.3e}, bc0 {:.3e}, bcT {:.3e}, fixed point {:.3e}",
        solve_report.solution.sup_norm(),
        solve_report.residuals.ode_sup,
        solve_report.residuals.bc0,
        solve_report.residuals.bc_t,
        solve_report.residuals.fixed_point
    );
    for c in &solve_report.checks {
        println!(
            "check {}: {} (margin {:.3e})",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.margin
        );
    }

    let mut checks_pass = solve_report.checks.iter().all(|c| c.passed);

    if verify {
        report.seed = Some(seed);
        let hyp = check_hypotheses(&config.spec);
        if !hyp.passed {
            checks_pass = false;
        }
        if config.spec.classify().region == Region::Admissible {
            if let Ok(mesh) = Mesh::build(
                config.spec.t_end(),
                config.spec.eta(),
                config.solver.m,
                config.solver.n,
            ) {
                report.constants = proof_constants(&config.spec, &mesh).ok();
            }
        }
        let adm = admissible_suite(SUITE_SAMPLES_ADMISSIBLE, seed, SUITE_PANELS, SUITE_PANELS);
        let nonex =
            nonexistence_suite(SUITE_SAMPLES_NONEXISTENCE, seed, SUITE_PANELS, SUITE_PANELS);
        for (name, outcome) in [
            ("positivity", &adm.positivity),
            ("cone bound", &adm.cone),
            ("concavity", &adm.concavity),
            ("nonexistence", &nonex),
        ] {
            println!(
                "suite {name}: {}/{} pass (worst margin {:.3e})",
                outcome.samples - outcome.failures,
                outcome.samples,
                outcome.worst_margin
            );
            if !outcome.passed() {
                checks_pass = false;
            }
        }
        report.suites = Some(SuiteBundle {
            positivity: adm.positivity,
            cone: adm.cone,
            concavity: adm.concavity,
            nonexistence: nonex,
        });
    }

    let code = if !solve_report.converged {
        eprintln!("solver did not converge: {:?}", solve_report.outcome);
        EXIT_NO_CONVERGENCE
    } else if !checks_pass {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    };
    finish(&report, paths, Some(&solve_report.solution), code)
}
