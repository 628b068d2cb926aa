//! The full certification pipeline on one instance: hypothesis screening,
//! solve, solution checks, proof constants, and the randomized suites that
//! exercise positivity, the cone bound, concavity and nonexistence across
//! the parameter space.
//!
//! Run with `cargo run --example verify_claims`.

use conebvp::checks::{admissible_suite, nonexistence_suite};
use conebvp::{
    check_hypotheses, newton_solve, parse_expr, proof_constants, Mesh, ProblemSpec, SolverOptions,
};

fn main() {
    let spec = ProblemSpec::new(
        2.0,
        1.5,
        1.0,
        0.5,
        parse_expr("t", "t").unwrap(),
        parse_expr("u^2", "u").unwrap(),
    )
    .unwrap();

    let hyp = check_hypotheses(&spec);
    println!("hypotheses: {} ({})", if hyp.passed { "pass" } else { "FAIL" }, hyp.detail);

    let opts = SolverOptions {
        m: 200,
        n: 200,
        ..SolverOptions::default()
    };
    let report = newton_solve(&spec, &opts).unwrap();
    println!(
        "solve: {:?}, sup norm {:.6}, fixed-point defect {:.3e}",
        report.outcome,
        report.solution.sup_norm(),
        report.residuals.fixed_point
    );
    for check in &report.checks {
        println!(
            "  {:12} {}  margin {:+.3e}",
            check.name,
            if check.passed { "pass" } else { "FAIL" },
            check.margin
        );
    }

    let mesh = Mesh::build(2.0, 1.5, 200, 200).unwrap();
    let constants = proof_constants(&spec, &mesh).unwrap();
    println!(
        "proof constants: k_sup {:.4}, c_sup {:.4}, eps_max {:.6e}, c_cone {:.4}, rho_min {:.6}",
        constants.k_sup, constants.c_sup, constants.eps_max, constants.c_cone, constants.rho_min
    );

    println!("randomized suites (seed 42):");
    let adm = admissible_suite(200, 42, 64, 64);
    for outcome in [&adm.positivity, &adm.cone, &adm.concavity] {
        println!(
            "  {:18} {}/{} pass, worst margin {:+.3e}",
            outcome.name,
            outcome.samples - outcome.failures,
            outcome.samples,
            outcome.worst_margin
        );
    }
    let nonex = nonexistence_suite(100, 42, 64, 64);
    println!(
        "  {:18} {}/{} pass, worst margin {:+.3e}",
        nonex.name,
        nonex.samples - nonex.failures,
        nonex.samples,
        nonex.worst_margin
    );
}
