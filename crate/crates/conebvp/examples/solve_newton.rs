//! Newton solve of a superlinear instance: u'' + t^2 u^2 ln(1+u) = 0 on
//! (0, 3/4) with u(0) = u(1/4)/10 and u(3/4) = 20 * integral over [0, 1/4].
//!
//! Run with `cargo run --example solve_newton`.

use conebvp::{newton_solve, parse_expr, ProblemSpec, SolverOptions};

fn main() {
    let spec = ProblemSpec::new(
        0.75,
        0.25,
        20.0,
        0.1,
        parse_expr("t^2", "t").unwrap(),
        parse_expr("u^2*ln(1+u)", "u").unwrap(),
    )
    .unwrap();

    let opts = SolverOptions {
        m: 400,
        n: 400,
        ..SolverOptions::default()
    };
    let report = newton_solve(&spec, &opts).unwrap();

    println!(
        "outcome: {:?} after {} iterations from start {}",
        report.outcome, report.iterations, report.init_used
    );
    println!("sup norm: {}", report.solution.sup_norm());
    println!(
        "residuals: ode {:.3e}, bc0 {:.3e}, bcT {:.3e}, fixed point {:.3e}",
        report.residuals.ode_sup,
        report.residuals.bc0,
        report.residuals.bc_t,
        report.residuals.fixed_point
    );
    for check in &report.checks {
        println!(
            "check {:12} {}  (margin {:+.3e})",
            check.name,
            if check.passed { "pass" } else { "FAIL" },
            check.margin
        );
    }
    if let Some(c) = &report.constants {
        println!(
            "proof constants: c_sup = {:.6}, eps_max = {:.6e}, rho_min = {:.6}",
            c.c_sup, c.eps_max, c.rho_min
        );
    }

    // a few profile samples
    let mesh = report.solution.mesh();
    for frac in [0, 1, 2, 3, 4] {
        let idx = (mesh.len() - 1) * frac / 4;
        println!(
            "u({:.4}) = {:.6}",
            mesh.nodes()[idx],
            report.solution.values()[idx]
        );
    }
}
