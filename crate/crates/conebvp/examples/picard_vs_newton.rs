//! Picard iteration against Newton on a sublinear instance, with the
//! cross-check that both land on the same fixed point.
//!
//! Run with `cargo run --example picard_vs_newton`.

use conebvp::{cross_check, newton_solve, parse_expr, picard_solve, Agreement, ProblemSpec, SolverOptions};

fn main() {
    // u'' + t sqrt(u) = 0, u(0) = u(3/2)/2, u(2) = integral over [0, 3/2]
    let spec = ProblemSpec::new(
        2.0,
        1.5,
        1.0,
        0.5,
        parse_expr("t", "t").unwrap(),
        parse_expr("u^0.5", "u").unwrap(),
    )
    .unwrap();

    let opts = SolverOptions {
        m: 200,
        n: 200,
        multistart: vec![1.0, 10.0, 100.0, 1000.0],
        ..SolverOptions::default()
    };

    let picard = picard_solve(&spec, &opts).unwrap();
    println!(
        "picard: {:?} after {} iterations, sup norm {:.6}",
        picard.outcome,
        picard.iterations,
        picard.solution.sup_norm()
    );

    let newton = newton_solve(&spec, &opts).unwrap();
    println!(
        "newton: {:?} after {} iterations (start {}), sup norm {:.6}",
        newton.outcome,
        newton.iterations,
        newton.init_used,
        newton.solution.sup_norm()
    );

    match cross_check(&picard, &newton) {
        Agreement::Consistent(diff) => {
            println!("cross-check: consistent, max node difference {diff:.3e}")
        }
        Agreement::MultipleSolutionSuspicion(diff) => {
            println!("cross-check: profiles differ by {diff:.3e} - possible second solution")
        }
        Agreement::NotComparable => println!("cross-check: not comparable"),
    }
}
