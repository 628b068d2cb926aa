//! Parameter-region classification: where the existence theory applies,
//! where positive solutions are ruled out, and the cone constant on the
//! admissible region.
//!
//! Run with `cargo run --example classify_region`.

use conebvp::{parse_expr, ProblemSpec};

fn classify(label: &str, t_end: f64, eta: f64, alpha: f64, beta: f64) {
    let spec = ProblemSpec::new(
        t_end,
        eta,
        alpha,
        beta,
        parse_expr("1", "t").unwrap(),
        parse_expr("1", "u").unwrap(),
    )
    .unwrap();
    let c = spec.classify();
    println!("{label}: T={t_end} eta={eta} alpha={alpha} beta={beta}");
    println!("  region      : {}", c.region);
    println!("  denominator : {:.6}", c.denominator);
    println!("  alpha bound : {:.6}  (2T/eta^2)", c.alpha_bound);
    println!("  beta bound  : {:.6}", c.beta_bound);
    match c.gamma {
        Some(g) => println!("  gamma       : {g:.6}"),
        None => println!("  gamma       : undefined outside the admissible region"),
    }
    println!();
}

fn main() {
    // ramp weight instance: alpha and beta comfortably inside their bounds
    classify("ramp", 2.0, 1.5, 1.0, 0.5);
    // short interval with a large integral weight, still admissible
    classify("short interval", 0.75, 0.25, 20.0, 0.1);
    // symmetric-coupling instance (beta = 1 forces u(0) = u(eta))
    classify("symmetric coupling", 1.0, 1.0 / 3.0, 2.0, 1.0);
    // alpha above its bound: no positive solutions exist
    classify("above the alpha bound", 1.0, 0.5, 9.0, 0.0);
    // beta exactly at its bound: the linear problem degenerates
    classify("degenerate beta", 1.0, 0.5, 1.0, 1.4);
}
