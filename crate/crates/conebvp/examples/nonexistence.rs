//! Per-instance nonexistence certificate above the alpha bound.
//!
//! For alpha > 2T/eta^2 the problem admits no positive solution: the
//! unique solution of the linear problem with any nontrivial nonnegative
//! forcing dips strictly negative. With alpha = 9, beta = 0, eta = 1/2,
//! T = 1 and forcing y = 1 the solution is exactly
//! u(t) = -(5/2) t - t^2/2.
//!
//! Run with `cargo run --example nonexistence`.

use conebvp::{nonexistence_probe, parse_expr, solve_linear, GridFunction, Mesh, ProblemSpec};

fn main() {
    let spec = ProblemSpec::new(
        1.0,
        0.5,
        9.0,
        0.0,
        parse_expr("1", "t").unwrap(),
        parse_expr("u", "u").unwrap(),
    )
    .unwrap();
    let c = spec.classify();
    println!("region: {} (alpha bound {})", c.region, c.alpha_bound);

    let mesh = Mesh::build(1.0, 0.5, 64, 64).unwrap();
    let y = GridFunction::constant(&mesh, 1.0);
    let u = solve_linear(&y, &spec).unwrap();
    let mut worst = 0.0f64;
    for (&t, &ut) in mesh.nodes().iter().zip(u.values()) {
        worst = worst.max((ut - (-2.5 * t - 0.5 * t * t)).abs());
    }
    println!("max deviation from -(5/2)t - t^2/2: {worst:.3e}");

    let result = nonexistence_probe(&spec, &y).unwrap();
    println!(
        "probe: {} ({})",
        if result.passed { "pass" } else { "fail" },
        result.detail
    );

    // the certificate is not tied to one forcing; a ramp works too
    let ramp = GridFunction::from_fn(&mesh, |t| t);
    let result = nonexistence_probe(&spec, &ramp).unwrap();
    println!(
        "probe with ramp forcing: {} ({})",
        if result.passed { "pass" } else { "fail" },
        result.detail
    );
}
