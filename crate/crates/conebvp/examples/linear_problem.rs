//! The linear kernel: solve u'' + y = 0 under the three-point integral
//! boundary conditions and compare against a closed form.
//!
//! For y = 1, alpha = 1, beta = 0, eta = 1/2, T = 1 the exact solution is
//! u(t) = (23/42) t - t^2/2.
//!
//! Run with `cargo run --example linear_problem`.

use conebvp::{
    initial_data, parse_expr, residuals, solve_linear, GridFunction, Mesh, ProblemSpec,
};

fn main() {
    let spec = ProblemSpec::new(
        1.0,
        0.5,
        1.0,
        0.0,
        parse_expr("1", "t").unwrap(),
        parse_expr("1", "u").unwrap(),
    )
    .unwrap();

    let mesh = Mesh::build(1.0, 0.5, 200, 200).unwrap();
    let y = GridFunction::constant(&mesh, 1.0);

    let init = initial_data(&y, &spec).unwrap();
    println!("u(0) = {} (exact 0)", init.u0);
    println!("u'(0) = {} (exact 23/42 = {})", init.du0, 23.0 / 42.0);

    let u = solve_linear(&y, &spec).unwrap();
    let mut worst = 0.0f64;
    for (&t, &ut) in mesh.nodes().iter().zip(u.values()) {
        let exact = (23.0 / 42.0) * t - 0.5 * t * t;
        worst = worst.max((ut - exact).abs());
    }
    println!("max deviation from the closed form: {worst:.3e}");

    let r = residuals(&u, &spec).unwrap();
    println!(
        "defects: ode {:.3e}, bc0 {:.3e}, bcT {:.3e}",
        r.ode_sup, r.bc0, r.bc_t
    );
    println!("u(1) = {} (exact 1/21 = {})", u.values().last().unwrap(), 1.0 / 21.0);
}
