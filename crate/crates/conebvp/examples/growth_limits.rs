//! Growth classification of the nonlinearity: estimates the limits of
//! f(u)/u at zero and at infinity and labels f superlinear, sublinear or
//! neither. Existence holds on the admissible region in the first two
//! cases.
//!
//! Run with `cargo run --example growth_limits`.

use conebvp::{estimate_limits, parse_expr};

fn main() {
    let cases = [
        "u^2",
        "u^0.5",
        "u",
        "u^2*ln(1+u)",
        "(sin(u)+ln(1+u))/u^2",
        "u/(1+u)",
        "exp(u)-1",
    ];
    for text in cases {
        let f = parse_expr(text, "u").unwrap();
        let e = estimate_limits(&f);
        println!(
            "{text:24} f(u)/u -> {:?} at 0+, {:?} at infinity  =>  {:?}",
            e.f0_class, e.finf_class, e.verdict
        );
    }
}
