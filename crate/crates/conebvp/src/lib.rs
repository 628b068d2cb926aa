//! Solver and verification workbench for the nonlinear second-order
//! boundary value problem
//!
//! ```text
//! u''(t) + a(t) f(u(t)) = 0,    0 < t < T,
//! u(0) = beta u(eta),           u(T) = alpha * integral of u over [0, eta],
//! ```
//!
//! with `0 < eta < T`, `alpha > 0`, `beta >= 0`, a continuous nonnegative
//! weight `a` positive somewhere on `[eta, T]`, and `f >= 0`.
//!
//! On the parameter region `0 < alpha < 2T/eta^2`,
//! `0 <= beta < (2T - alpha eta^2)/(alpha eta^2 - 2 eta + 2T)` the problem
//! has at least one positive solution whenever `f` is superlinear
//! (`f(u)/u -> 0` at `0+` and `-> infinity` at infinity) or sublinear (the
//! reverse); above the alpha bound no positive solutions exist at all.
//! Positive solutions are concave and obey the cone lower bound
//! `min over [eta, T] of u >= gamma ||u||` with an explicit constant
//! `gamma` in `(0, 1)`.
//!
//! This crate makes those statements computable:
//!
//! - [`problem`] classifies parameters against the region bounds and
//!   evaluates the cone constant.
//! - [`grid`] and [`linear`] discretize `[0, T]` on a two-panel mesh joined
//!   at `eta` and solve the linear problem `u'' + y = 0` under the same
//!   boundary conditions.
//! - [`solver`] finds fixed points of the integral operator `A` (Picard
//!   iteration and a Newton method with a fixed-point polish).
//! - [`checks`] certifies positivity, concavity, the cone bound,
//!   per-instance nonexistence above the alpha bound, the proof constants,
//!   and the growth class of `f`.
//! - [`cli`], [`config`] and [`report`] provide the `conebvp` command-line
//!   pipeline with JSON configs, JSON reports and CSV solutions.
//!
//! Start with the runnable examples (`cargo run --example classify_region`
//! and friends); each one demonstrates a single capability end to end.

pub mod checks;
pub mod cli;
pub mod config;
pub mod expr;
pub mod grid;
pub mod linear;
pub mod problem;
pub mod report;
pub mod solver;

pub use checks::{
    check_concavity, check_cone_bound, check_hypotheses, check_positivity, estimate_limits,
    nonexistence_probe, proof_constants, CheckResult, GrowthVerdict, LimitClass, LimitEstimate,
    ProofConstants,
};
pub use config::{load_config, RunConfig};
pub use expr::{parse_expr, Expr};
pub use grid::{double_cumulative, moments, GridFunction, Mesh, Moments};
pub use linear::{initial_data, solve_linear, InitialData};
pub use problem::{ParamClassification, ProblemSpec, Region};
pub use solver::{
    apply_a, cross_check, newton_solve, picard_solve, residuals, solve, Agreement, InitGuess,
    Method, Outcome, Residuals, SolveReport, SolverOptions,
};
