//! Nonlinear solvers for `u'' + a(t) f(u) = 0` under the three-point
//! integral boundary conditions, written around the operator `A` whose
//! fixed points are exactly the solutions: applying `A` means solving the
//! linear problem with forcing `a(t) f(u(t))`.
//!
//! Two strategies:
//!
//! - **Picard**: damped iteration `u <- (1 - d) u + d A u`. Faithful to the
//!   fixed-point formulation but only convergent when `A` contracts, which
//!   the theory does not promise; kept as a cross-check.
//! - **Newton**: the workhorse. A damped Newton pass on the
//!   finite-difference collocation system (centered second differences,
//!   boundary rows for `u(0) = beta u(eta)` and the Simpson-discretized
//!   integral condition) finds the neighborhood of a solution; a second
//!   Newton pass on the fixed-point residual `u - A u` — whose Jacobian
//!   `I - L diag(a f'(u))` uses the precomputed linear solution operator
//!   `L` — then drives the reported fixed-point defect to the requested
//!   tolerance. The collocation and integral-operator discretizations
//!   differ at O(h^2), so polishing against `A` itself is what makes
//!   `||Au - u||` a meaningful convergence certificate.
//!
//! Both solvers clamp negative iterate values to zero before evaluating
//! `f` (its domain is `[0, infinity)`) and floor the argument at `1e-12`
//! when `f` is singular at zero; both repairs are counted in the report.

use crate::checks::{
    check_concavity, check_cone_bound, check_hypotheses, check_positivity, proof_constants,
    CheckResult, ProofConstants,
};
use crate::expr::{Expr, ExprError};
use crate::grid::{
    simpson_first_panel, simpson_weights_first_panel, GridError, GridFunction, Mesh,
};
use crate::linear::{solution_operator, solve_linear, LinearError};
use crate::problem::{ParamClassification, ProblemSpec, Region};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::fmt;

/// Iterates whose sup norm exceeds this are treated as divergent.
const DIVERGENCE_GUARD: f64 = 1e12;
/// Argument floor used when `f` cannot be evaluated at zero.
const SINGULAR_FLOOR: f64 = 1e-12;
/// Acceptance band for stray negative nodes on a converged solution.
const NEGATIVE_NODE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Picard,
    Newton,
}

/// How an iteration is seeded: a constant profile, or the image of a
/// constant profile under the operator `A` (which already satisfies the
/// boundary conditions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitGuess {
    Constant,
    OperatorApplied,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverOptions {
    pub method: Method,
    /// Subintervals on `[0, eta]`.
    pub m: usize,
    /// Subintervals on `[eta, T]`.
    pub n: usize,
    /// Convergence tolerance, relative to `1 + ||u||`.
    pub tol: f64,
    /// Iteration cap per solver stage.
    pub max_iter: usize,
    /// Picard relaxation factor in `(0, 1]`.
    pub damping: f64,
    pub init: InitGuess,
    pub init_value: f64,
    /// Newton start values, tried in order.
    pub multistart: Vec<f64>,
    /// Smallest accepted solution norm; converged limits below it are
    /// rejected as trivial.
    pub trivial_floor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            method: Method::Newton,
            m: 200,
            n: 200,
            tol: 1e-10,
            max_iter: 100,
            damping: 1.0,
            init: InitGuess::Constant,
            init_value: 1.0,
            multistart: vec![0.1, 1.0, 10.0],
            trivial_floor: 1e-6,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<(), SolveError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(SolveError::BadOptions("tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(SolveError::BadOptions("max_iter must be at least 1".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(SolveError::BadOptions("damping must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub enum SolveError {
    NotAdmissible { region: Region },
    Linear(LinearError),
    Grid(GridError),
    BadOptions(String),
    /// `f` (or its derivative) failed to evaluate at a node even after the
    /// singular floor repair.
    Eval {
        node: usize,
        t: f64,
        value: f64,
        source: ExprError,
    },
    NonDifferentiable(ExprError),
    SingularJacobian { start: f64, iter: usize },
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::NotAdmissible { region } => {
                write!(f, "solver requires the admissible region, got {region}")
            }
            SolveError::Linear(e) => write!(f, "{e}"),
            SolveError::Grid(e) => write!(f, "{e}"),
            SolveError::BadOptions(msg) => write!(f, "invalid solver options: {msg}"),
            SolveError::Eval {
                node,
                t,
                value,
                source,
            } => write!(
                f,
                "forcing evaluation failed at node {node} (t = {t}, u = {value}): {source}"
            ),
            SolveError::NonDifferentiable(e) => {
                write!(f, "Newton needs a differentiable nonlinearity: {e}")
            }
            SolveError::SingularJacobian { start, iter } => {
                write!(f, "singular Jacobian at iteration {iter} (start value {start})")
            }
        }
    }
}

impl std::error::Error for SolveError {}

impl From<LinearError> for SolveError {
    fn from(e: LinearError) -> Self {
        SolveError::Linear(e)
    }
}

impl From<GridError> for SolveError {
    fn from(e: GridError) -> Self {
        SolveError::Grid(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Converged,
    NotConverged,
    /// The iteration converged, but to a limit below the trivial floor.
    TrivialLimit,
}

/// Defect measurements for a candidate solution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Residuals {
    /// Sup over interior nodes of the second-difference defect of the
    /// differential equation (non-uniform three-point formula at the
    /// panel junction).
    pub ode_sup: f64,
    /// `|u(0) - beta u(eta)|`.
    pub bc0: f64,
    /// `|u(T) - alpha * Simpson integral of u over [0, eta]|`.
    pub bc_t: f64,
    /// `||A u - u||` with negative nodes clamped before evaluating `f`.
    pub fixed_point: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterRecord {
    pub start: f64,
    pub stage: &'static str,
    pub iter: usize,
    pub norm: f64,
}

/// Everything a solve produces: the solution, its defects, the parameter
/// classification, solution checks and the proof constants.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub converged: bool,
    pub outcome: Outcome,
    pub solution: GridFunction,
    pub residuals: Residuals,
    pub iterations: usize,
    pub init_used: f64,
    pub classification: ParamClassification,
    pub checks: Vec<CheckResult>,
    pub constants: Option<ProofConstants>,
    pub clamp_events: usize,
    pub floor_events: usize,
    pub trace: Vec<IterRecord>,
}

/// Node-wise evaluation of the forcing `a(t) f(u(t))` with the domain
/// repairs (clamp at zero, singular floor) counted.
struct ForcingEval<'a> {
    a_nodes: Vec<f64>,
    f: &'a Expr,
    fprime: Option<Expr>,
    clamp_events: usize,
    floor_events: usize,
}

impl<'a> ForcingEval<'a> {
    fn new(spec: &'a ProblemSpec, mesh: &Mesh, derivative: bool) -> Result<Self, SolveError> {
        let mut a_nodes = Vec::with_capacity(mesh.len());
        for (node, &t) in mesh.nodes().iter().enumerate() {
            let v = spec.a().eval(t).map_err(|source| SolveError::Eval {
                node,
                t,
                value: t,
                source,
            })?;
            a_nodes.push(v);
        }
        let fprime = if derivative {
            Some(spec.f().differentiate().map_err(SolveError::NonDifferentiable)?)
        } else {
            None
        };
        Ok(ForcingEval {
            a_nodes,
            f: spec.f(),
            fprime,
            clamp_events: 0,
            floor_events: 0,
        })
    }

    fn eval_with_repairs(
        &mut self,
        expr: &Expr,
        node: usize,
        t: f64,
        u: f64,
    ) -> Result<f64, SolveError> {
        let clamped = if u < 0.0 {
            self.clamp_events += 1;
            0.0
        } else {
            u
        };
        match expr.eval(clamped) {
            Ok(v) => Ok(v),
            Err(_) if clamped < SINGULAR_FLOOR => {
                self.floor_events += 1;
                expr.eval(SINGULAR_FLOOR).map_err(|source| SolveError::Eval {
                    node,
                    t,
                    value: u,
                    source,
                })
            }
            Err(source) => Err(SolveError::Eval {
                node,
                t,
                value: u,
                source,
            }),
        }
    }

    /// `y_i = a(t_i) f(max(u_i, 0))`.
    fn forcing(&mut self, mesh: &Mesh, u: &[f64]) -> Result<Vec<f64>, SolveError> {
        let mut y = Vec::with_capacity(u.len());
        let f = self.f;
        for (node, (&t, &ui)) in mesh.nodes().iter().zip(u).enumerate() {
            let fv = self.eval_with_repairs(f, node, t, ui)?;
            y.push(self.a_nodes[node] * fv);
        }
        Ok(y)
    }

    /// `c_i = a(t_i) f'(u_i)` on positive nodes, zero on clamped ones.
    fn forcing_slope(&mut self, mesh: &Mesh, u: &[f64]) -> Result<Vec<f64>, SolveError> {
        let fp = self.fprime.clone().expect("slope requires the derivative");
        let mut c = Vec::with_capacity(u.len());
        for (node, (&t, &ui)) in mesh.nodes().iter().zip(u).enumerate() {
            if ui > 0.0 {
                let dv = self.eval_with_repairs(&fp, node, t, ui)?;
                c.push(self.a_nodes[node] * dv);
            } else {
                c.push(0.0);
            }
        }
        Ok(c)
    }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn require_admissible(spec: &ProblemSpec) -> Result<ParamClassification, SolveError> {
    let c = spec.classify();
    match c.region {
        Region::Admissible => Ok(c),
        Region::DenominatorDegenerate => Err(SolveError::Linear(LinearError::ExcludedBeta {
            beta: spec.beta(),
            bound: spec.beta_bound(),
        })),
        region => Err(SolveError::NotAdmissible { region }),
    }
}

/// One application of the operator `A`: solves the linear problem with
/// forcing `a(t) f(u(t))`. Expects `u >= 0` node-wise; evaluation failures
/// surface with the offending node.
pub fn apply_a(u: &GridFunction, spec: &ProblemSpec) -> Result<GridFunction, SolveError> {
    let mesh = u.mesh();
    let mut y = Vec::with_capacity(mesh.len());
    for (node, (&t, &ui)) in mesh.nodes().iter().zip(u.values()).enumerate() {
        let a = spec.a().eval(t).map_err(|source| SolveError::Eval {
            node,
            t,
            value: t,
            source,
        })?;
        let fv = spec.f().eval(ui).map_err(|source| SolveError::Eval {
            node,
            t,
            value: ui,
            source,
        })?;
        y.push(a * fv);
    }
    let y = GridFunction::from_values(mesh.clone(), y)?;
    Ok(solve_linear(&y, spec)?)
}

/// Measures all defects of `u` as a candidate solution. Negative nodes are
/// clamped before evaluating `f`, so the measurement tolerates roundoff-
/// level sign noise on otherwise positive solutions.
pub fn residuals(u: &GridFunction, spec: &ProblemSpec) -> Result<Residuals, SolveError> {
    let mesh = u.mesh();
    let mut ctx = ForcingEval::new(spec, mesh, false)?;
    let y = ctx.forcing(mesh, u.values())?;
    let vals = u.values();
    let mi = mesh.eta_index();
    let (h1, h2) = (mesh.h1(), mesh.h2());

    let mut ode_sup = 0.0f64;
    for i in 1..vals.len() - 1 {
        let second = if i == mi {
            2.0 * (h2 * vals[i - 1] - (h1 + h2) * vals[i] + h1 * vals[i + 1])
                / (h1 * h2 * (h1 + h2))
        } else {
            let h = if i < mi { h1 } else { h2 };
            (vals[i - 1] - 2.0 * vals[i] + vals[i + 1]) / (h * h)
        };
        ode_sup = ode_sup.max((second + y[i]).abs());
    }

    let bc0 = (vals[0] - spec.beta() * vals[mi]).abs();
    let bc_t = (vals[vals.len() - 1] - spec.alpha() * simpson_first_panel(u)).abs();

    let y_gf = GridFunction::from_values(mesh.clone(), y)?;
    let au = solve_linear(&y_gf, spec)?;
    let fixed_point = vals
        .iter()
        .zip(au.values())
        .fold(0.0f64, |acc, (ui, ai)| acc.max((ai - ui).abs()));

    Ok(Residuals {
        ode_sup,
        bc0,
        bc_t,
        fixed_point,
    })
}

fn initial_profile(
    mesh: &Mesh,
    spec: &ProblemSpec,
    ctx: &mut ForcingEval,
    init: InitGuess,
    value: f64,
) -> Result<Vec<f64>, SolveError> {
    match init {
        InitGuess::Constant => Ok(vec![value; mesh.len()]),
        InitGuess::OperatorApplied => {
            let y = ctx.forcing(mesh, &vec![value; mesh.len()])?;
            let y = GridFunction::from_values(mesh.clone(), y)?;
            Ok(solve_linear(&y, spec)?.values().to_vec())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn build_report(
    spec: &ProblemSpec,
    classification: ParamClassification,
    mesh: &Mesh,
    solution: GridFunction,
    converged: bool,
    outcome: Outcome,
    iterations: usize,
    init_used: f64,
    ctx: &ForcingEval,
    trace: Vec<IterRecord>,
) -> Result<SolveReport, SolveError> {
    let res = residuals(&solution, spec)?;
    let mut checks = vec![check_hypotheses(spec), check_positivity(&solution)];
    if let Ok(cone) = check_cone_bound(&solution, spec) {
        checks.push(cone);
    }
    checks.push(check_concavity(&solution));
    let constants = proof_constants(spec, mesh).ok();
    Ok(SolveReport {
        converged,
        outcome,
        solution,
        residuals: res,
        iterations,
        init_used,
        classification,
        checks,
        constants,
        clamp_events: ctx.clamp_events,
        floor_events: ctx.floor_events,
        trace,
    })
}

/// Damped Picard iteration on the operator `A`.
pub fn picard_solve(spec: &ProblemSpec, opts: &SolverOptions) -> Result<SolveReport, SolveError> {
    opts.validate()?;
    let classification = require_admissible(spec)?;
    let mesh = Mesh::build(spec.t_end(), spec.eta(), opts.m, opts.n)?;
    let mut ctx = ForcingEval::new(spec, &mesh, false)?;
    let mut u = initial_profile(&mesh, spec, &mut ctx, opts.init, opts.init_value)?;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut outcome = Outcome::NotConverged;
    let mut iterations = 0;

    for iter in 1..=opts.max_iter {
        iterations = iter;
        let y = ctx.forcing(&mesh, &u)?;
        let y = GridFunction::from_values(mesh.clone(), y)?;
        let au = solve_linear(&y, spec)?;
        let mut diff = 0.0f64;
        for (ui, &ai) in u.iter_mut().zip(au.values()) {
            let next = (1.0 - opts.damping) * *ui + opts.damping * ai;
            diff = diff.max((next - *ui).abs());
            *ui = next;
        }
        trace.push(IterRecord {
            start: opts.init_value,
            stage: "picard",
            iter,
            norm: diff,
        });
        let norm = sup_norm(&u);
        if norm > DIVERGENCE_GUARD {
            outcome = Outcome::NotConverged;
            break;
        }
        if diff <= opts.tol * (1.0 + norm) {
            if norm < opts.trivial_floor {
                outcome = Outcome::TrivialLimit;
            } else {
                converged = true;
                outcome = Outcome::Converged;
            }
            break;
        }
    }

    let solution = GridFunction::from_values(mesh.clone(), u)?;
    let mut report = build_report(
        spec,
        classification,
        &mesh,
        solution,
        converged,
        outcome,
        iterations,
        opts.init_value,
        &ctx,
        trace,
    )?;
    // a converged report must also stand as a fixed point
    if report.converged {
        let scale = 1.0 + report.solution.sup_norm();
        if report.residuals.fixed_point > 10.0 * opts.tol * scale {
            report.converged = false;
            report.outcome = Outcome::NotConverged;
        }
    }
    Ok(report)
}

struct NewtonStage<'a> {
    mesh: &'a Mesh,
    spec: &'a ProblemSpec,
    simpson_w: Vec<f64>,
}

impl<'a> NewtonStage<'a> {
    /// Collocation residual with interior rows scaled by the local `h^2`
    /// (junction row by `h1 h2`), which keeps every row at the magnitude
    /// of `u` and makes the tolerance attainable in double precision.
    fn collocation_residual(
        &self,
        ctx: &mut ForcingEval,
        u: &[f64],
    ) -> Result<DVector<f64>, SolveError> {
        let mesh = self.mesh;
        let y = ctx.forcing(mesh, u)?;
        let mi = mesh.eta_index();
        let (h1, h2) = (mesh.h1(), mesh.h2());
        let size = u.len();
        let mut out = DVector::zeros(size);
        out[0] = u[0] - self.spec.beta() * u[mi];
        for i in 1..size - 1 {
            out[i] = if i == mi {
                2.0 * (h2 * u[i - 1] - (h1 + h2) * u[i] + h1 * u[i + 1]) / (h1 + h2)
                    + h1 * h2 * y[i]
            } else {
                let h = if i < mi { h1 } else { h2 };
                (u[i - 1] - 2.0 * u[i] + u[i + 1]) + h * h * y[i]
            };
        }
        let integral: f64 = self
            .simpson_w
            .iter()
            .zip(u)
            .map(|(wi, ui)| wi * ui)
            .sum();
        out[size - 1] = u[size - 1] - self.spec.alpha() * integral;
        Ok(out)
    }

    fn collocation_jacobian(
        &self,
        ctx: &mut ForcingEval,
        u: &[f64],
    ) -> Result<DMatrix<f64>, SolveError> {
        let mesh = self.mesh;
        let slope = ctx.forcing_slope(mesh, u)?;
        let mi = mesh.eta_index();
        let (h1, h2) = (mesh.h1(), mesh.h2());
        let size = u.len();
        let mut j = DMatrix::zeros(size, size);
        j[(0, 0)] = 1.0;
        j[(0, mi)] -= self.spec.beta();
        for i in 1..size - 1 {
            if i == mi {
                j[(i, i - 1)] = 2.0 * h2 / (h1 + h2);
                j[(i, i)] = -2.0 + h1 * h2 * slope[i];
                j[(i, i + 1)] = 2.0 * h1 / (h1 + h2);
            } else {
                let h = if i < mi { h1 } else { h2 };
                j[(i, i - 1)] = 1.0;
                j[(i, i)] = -2.0 + h * h * slope[i];
                j[(i, i + 1)] = 1.0;
            }
        }
        for (col, wi) in self.simpson_w.iter().enumerate() {
            j[(size - 1, col)] -= self.spec.alpha() * wi;
        }
        j[(size - 1, size - 1)] += 1.0;
        Ok(j)
    }

    /// Fixed-point residual `u - A u` (clamped forcing).
    fn fixed_point_residual(
        &self,
        ctx: &mut ForcingEval,
        u: &[f64],
    ) -> Result<DVector<f64>, SolveError> {
        let y = ctx.forcing(self.mesh, u)?;
        let y = GridFunction::from_values(self.mesh.clone(), y)?;
        let au = solve_linear(&y, self.spec)?;
        Ok(DVector::from_iterator(
            u.len(),
            u.iter().zip(au.values()).map(|(ui, ai)| ui - ai),
        ))
    }
}

enum StepResult {
    Accepted,
    Stalled,
}

/// One damped Newton step with backtracking: halve the step until the
/// residual norm decreases (at most 30 halvings).
fn damped_step(
    u: &mut Vec<f64>,
    delta: &DVector<f64>,
    current_norm: f64,
    mut residual: impl FnMut(&[f64]) -> Option<f64>,
) -> StepResult {
    let mut lambda = 1.0f64;
    let mut trial = vec![0.0; u.len()];
    for _ in 0..=30 {
        for (k, t) in trial.iter_mut().enumerate() {
            *t = u[k] + lambda * delta[k];
        }
        if let Some(norm) = residual(&trial) {
            if norm < current_norm {
                *u = trial;
                return StepResult::Accepted;
            }
        }
        lambda *= 0.5;
    }
    StepResult::Stalled
}

/// Newton solve: collocation pass, then fixed-point polish, over the
/// configured start values in order. Returns the first start that
/// converges to a nontrivial, nonnegative profile.
pub fn newton_solve(spec: &ProblemSpec, opts: &SolverOptions) -> Result<SolveReport, SolveError> {
    opts.validate()?;
    let classification = require_admissible(spec)?;
    let mesh = Mesh::build(spec.t_end(), spec.eta(), opts.m, opts.n)?;
    let mut ctx = ForcingEval::new(spec, &mesh, true)?;
    let stage = NewtonStage {
        mesh: &mesh,
        spec,
        simpson_w: simpson_weights_first_panel(&mesh),
    };
    let operator = solution_operator(&mesh, spec)?;
    let starts: Vec<f64> = if opts.multistart.is_empty() {
        vec![opts.init_value]
    } else {
        opts.multistart.clone()
    };
    // Collocation only needs to land in the basin of the polish stage.
    let coarse_tol = (opts.tol * 1e4).clamp(opts.tol, 1e-6);

    let mut trace = Vec::new();
    let mut last_attempt: Option<(Vec<f64>, usize, f64, Outcome)> = None;

    for &start in &starts {
        let mut u = initial_profile(&mesh, spec, &mut ctx, opts.init, start)?;
        let mut iterations = 0;

        // stage 1: collocation Newton
        for iter in 1..=opts.max_iter {
            let f = stage.collocation_residual(&mut ctx, &u)?;
            let norm = f.amax();
            trace.push(IterRecord {
                start,
                stage: "collocation",
                iter,
                norm,
            });
            if !norm.is_finite() || sup_norm(&u) > DIVERGENCE_GUARD {
                break;
            }
            if norm <= coarse_tol * (1.0 + sup_norm(&u)) {
                break;
            }
            let jac = stage.collocation_jacobian(&mut ctx, &u)?;
            let lu = jac.lu();
            let delta = lu
                .solve(&(-&f))
                .ok_or(SolveError::SingularJacobian { start, iter })?;
            iterations += 1;
            match damped_step(&mut u, &delta, norm, |trial| {
                stage
                    .collocation_residual(&mut ctx, trial)
                    .ok()
                    .map(|r| r.amax())
            }) {
                StepResult::Accepted => {}
                StepResult::Stalled => break,
            }
        }

        // stage 2: Newton on the fixed-point residual
        let mut converged = false;
        for iter in 1..=opts.max_iter {
            let g = stage.fixed_point_residual(&mut ctx, &u)?;
            let norm = g.amax();
            trace.push(IterRecord {
                start,
                stage: "fixed_point",
                iter,
                norm,
            });
            if norm <= opts.tol * (1.0 + sup_norm(&u)) {
                converged = true;
                break;
            }
            if !norm.is_finite() || sup_norm(&u) > DIVERGENCE_GUARD {
                break;
            }
            let slope = ctx.forcing_slope(&mesh, &u)?;
            let size = u.len();
            let mut jac = DMatrix::zeros(size, size);
            for col in 0..size {
                let scale = slope[col];
                if scale != 0.0 {
                    for row in 0..size {
                        jac[(row, col)] = -operator[(row, col)] * scale;
                    }
                }
            }
            for d in 0..size {
                jac[(d, d)] += 1.0;
            }
            let lu = jac.lu();
            let delta = lu
                .solve(&(-&g))
                .ok_or(SolveError::SingularJacobian { start, iter })?;
            iterations += 1;
            match damped_step(&mut u, &delta, norm, |trial| {
                stage
                    .fixed_point_residual(&mut ctx, trial)
                    .ok()
                    .map(|r| r.amax())
            }) {
                StepResult::Accepted => {}
                StepResult::Stalled => break,
            }
        }

        let norm = sup_norm(&u);
        let min_node = u.iter().copied().fold(f64::INFINITY, f64::min);
        if converged {
            if norm < opts.trivial_floor {
                last_attempt = Some((u, iterations, start, Outcome::TrivialLimit));
                continue;
            }
            if min_node < -NEGATIVE_NODE_TOL * (1.0 + norm) {
                last_attempt = Some((u, iterations, start, Outcome::NotConverged));
                continue;
            }
            let solution = GridFunction::from_values(mesh.clone(), u)?;
            return build_report(
                spec,
                classification,
                &mesh,
                solution,
                true,
                Outcome::Converged,
                iterations,
                start,
                &ctx,
                trace,
            );
        }
        last_attempt = Some((u, iterations, start, Outcome::NotConverged));
    }

    let (u, iterations, start, outcome) = last_attempt.expect("at least one start attempted");
    let clamped: Vec<f64> = u.iter().map(|&v| if v.is_finite() { v } else { 0.0 }).collect();
    let solution = GridFunction::from_values(mesh.clone(), clamped)?;
    build_report(
        spec,
        classification,
        &mesh,
        solution,
        false,
        outcome,
        iterations,
        start,
        &ctx,
        trace,
    )
}

/// Runs the configured solver.
pub fn solve(spec: &ProblemSpec, opts: &SolverOptions) -> Result<SolveReport, SolveError> {
    match opts.method {
        Method::Picard => picard_solve(spec, opts),
        Method::Newton => newton_solve(spec, opts),
    }
}

/// Agreement between two converged solutions of the same instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "max_diff")]
pub enum Agreement {
    Consistent(f64),
    /// Both solves converged but to visibly different profiles; existence
    /// theory does not promise uniqueness, so this flags a possible pair
    /// of distinct solutions rather than an error.
    MultipleSolutionSuspicion(f64),
    NotComparable,
}

pub fn cross_check(a: &SolveReport, b: &SolveReport) -> Agreement {
    if !(a.converged && b.converged) || a.solution.mesh() != b.solution.mesh() {
        return Agreement::NotComparable;
    }
    let max_diff = a
        .solution
        .values()
        .iter()
        .zip(b.solution.values())
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()));
    let scale = 1.0 + a.solution.sup_norm().max(b.solution.sup_norm());
    if max_diff <= 1e-6 * scale {
        Agreement::Consistent(max_diff)
    } else {
        Agreement::MultipleSolutionSuspicion(max_diff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn spec_with(t_end: f64, eta: f64, alpha: f64, beta: f64, a: &str, f: &str) -> ProblemSpec {
        ProblemSpec::new(
            t_end,
            eta,
            alpha,
            beta,
            parse_expr(a, "t").unwrap(),
            parse_expr(f, "u").unwrap(),
        )
        .unwrap()
    }

    fn opts(m: usize, n: usize) -> SolverOptions {
        SolverOptions {
            m,
            n,
            ..SolverOptions::default()
        }
    }

    #[test]
    fn apply_a_with_zero_nonlinearity_is_zero() {
        let s = spec_with(1.0, 0.5, 1.0, 0.0, "1", "0");
        let mesh = Mesh::build(1.0, 0.5, 8, 8).unwrap();
        let u = GridFunction::from_fn(&mesh, |t| 1.0 + t);
        let au = apply_a(&u, &s).unwrap();
        assert!(au.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn apply_a_with_unit_nonlinearity_matches_the_linear_solve() {
        let s = spec_with(1.0, 0.5, 1.0, 0.0, "1", "1");
        let mesh = Mesh::build(1.0, 0.5, 16, 16).unwrap();
        let u = GridFunction::constant(&mesh, 5.0);
        let au = apply_a(&u, &s).unwrap();
        for (&t, &v) in mesh.nodes().iter().zip(au.values()) {
            let want = (23.0 / 42.0) * t - 0.5 * t * t;
            assert!((v - want).abs() < 1e-14);
        }
    }

    #[test]
    fn residuals_vanish_on_an_exact_construction() {
        let s = spec_with(1.0, 0.5, 1.0, 0.0, "1", "3");
        let mesh = Mesh::build(1.0, 0.5, 16, 16).unwrap();
        let y = GridFunction::constant(&mesh, 3.0);
        let u = solve_linear(&y, &s).unwrap();
        let r = residuals(&u, &s).unwrap();
        assert!(r.ode_sup <= 1e-8, "ode {}", r.ode_sup);
        assert!(r.bc0 <= 1e-10 && r.bc_t <= 1e-10, "bc {} {}", r.bc0, r.bc_t);
        assert!(r.fixed_point <= 1e-12, "fp {}", r.fixed_point);
    }

    #[test]
    fn residuals_of_the_zero_solution_with_vanishing_f() {
        let s = spec_with(1.0, 0.5, 1.0, 0.0, "1", "u^2");
        let mesh = Mesh::build(1.0, 0.5, 8, 8).unwrap();
        let zero = GridFunction::constant(&mesh, 0.0);
        let r = residuals(&zero, &s).unwrap();
        assert_eq!(r.ode_sup, 0.0);
        assert_eq!(r.bc0, 0.0);
        assert_eq!(r.bc_t, 0.0);
        assert_eq!(r.fixed_point, 0.0);
    }

    #[test]
    fn point_perturbation_shows_up_at_h_squared_scale() {
        let s = spec_with(1.0, 0.5, 1.0, 0.0, "1", "1");
        let mesh = Mesh::build(1.0, 0.5, 16, 16).unwrap();
        let y = GridFunction::constant(&mesh, 1.0);
        let u = solve_linear(&y, &s).unwrap();
        let h = mesh.h1();
        let eps = 1e-3;
        let mut bumped = u.values().to_vec();
        bumped[5] += eps;
        let bumped = GridFunction::from_values(mesh.clone(), bumped).unwrap();
        let r = residuals(&bumped, &s).unwrap();
        let expected = 2.0 * eps / (h * h);
        assert!(
            r.ode_sup > 0.5 * expected && r.ode_sup < 1.5 * expected,
            "{} vs {}",
            r.ode_sup,
            expected
        );
    }

    #[test]
    fn picard_on_a_constant_nonlinearity_converges_in_two_iterations() {
        let s = spec_with(1.0, 0.5, 1.0, 0.0, "1", "1");
        let r = picard_solve(&s, &opts(16, 16)).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 2);
        for (&t, &v) in r.solution.mesh().nodes().iter().zip(r.solution.values()) {
            let want = (23.0 / 42.0) * t - 0.5 * t * t;
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn picard_requires_the_admissible_region() {
        let s = spec_with(1.0, 0.5, 9.0, 0.0, "1", "1");
        assert!(matches!(
            picard_solve(&s, &opts(8, 8)),
            Err(SolveError::NotAdmissible { .. })
        ));
        let degenerate = spec_with(1.0, 0.5, 1.0, 1.4, "1", "1");
        assert!(matches!(
            picard_solve(&degenerate, &opts(8, 8)),
            Err(SolveError::Linear(LinearError::ExcludedBeta { .. }))
        ));
    }

    #[test]
    fn picard_solves_the_sublinear_ramp_problem() {
        let s = spec_with(2.0, 1.5, 1.0, 0.5, "t", "u^0.5");
        let mut o = opts(64, 64);
        o.init_value = 1.0;
        let r = picard_solve(&s, &o).unwrap();
        assert!(r.converged, "outcome {:?}", r.outcome);
        let scale = 1.0 + r.solution.sup_norm();
        assert!(r.residuals.fixed_point <= 1e-6 * scale);
        // positive away from the left endpoint
        let interior_min = r.solution.values()[1..]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        assert!(interior_min > 0.0);
    }

    #[test]
    fn picard_reports_the_superlinear_outcome_without_panicking() {
        let s = spec_with(0.75, 0.25, 20.0, 0.1, "t^2", "u^2*ln(1+u)");
        let mut o = opts(32, 32);
        o.max_iter = 60;
        let r = picard_solve(&s, &o).unwrap();
        // from a unit start the iteration is not guaranteed to contract;
        // whatever happens must be named in the report
        if !r.converged {
            assert!(matches!(r.outcome, Outcome::NotConverged | Outcome::TrivialLimit));
        }
    }

    #[test]
    fn newton_on_a_linear_problem_needs_at_most_two_steps() {
        let s = spec_with(1.0, 0.5, 1.0, 0.0, "1", "1");
        let r = newton_solve(&s, &opts(32, 32)).unwrap();
        assert!(r.converged);
        assert!(r.iterations <= 2, "iterations {}", r.iterations);
        for (&t, &v) in r.solution.mesh().nodes().iter().zip(r.solution.values()) {
            let want = (23.0 / 42.0) * t - 0.5 * t * t;
            assert!((v - want).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn newton_solves_the_superlinear_log_problem() {
        let s = spec_with(0.75, 0.25, 20.0, 0.1, "t^2", "u^2*ln(1+u)");
        let r = newton_solve(&s, &opts(100, 100)).unwrap();
        assert!(r.converged, "outcome {:?}", r.outcome);
        let scale = 1.0 + r.solution.sup_norm();
        assert!(r.solution.sup_norm() >= 1e-6);
        assert!(r.residuals.fixed_point <= 1e-6 * scale);
        assert!(r.residuals.bc0 <= 1e-6 * scale);
        assert!(r.residuals.bc_t <= 1e-6 * scale);
        for c in &r.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn newton_handles_the_singular_sublinear_nonlinearity() {
        let s = spec_with(1.0, 1.0 / 3.0, 2.0, 1.0, "exp(t)", "(sin(u)+ln(1+u))/u^2");
        let r = newton_solve(&s, &opts(90, 90)).unwrap();
        assert!(r.converged, "outcome {:?}", r.outcome);
        let mi = r.solution.mesh().eta_index();
        let u0 = r.solution.values()[0];
        let ueta = r.solution.values()[mi];
        assert!((u0 - ueta).abs() <= 1e-9 * (1.0 + r.solution.sup_norm()));
        assert!(u0 > 0.0);
    }

    #[test]
    fn picard_and_newton_agree_on_a_sublinear_instance() {
        let s = spec_with(2.0, 1.5, 1.0, 0.5, "t", "u^0.5");
        // the positive solution is large; give Newton a start in its basin
        let mut o = opts(64, 64);
        o.multistart = vec![1.0, 10.0, 100.0, 1000.0];
        let p = picard_solve(&s, &o).unwrap();
        let n = newton_solve(&s, &o).unwrap();
        assert!(p.converged && n.converged);
        match cross_check(&p, &n) {
            Agreement::Consistent(_) => {}
            other => panic!("expected agreement, got {other:?}"),
        }
    }

    #[test]
    fn operator_applied_start_satisfies_the_boundary_rows_immediately() {
        let s = spec_with(2.0, 1.5, 1.0, 0.5, "t", "u^2");
        let mut o = opts(32, 32);
        o.init = InitGuess::OperatorApplied;
        let r = newton_solve(&s, &o).unwrap();
        assert!(r.converged);
        let scale = 1.0 + r.solution.sup_norm();
        assert!(r.residuals.bc0 <= 1e-10 * scale);

        // Picard only attracts on the sublinear side; seed it there.
        let s = spec_with(2.0, 1.5, 1.0, 0.5, "t", "u^0.5");
        let mut po = opts(32, 32);
        po.method = Method::Picard;
        po.init = InitGuess::OperatorApplied;
        po.init_value = 0.1;
        let p = picard_solve(&s, &po).unwrap();
        assert!(p.converged, "outcome {:?}", p.outcome);
        assert!(p.solution.sup_norm() > 100.0);
    }

    #[test]
    fn newton_skips_trivial_limits_and_reports_the_nontrivial_start() {
        let s = spec_with(2.0, 1.5, 1.0, 0.5, "t", "u^0.5");
        let mut o = opts(40, 40);
        o.multistart = vec![1.0, 200.0];
        let r = newton_solve(&s, &o).unwrap();
        assert!(r.converged);
        assert_eq!(r.init_used, 200.0);
        assert!(r.solution.sup_norm() > 100.0);
    }

    #[test]
    fn refined_meshes_agree_at_shared_nodes() {
        let s = spec_with(2.0, 1.5, 1.0, 0.5, "t", "u^2");
        let coarse = newton_solve(&s, &opts(100, 100)).unwrap();
        let fine = newton_solve(&s, &opts(200, 200)).unwrap();
        assert!(coarse.converged && fine.converged);
        let mut max_diff = 0.0f64;
        for (i, &v) in coarse.solution.values().iter().enumerate() {
            max_diff = max_diff.max((v - fine.solution.values()[2 * i]).abs());
        }
        // the ode_sup defect implies an error estimate through the
        // max-principle constant T^2/8
        let t = s.t_end();
        let estimate = coarse.residuals.ode_sup * t * t / 8.0;
        assert!(
            max_diff <= 4.0 * estimate,
            "diff {max_diff} vs estimate {estimate}"
        );
    }

    #[test]
    fn converged_reports_satisfy_the_residual_contract() {
        let s = spec_with(2.0, 1.5, 1.0, 0.5, "t", "u^2");
        let o = opts(100, 100);
        let r = newton_solve(&s, &o).unwrap();
        assert!(r.converged);
        let scale = 1.0 + r.solution.sup_norm();
        assert!(r.residuals.fixed_point <= 10.0 * o.tol * scale);
        assert!(r.residuals.bc0 <= 1e-6 * scale);
        assert!(r.residuals.bc_t <= 1e-6 * scale);
        assert!(r.solution.sup_norm() >= o.trivial_floor);
    }

    #[test]
    fn ode_defect_shrinks_at_second_order_on_matched_panels() {
        // equal panel steps keep the junction formula second-order
        let s = spec_with(1.0, 0.5, 1.0, 0.25, "1", "u^2");
        let r1 = newton_solve(&s, &opts(50, 50)).unwrap();
        let r2 = newton_solve(&s, &opts(100, 100)).unwrap();
        assert!(r1.converged && r2.converged);
        let ratio = r1.residuals.ode_sup / r2.residuals.ode_sup;
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
    }
}
