//! Numerical certification of the theory's checkable claims: hypothesis
//! screening for `a` and `f`, positivity / concavity / cone-bound checks on
//! computed solutions, the per-instance nonexistence probe above the alpha
//! bound, the sharp constants from the existence proof, and the heuristic
//! growth classification of `f`.
//!
//! All solution checks use tolerances relative to `1 + ||u||`, so they are
//! invariant under scaling of the forcing.

use crate::expr::Expr;
use crate::grid::{simpson_full, simpson_second_panel, GridFunction, Mesh};
use crate::linear::{solve_linear, LinearError};
use crate::problem::{ProblemSpec, Region};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone)]
pub enum CheckError {
    NotAdmissible { region: Region },
    WrongRegion { expected: Region, got: Region },
    TrivialForcing,
    NegativeForcing { index: usize, value: f64 },
    DegenerateWeight(String),
    Eval { at: f64, message: String },
    Linear(LinearError),
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckError::NotAdmissible { region } => {
                write!(f, "check requires the admissible region, got {region}")
            }
            CheckError::WrongRegion { expected, got } => {
                write!(f, "check requires region {expected}, got {got}")
            }
            CheckError::TrivialForcing => {
                write!(f, "forcing is identically zero; the probe is vacuous")
            }
            CheckError::NegativeForcing { index, value } => {
                write!(f, "forcing must be nonnegative, found {value} at node {index}")
            }
            CheckError::DegenerateWeight(msg) => write!(f, "{msg}"),
            CheckError::Eval { at, message } => {
                write!(f, "expression evaluation failed at {at}: {message}")
            }
            CheckError::Linear(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CheckError {}

impl From<LinearError> for CheckError {
    fn from(e: LinearError) -> Self {
        CheckError::Linear(e)
    }
}

/// Outcome of a single named check. `margin` is signed slack: positive
/// means the check passed with room against its declared tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub margin: f64,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, margin: f64, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed,
            margin,
            detail,
        }
    }
}

/// Constants from the existence proof.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProofConstants {
    /// `[2(beta+1) + beta eta (alpha eta + 2)/T + alpha beta T] / D`.
    pub k_sup: f64,
    /// `k_sup * integral over [0,T] of T (T - s) a(s) ds`.
    pub c_sup: f64,
    /// `1 / c_sup`; the largest usable small-solution slope bound.
    pub eps_max: f64,
    /// `gamma * (2 eta / D) * integral over [eta,T] of (T - s) a(s) ds`.
    pub c_cone: f64,
    /// `1 / c_cone`; the smallest usable large-solution slope bound.
    pub rho_min: f64,
}

/// Growth class of a one-sided limit of `f(u)/u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitClass {
    Zero,
    Finite,
    Infinite,
    /// Sampling failed (evaluation errors); no classification.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthVerdict {
    Superlinear,
    Sublinear,
    Neither,
}

/// Sampled estimate of the limits of `f(u)/u` at `0+` and at infinity.
#[derive(Debug, Clone, Serialize)]
pub struct LimitEstimate {
    pub f0_class: LimitClass,
    pub finf_class: LimitClass,
    pub f0_samples: Vec<f64>,
    pub finf_samples: Vec<f64>,
    pub verdict: GrowthVerdict,
    pub errors: Vec<String>,
}

/// Screens the hypotheses on `a` and `f`: `a >= 0` on `[0, T]` with
/// `a > 0` somewhere on `[eta, T]`, and `f >= 0` on its sampled range.
/// Samples `a` at 1001 uniform points and `f` at 1001 log-spaced points of
/// `[1e-6, 1e3]`.
pub fn check_hypotheses(spec: &ProblemSpec) -> CheckResult {
    const SAMPLES: usize = 1001;
    let t_end = spec.t_end();
    let mut min_a = f64::INFINITY;
    let mut min_a_at = 0.0;
    let mut max_tail = f64::NEG_INFINITY;
    let mut errors: Vec<String> = Vec::new();

    for k in 0..SAMPLES {
        let t = t_end * k as f64 / (SAMPLES - 1) as f64;
        match spec.a().eval(t) {
            Ok(v) => {
                if v < min_a {
                    min_a = v;
                    min_a_at = t;
                }
                if t >= spec.eta() {
                    max_tail = max_tail.max(v);
                }
            }
            Err(e) => {
                if errors.len() < 3 {
                    errors.push(format!("a({t}): {e}"));
                }
            }
        }
    }

    let mut min_f = f64::INFINITY;
    let mut min_f_at = 0.0;
    for k in 0..SAMPLES {
        let exponent = -6.0 + 9.0 * k as f64 / (SAMPLES - 1) as f64;
        let u = 10f64.powf(exponent);
        match spec.f().eval(u) {
            Ok(v) => {
                if v < min_f {
                    min_f = v;
                    min_f_at = u;
                }
            }
            Err(e) => {
                if errors.len() < 3 {
                    errors.push(format!("f({u}): {e}"));
                }
            }
        }
    }

    let evaluable = errors.is_empty();
    let passed = evaluable && min_a >= 0.0 && min_f >= 0.0 && max_tail > 0.0;
    let margin = if evaluable {
        min_a.min(min_f).min(max_tail)
    } else {
        f64::NEG_INFINITY
    };
    let detail = if !evaluable {
        errors.join("; ")
    } else if min_a < 0.0 {
        format!("a({min_a_at}) = {min_a} < 0")
    } else if min_f < 0.0 {
        format!("f({min_f_at}) = {min_f} < 0")
    } else if max_tail <= 0.0 {
        format!("a vanishes on [{}, {t_end}]", spec.eta())
    } else {
        format!("min a = {min_a}, min f = {min_f}, max a on tail = {max_tail}")
    };
    CheckResult::new("hypotheses", passed, margin, detail)
}

/// Passes when the minimum node value clears `-1e-9 (1 + ||u||)`.
pub fn check_positivity(u: &GridFunction) -> CheckResult {
    let tol = 1e-9 * (1.0 + u.sup_norm());
    let (idx, min) = u.min_value();
    let margin = min + tol;
    CheckResult::new(
        "positivity",
        margin >= 0.0,
        margin,
        format!("min u = {min} at node {idx} (t = {})", u.mesh().nodes()[idx]),
    )
}

/// Cone lower bound: min of `u` over the nodes in `[eta, T]` must clear
/// `gamma * max(u)` within `1e-8 (1 + ||u||)`.
pub fn check_cone_bound(u: &GridFunction, spec: &ProblemSpec) -> Result<CheckResult, CheckError> {
    let gamma = spec
        .cone_gamma()
        .map_err(|_| CheckError::NotAdmissible {
            region: spec.classify().region,
        })?;
    let tol = 1e-8 * (1.0 + u.sup_norm());
    let mi = u.mesh().eta_index();
    let tail_min = u.values()[mi..]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let (_, max) = u.max_value();
    let margin = tail_min - gamma * max + tol;
    Ok(CheckResult::new(
        "cone_bound",
        margin >= 0.0,
        margin,
        format!("min over [eta,T] = {tail_min}, gamma*max = {}", gamma * max),
    ))
}

/// Concavity of the node sequence: every within-panel second difference
/// must stay below `1e-8 (1 + ||u||)`. The junction node is skipped; its
/// spacing is non-uniform.
pub fn check_concavity(u: &GridFunction) -> CheckResult {
    let tol = 1e-8 * (1.0 + u.sup_norm());
    let mi = u.mesh().eta_index();
    let vals = u.values();
    let mut worst = f64::NEG_INFINITY;
    let mut worst_idx = 0;
    for i in 1..vals.len() - 1 {
        if i == mi {
            continue;
        }
        let second = vals[i - 1] - 2.0 * vals[i] + vals[i + 1];
        if second > worst {
            worst = second;
            worst_idx = i;
        }
    }
    let margin = tol - worst;
    CheckResult::new(
        "concavity",
        margin >= 0.0,
        margin,
        format!("largest second difference {worst} at node {worst_idx}"),
    )
}

/// Certifies nonexistence for one instance above the alpha bound: solves
/// the linear problem for the given nonnegative, nontrivial forcing and
/// passes when the solution dips strictly negative somewhere.
pub fn nonexistence_probe(spec: &ProblemSpec, y: &GridFunction) -> Result<CheckResult, CheckError> {
    let region = spec.classify().region;
    if region != Region::NoPositiveSolution {
        return Err(CheckError::WrongRegion {
            expected: Region::NoPositiveSolution,
            got: region,
        });
    }
    if let Some((index, &value)) = y.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(CheckError::NegativeForcing { index, value });
    }
    if y.values().iter().all(|&v| v == 0.0) {
        return Err(CheckError::TrivialForcing);
    }
    let u = solve_linear(y, spec)?;
    let tol = 1e-12 * (1.0 + u.sup_norm());
    let (idx, min) = u.min_value();
    let margin = -min - tol;
    Ok(CheckResult::new(
        "nonexistence_probe",
        margin > 0.0,
        margin,
        format!(
            "min u = {min} at t = {}; negative value certifies nonexistence",
            u.mesh().nodes()[idx]
        ),
    ))
}

/// Evaluates the proof constants on the given mesh (panel-Simpson
/// quadratures of the weighted `a` integrals).
pub fn proof_constants(spec: &ProblemSpec, mesh: &Mesh) -> Result<ProofConstants, CheckError> {
    let classification = spec.classify();
    if classification.region != Region::Admissible {
        return Err(CheckError::NotAdmissible {
            region: classification.region,
        });
    }
    let t_end = spec.t_end();
    let mut sup_values = Vec::with_capacity(mesh.len());
    let mut tail_values = Vec::with_capacity(mesh.len());
    for &t in mesh.nodes() {
        let a = spec.a().eval(t).map_err(|e| CheckError::Eval {
            at: t,
            message: e.to_string(),
        })?;
        sup_values.push(t_end * (t_end - t) * a);
        tail_values.push((t_end - t) * a);
    }
    let sup_gf = GridFunction::from_values(mesh.clone(), sup_values).expect("finite integrand");
    let tail_gf = GridFunction::from_values(mesh.clone(), tail_values).expect("finite integrand");
    let int_sup = simpson_full(&sup_gf);
    let int_tail = simpson_second_panel(&tail_gf);

    let d = classification.denominator;
    let gamma = classification.gamma.expect("admissible region has gamma");
    let (eta, alpha, beta) = (spec.eta(), spec.alpha(), spec.beta());
    let k_sup =
        (2.0 * (beta + 1.0) + beta * eta * (alpha * eta + 2.0) / t_end + alpha * beta * t_end) / d;
    let c_sup = k_sup * int_sup;
    let c_cone = gamma * (2.0 * eta / d) * int_tail;
    if c_cone <= 0.0 || c_sup <= 0.0 {
        return Err(CheckError::DegenerateWeight(format!(
            "the weight a(t) contributes nothing on [{eta}, {t_end}]; \
             a positive value somewhere on that interval is required"
        )));
    }
    Ok(ProofConstants {
        k_sup,
        c_sup,
        eps_max: 1.0 / c_sup,
        c_cone,
        rho_min: 1.0 / c_cone,
    })
}

/// Classifies the growth of `f` by sampling `f(u)/u` near zero
/// (`u = 10^-k`, `k = 3..=8`) and near infinity (`u = 10^k`, `k = 2..=7`).
/// A tail that decreases monotonically below `1e-3` reads as a zero limit;
/// one that increases monotonically above `1e3` reads as infinite. The
/// verdict is advisory metadata, never a solver gate.
pub fn estimate_limits(f: &Expr) -> LimitEstimate {
    let mut errors = Vec::new();
    let sample = |exponents: &[i32], errors: &mut Vec<String>| -> Option<Vec<f64>> {
        let mut out = Vec::with_capacity(exponents.len());
        for &k in exponents {
            let u = 10f64.powi(k);
            match f.eval(u) {
                Ok(v) => out.push(v / u),
                Err(e) => {
                    errors.push(format!("f({u}): {e}"));
                    return None;
                }
            }
        }
        Some(out)
    };

    let f0_samples = sample(&[-3, -4, -5, -6, -7, -8], &mut errors);
    let finf_samples = sample(&[2, 3, 4, 5, 6, 7], &mut errors);

    let classify = |samples: &Option<Vec<f64>>| -> LimitClass {
        let Some(s) = samples else {
            return LimitClass::Unknown;
        };
        let tail = &s[s.len() - 3..];
        let last = tail[2];
        if tail[0] > tail[1] && tail[1] > tail[2] && last < 1e-3 {
            LimitClass::Zero
        } else if tail[0] < tail[1] && tail[1] < tail[2] && last > 1e3 {
            LimitClass::Infinite
        } else {
            LimitClass::Finite
        }
    };

    let f0_class = classify(&f0_samples);
    let finf_class = classify(&finf_samples);
    let verdict = match (f0_class, finf_class) {
        (LimitClass::Zero, LimitClass::Infinite) => GrowthVerdict::Superlinear,
        (LimitClass::Infinite, LimitClass::Zero) => GrowthVerdict::Sublinear,
        _ => GrowthVerdict::Neither,
    };
    LimitEstimate {
        f0_class,
        finf_class,
        f0_samples: f0_samples.unwrap_or_default(),
        finf_samples: finf_samples.unwrap_or_default(),
        verdict,
        errors,
    }
}

/// Aggregate outcome of a randomized suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
    pub worst_margin: f64,
    pub worst_detail: String,
}

impl SuiteOutcome {
    fn new(name: &str) -> Self {
        SuiteOutcome {
            name: name.into(),
            samples: 0,
            failures: 0,
            worst_margin: f64::INFINITY,
            worst_detail: String::new(),
        }
    }

    fn record(&mut self, r: &CheckResult, context: &str) {
        self.samples += 1;
        if !r.passed {
            self.failures += 1;
        }
        if r.margin < self.worst_margin {
            self.worst_margin = r.margin;
            self.worst_detail = format!("{context}: {}", r.detail);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Positivity, cone-bound and concavity outcomes over shared samples.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibleSuites {
    pub positivity: SuiteOutcome,
    pub cone: SuiteOutcome,
    pub concavity: SuiteOutcome,
}

fn unit_exprs() -> (Expr, Expr) {
    (Expr::Constant(1.0), Expr::Constant(1.0))
}

fn sample_admissible(rng: &mut ChaCha8Rng) -> ProblemSpec {
    let t_end = rng.gen_range(0.5..2.5);
    let eta = t_end * rng.gen_range(0.15..0.85);
    let (a, f) = unit_exprs();
    let probe = ProblemSpec::new(t_end, eta, 1.0, 0.0, a.clone(), f.clone()).unwrap();
    let alpha = probe.alpha_bound() * rng.gen_range(0.05..0.95);
    let probe = ProblemSpec::new(t_end, eta, alpha, 0.0, a.clone(), f.clone()).unwrap();
    let beta = probe.beta_bound() * rng.gen_range(0.0..0.9);
    ProblemSpec::new(t_end, eta, alpha, beta, a, f).unwrap()
}

/// Nonnegative forcing family: `c0 + c1 s + c2 s^2 + c3 max(0, s - eta)`
/// with coefficients in `[0, 1]`; spans smooth and kinked cases.
fn sample_forcing(rng: &mut ChaCha8Rng, mesh: &Mesh) -> GridFunction {
    loop {
        let c: [f64; 4] = [
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
        ];
        if c.iter().sum::<f64>() < 0.05 {
            continue;
        }
        let eta = mesh.eta();
        return GridFunction::from_fn(mesh, |s| {
            c[0] + c[1] * s + c[2] * s * s + c[3] * (s - eta).max(0.0)
        });
    }
}

/// Runs positivity, cone-bound and concavity checks on `count` random
/// admissible instances with random nonnegative forcings.
pub fn admissible_suite(count: usize, seed: u64, m: usize, n: usize) -> AdmissibleSuites {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = AdmissibleSuites {
        positivity: SuiteOutcome::new("positivity_suite"),
        cone: SuiteOutcome::new("cone_bound_suite"),
        concavity: SuiteOutcome::new("concavity_suite"),
    };
    for k in 0..count {
        let spec = sample_admissible(&mut rng);
        let mesh = Mesh::build(spec.t_end(), spec.eta(), m, n).expect("suite mesh");
        let y = sample_forcing(&mut rng, &mesh);
        let u = solve_linear(&y, &spec).expect("admissible specs are non-degenerate");
        let context = format!(
            "sample {k}: T={} eta={} alpha={} beta={}",
            spec.t_end(),
            spec.eta(),
            spec.alpha(),
            spec.beta()
        );
        out.positivity.record(&check_positivity(&u), &context);
        out.cone
            .record(&check_cone_bound(&u, &spec).expect("admissible"), &context);
        out.concavity.record(&check_concavity(&u), &context);
    }
    out
}

/// Runs the nonexistence probe on `count` random instances above the alpha
/// bound with random nontrivial nonnegative forcings.
pub fn nonexistence_suite(count: usize, seed: u64, m: usize, n: usize) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x5eed));
    let mut out = SuiteOutcome::new("nonexistence_suite");
    for k in 0..count {
        let t_end = rng.gen_range(0.5..2.5);
        let eta = t_end * rng.gen_range(0.15..0.85);
        let (a, f) = unit_exprs();
        let probe = ProblemSpec::new(t_end, eta, 1.0, 0.0, a.clone(), f.clone()).unwrap();
        let alpha = probe.alpha_bound() * rng.gen_range(1.01..5.0);
        let beta = rng.gen_range(0.0..2.0);
        let spec = ProblemSpec::new(t_end, eta, alpha, beta, a, f).unwrap();
        let mesh = Mesh::build(t_end, eta, m, n).expect("suite mesh");
        let y = sample_forcing(&mut rng, &mesh);
        let context = format!("sample {k}: T={t_end} eta={eta} alpha={alpha} beta={beta}");
        match nonexistence_probe(&spec, &y) {
            Ok(r) => out.record(&r, &context),
            Err(e) => out.record(
                &CheckResult::new("nonexistence_probe", false, f64::NEG_INFINITY, e.to_string()),
                &context,
            ),
        }
    }
    out
}
