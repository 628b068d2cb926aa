//! JSON run configuration.
//!
//! Schema:
//!
//! ```json
//! {
//!   "T": 2.0, "eta": 1.5, "alpha": 1.0, "beta": 0.5,
//!   "a": "t", "f": "u^2",
//!   "solver": {
//!     "method": "newton",
//!     "panels": [400, 400],
//!     "tol": 1e-10,
//!     "max_iter": 100,
//!     "damping": 1.0,
//!     "init_value": 1.0,
//!     "multistart": [0.1, 1.0, 10.0],
//!     "trivial_floor": 1e-6
//!   },
//!   "output": { "csv": "solution.csv", "report": "report.json" }
//! }
//! ```
//!
//! `solver` and `output` are optional, as is every key inside them;
//! omitted solver fields take the defaults. Unknown keys are rejected so
//! typos surface as errors rather than silently ignored settings.

use crate::expr::parse_expr;
use crate::problem::{ProblemError, ProblemSpec};
use crate::solver::{Method, SolverOptions};
use serde::Deserialize;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum ConfigError {
    Io { path: PathBuf, source: std::io::Error },
    Json(String),
    Expr { field: &'static str, message: String },
    Spec(ProblemError),
    Solver(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => {
                write!(f, "cannot read config {}: {source}", path.display())
            }
            ConfigError::Json(msg) => write!(f, "config schema error: {msg}"),
            ConfigError::Expr { field, message } => {
                write!(f, "config key `{field}`: {message}")
            }
            ConfigError::Spec(e) => write!(f, "config parameter error: {e}"),
            ConfigError::Solver(msg) => write!(f, "config key `solver`: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(rename = "T")]
    t_end: f64,
    eta: f64,
    alpha: f64,
    beta: f64,
    a: String,
    f: String,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    method: Option<String>,
    panels: Option<[usize; 2]>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    damping: Option<f64>,
    init_value: Option<f64>,
    multistart: Option<Vec<f64>>,
    trivial_floor: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    csv: Option<PathBuf>,
    report: Option<PathBuf>,
}

/// A fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: ProblemSpec,
    pub solver: SolverOptions,
    pub csv_path: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig =
        serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))?;

    let a = parse_expr(&raw.a, "t").map_err(|e| ConfigError::Expr {
        field: "a",
        message: e.to_string(),
    })?;
    let f = parse_expr(&raw.f, "u").map_err(|e| ConfigError::Expr {
        field: "f",
        message: e.to_string(),
    })?;
    let spec = ProblemSpec::new(raw.t_end, raw.eta, raw.alpha, raw.beta, a, f)
        .map_err(ConfigError::Spec)?;

    let mut solver = SolverOptions::default();
    let rs = raw.solver;
    if let Some(method) = rs.method {
        solver.method = match method.to_ascii_lowercase().as_str() {
            "picard" => Method::Picard,
            "newton" => Method::Newton,
            other => {
                return Err(ConfigError::Solver(format!(
                    "unknown method `{other}` (expected `picard` or `newton`)"
                )))
            }
        };
    }
    if let Some([m, n]) = rs.panels {
        solver.m = m;
        solver.n = n;
    }
    if let Some(tol) = rs.tol {
        solver.tol = tol;
    }
    if let Some(max_iter) = rs.max_iter {
        solver.max_iter = max_iter;
    }
    if let Some(damping) = rs.damping {
        solver.damping = damping;
    }
    if let Some(init_value) = rs.init_value {
        solver.init_value = init_value;
    }
    if let Some(multistart) = rs.multistart {
        solver.multistart = multistart;
    }
    if let Some(floor) = rs.trivial_floor {
        solver.trivial_floor = floor;
    }

    Ok(RunConfig {
        spec,
        solver,
        csv_path: raw.output.csv,
        report_path: raw.output.report,
    })
}
