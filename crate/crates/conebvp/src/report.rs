//! Run artifacts: the JSON report and the solution CSV.
//!
//! The CSV is the regression-golden format: header `t,u`, one row per
//! node, 17 significant digits, LF line endings — byte-identical across
//! runs of the same configuration.

use crate::checks::{CheckResult, LimitEstimate, ProofConstants, SuiteOutcome};
use crate::grid::GridFunction;
use crate::problem::ParamClassification;
use crate::solver::{IterRecord, Outcome, Residuals, SolveReport};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub converged: bool,
    pub outcome: Outcome,
    pub iterations: usize,
    pub init_used: f64,
    pub sup_norm: f64,
    pub panels: [usize; 2],
    pub residuals: Residuals,
    pub clamp_events: usize,
    pub floor_events: usize,
    pub trace: Vec<IterRecord>,
}

impl SolveSummary {
    pub fn from_report(r: &SolveReport) -> Self {
        let mesh = r.solution.mesh();
        SolveSummary {
            converged: r.converged,
            outcome: r.outcome,
            iterations: r.iterations,
            init_used: r.init_used,
            sup_norm: r.solution.sup_norm(),
            panels: [mesh.m(), mesh.n()],
            residuals: r.residuals,
            clamp_events: r.clamp_events,
            floor_events: r.floor_events,
            trace: r.trace.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteBundle {
    pub positivity: SuiteOutcome,
    pub cone: SuiteOutcome,
    pub concavity: SuiteOutcome,
    pub nonexistence: SuiteOutcome,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

/// The machine-readable record of one CLI run.
#[derive(Debug, Clone, Serialize, Default)]
pub struct RunReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<ParamClassification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constants: Option<ProofConstants>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limits: Option<LimitEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suites: Option<SuiteBundle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.into(),
            ..RunReport::default()
        }
    }
}

pub fn write_report(path: &Path, report: &RunReport) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    std::fs::write(path, text)
}

pub fn write_csv(path: &Path, solution: &GridFunction) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut out = Vec::with_capacity(solution.values().len() * 48 + 4);
    out.extend_from_slice(b"t,u\n");
    for (&t, &u) in solution.mesh().nodes().iter().zip(solution.values()) {
        writeln!(out, "{t:.16e},{u:.16e}")?;
    }
    std::fs::write(path, out)
}
