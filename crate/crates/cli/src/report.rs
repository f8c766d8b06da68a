//! Machine-readable reports. Field order is fixed by the struct definitions
//! and floats are written in shortest round-trip form, so equal inputs give
//! byte-identical documents.

use std::io::Write;
use std::path::Path;

use netzero_core::{Cx, Tolerances, ZeroReport};
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl From<Cx<f64>> for Complex {
    fn from(z: Cx<f64>) -> Self {
        Self { re: z.re, im: z.im }
    }
}

pub fn complexes(points: &[Cx<f64>]) -> Vec<Complex> {
    points.iter().map(|&z| z.into()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroEntry {
    pub location: Complex,
    pub multiplicity: usize,
    /// `σ_r/σ_1` of the pencil at the zero, when the engine confirmed it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSummary {
    pub method: &'static str,
    pub finite_zeros: Vec<ZeroEntry>,
    pub zero_count: usize,
    pub has_infinite_zero: bool,
    pub has_origin_zero: bool,
    pub normal_rank_pencil: usize,
    pub normal_rank_transfer: usize,
    pub rank_feedthrough: usize,
    pub multiplicity_heuristic: bool,
    pub rejected_candidates: Vec<Complex>,
    pub notes: Vec<String>,
}

impl From<&ZeroReport<f64>> for ZeroSummary {
    fn from(r: &ZeroReport<f64>) -> Self {
        let finite_zeros = r
            .finite_zeros
            .iter()
            .map(|c| ZeroEntry {
                location: c.location.into(),
                multiplicity: c.multiplicity,
                sigma_ratio: r
                    .diagnostics
                    .confirmations
                    .iter()
                    .find(|k| k.passed && k.location == c.location)
                    .map(|k| k.sigma_ratio),
            })
            .collect();
        Self {
            method: r.diagnostics.method.name(),
            finite_zeros,
            zero_count: r.zero_count(),
            has_infinite_zero: r.has_infinite_zero,
            has_origin_zero: r.has_origin_zero,
            normal_rank_pencil: r.normal_rank_pencil,
            normal_rank_transfer: r.normal_rank_tf,
            rank_feedthrough: r.rank_feedthrough,
            multiplicity_heuristic: r.diagnostics.multiplicity_heuristic,
            rejected_candidates: complexes(&r.diagnostics.rejected),
            notes: r.diagnostics.notes.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToleranceEcho {
    pub cluster: f64,
    pub confirm: f64,
    pub degree: f64,
    pub pole_residual: f64,
    pub coprime: f64,
    pub matching: f64,
}

impl From<&Tolerances<f64>> for ToleranceEcho {
    fn from(t: &Tolerances<f64>) -> Self {
        Self {
            cluster: t.cluster,
            confirm: t.confirm,
            degree: t.degree,
            pole_residual: t.pole_residual,
            coprime: t.coprime,
            matching: t.matching,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommandEcho {
    pub name: String,
    /// Arguments that reproduce this report.
    pub argv: Vec<String>,
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelSummary {
    pub agents: usize,
    pub states: usize,
    pub inputs: usize,
    pub outputs: usize,
    pub homogeneous_shorthand: bool,
    pub circulant_shorthand: bool,
}

/// One cross-check: a property the result must satisfy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// A hypothesis the command needed but the model does not satisfy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub hypothesis: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Finding,
    HypothesisViolation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: CommandEcho,
    pub input_digest: String,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: ToleranceEcho,
    pub model: ModelSummary,
    pub status: Status,
    /// Command-specific results.
    pub results: Value,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

impl Report {
    /// 0 when every check passed, 1 on a failed check or a violated hypothesis.
    pub fn exit_code(&self) -> u8 {
        match self.status {
            Status::Ok => 0,
            Status::Finding | Status::HypothesisViolation => 1,
        }
    }

    /// Sets the status from the checks and the violation.
    pub fn settle(&mut self) {
        self.status = if self.violation.is_some() {
            Status::HypothesisViolation
        } else if self.checks.iter().all(|c| c.passed) {
            Status::Ok
        } else {
            Status::Finding
        };
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Writes the report to `path`, or to stdout when `path` is `None`.
pub fn write_report(report: &Report, path: Option<&Path>) -> Result<(), CliError> {
    let text = report.to_json();
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Write { path: p.display().to_string(), source: e }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Write { path: "<stdout>".into(), source: e })
        }
    }
}
