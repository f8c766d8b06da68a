//! JSON model files.
//!
//! ```json
//! {
//!   "homogeneous": { "agent": { "A": [[0, 1], [0, 0]], "B": [[0], [1]], "C": [[1, 0]] }, "count": 3 },
//!   "coupling": { "L": [[1, 1, 0], [1, 0, 1], [0, 1, 1]], "R": [[1], [0], [0]], "S": [[0, 1, 0]], "D": [[0]] }
//! }
//! ```
//!
//! `agents` (a list) may replace `homogeneous`, and `coupling.circulant`
//! (the first row of `L`) may replace `coupling.L`.

use std::path::Path;

use nalgebra::DMatrix;
use netzero_core::{validate_network, AgentSystem, CirculantSpec, Interconnection};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Row-major nested array.
pub type Rows = Vec<Vec<f64>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    #[serde(rename = "A")]
    pub a: Rows,
    #[serde(rename = "B")]
    pub b: Rows,
    #[serde(rename = "C")]
    pub c: Rows,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomogeneousSpec {
    pub agent: AgentSpec,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circulant: Option<Vec<f64>>,
    #[serde(rename = "R")]
    pub r: Rows,
    #[serde(rename = "S")]
    pub s: Rows,
    #[serde(rename = "D")]
    pub d: Rows,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agents: Option<Vec<AgentSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homogeneous: Option<HomogeneousSpec>,
    pub coupling: CouplingSpec,
}

/// A validated network ready for analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub agents: Vec<AgentSystem<f64>>,
    pub coupling: Interconnection<f64>,
    /// Set when the file used the homogeneous shorthand.
    pub shorthand_count: Option<usize>,
    /// Set when the file gave `L` as a circulant first row.
    pub circulant: Option<CirculantSpec<f64>>,
}

impl Model {
    pub fn states(&self) -> usize {
        self.agents.iter().map(|g| g.states()).sum()
    }
}

/// Reads and validates a model file.
pub fn parse_model(path: &Path) -> Result<(ModelFile, Model), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Read { path: path.display().to_string(), source: e })?;
    parse_model_source(&text, &path.display().to_string())
}

/// Parses and validates model text; `origin` prefixes syntax errors.
pub fn parse_model_source(text: &str, origin: &str) -> Result<(ModelFile, Model), CliError> {
    let file = parse_model_str(text).map_err(|e| match e {
        CliError::Parse { line, column, message, .. } => CliError::Parse { origin: origin.into(), line, column, message },
        other => other,
    })?;
    let model = file.to_model()?;
    Ok((file, model))
}

pub fn parse_model_str(text: &str) -> Result<ModelFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        origin: "<model>".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Full-precision JSON; `parse_model_str` reads it back to an equal value.
pub fn serialize_model(file: &ModelFile) -> String {
    serde_json::to_string_pretty(file).expect("model files hold only finite numbers")
}

fn matrix(field: &str, rows: &Rows, problems: &mut Vec<String>) -> DMatrix<f64> {
    let cols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
        problems.push(format!("{field}: row {} has {} entries, row 1 has {cols}", bad + 1, rows[bad].len()));
        return DMatrix::zeros(0, 0);
    }
    if let Some((i, j)) =
        rows.iter().enumerate().find_map(|(i, r)| r.iter().position(|v| !v.is_finite()).map(|j| (i, j)))
    {
        problems.push(format!("{field}: entry ({}, {}) is not finite", i + 1, j + 1));
    }
    DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

fn agent(prefix: &str, spec: &AgentSpec, problems: &mut Vec<String>) -> AgentSystem<f64> {
    AgentSystem::new(
        matrix(&format!("{prefix}.A"), &spec.a, problems),
        matrix(&format!("{prefix}.B"), &spec.b, problems),
        matrix(&format!("{prefix}.C"), &spec.c, problems),
    )
}

impl ModelFile {
    /// Expands the shorthands and checks every dimension.
    pub fn to_model(&self) -> Result<Model, CliError> {
        let mut problems = Vec::new();
        let (agents, shorthand_count) = match (&self.agents, &self.homogeneous) {
            (Some(list), None) => {
                let agents = list.iter().enumerate().map(|(i, a)| agent(&format!("agents[{}]", i + 1), a, &mut problems)).collect();
                (agents, None)
            }
            (None, Some(h)) => {
                if h.count == 0 {
                    problems.push("homogeneous.count: must be at least 1".into());
                }
                let g = agent("homogeneous.agent", &h.agent, &mut problems);
                (vec![g; h.count], Some(h.count))
            }
            (Some(_), Some(_)) => return Err(CliError::Invalid(vec!["give either `agents` or `homogeneous`, not both".into()])),
            (None, None) => return Err(CliError::Invalid(vec!["missing `agents` or `homogeneous`".into()])),
        };
        let c = &self.coupling;
        let (l, circulant) = match (&c.l, &c.circulant) {
            (Some(l), None) => (matrix("coupling.L", l, &mut problems), None),
            (None, Some(row)) => match CirculantSpec::new(row.clone()) {
                Ok(spec) => (spec.matrix(), Some(spec)),
                Err(_) => {
                    problems.push("coupling.circulant: must not be empty".into());
                    (DMatrix::zeros(0, 0), None)
                }
            },
            (Some(_), Some(_)) => {
                problems.push("coupling: give either `L` or `circulant`, not both".into());
                (DMatrix::zeros(0, 0), None)
            }
            (None, None) => {
                problems.push("coupling.L: missing (or give `circulant`)".into());
                (DMatrix::zeros(0, 0), None)
            }
        };
        let coupling = Interconnection::new(
            l,
            matrix("coupling.R", &c.r, &mut problems),
            matrix("coupling.S", &c.s, &mut problems),
            matrix("coupling.D", &c.d, &mut problems),
        );
        if problems.is_empty() {
            problems.extend(validate_network(&agents, &coupling).into_iter().map(|v| v.to_string()));
        }
        if !problems.is_empty() {
            return Err(CliError::Invalid(problems));
        }
        Ok(Model { agents, coupling, shorthand_count, circulant })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const THREE_AGENT: &str = r#"{
        "homogeneous": { "agent": { "A": [[0, 1], [0, 0]], "B": [[0], [1]], "C": [[1, 0]] }, "count": 3 },
        "coupling": { "L": [[1, 1, 0], [1, 0, 1], [0, 1, 1]], "R": [[1], [0], [0]], "S": [[0, 1, 0]], "D": [[0]] }
    }"#;

    #[test]
    fn shorthand_expands_to_identical_agents() {
        let model = parse_model_str(THREE_AGENT).unwrap().to_model().unwrap();
        assert_eq!(model.agents.len(), 3);
        assert_eq!(model.states(), 6);
        assert!(model.agents.iter().all(|g| g == &model.agents[0]));
        assert_eq!(model.shorthand_count, Some(3));
    }

    #[test]
    fn misshaped_l_is_named() {
        let text = THREE_AGENT.replace("[[1, 1, 0], [1, 0, 1], [0, 1, 1]]", "[[1, 1, 0], [1, 0, 1]]");
        let err = parse_model_str(&text).unwrap().to_model().unwrap_err();
        assert!(err.to_string().contains("coupling.L"), "{err}");
    }

    #[test]
    fn ragged_rows_are_named() {
        let text = THREE_AGENT.replace("\"R\": [[1], [0], [0]]", "\"R\": [[1], [0, 2], [0]]");
        let err = parse_model_str(&text).unwrap().to_model().unwrap_err();
        assert!(err.to_string().contains("coupling.R: row 2"), "{err}");
    }

    #[test]
    fn circulant_row_builds_l() {
        let text = THREE_AGENT.replace("\"L\": [[1, 1, 0], [1, 0, 1], [0, 1, 1]]", "\"circulant\": [0, 1, 0]");
        let model = parse_model_str(&text).unwrap().to_model().unwrap();
        assert_eq!(model.coupling.l[(1, 2)], 1.0);
        assert_eq!(model.coupling.l[(2, 0)], 1.0);
        assert!(model.circulant.is_some());
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err = parse_model_str("{\n  \"coupling\": [\n").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = THREE_AGENT.replace("\"count\": 3", "\"count\": 3, \"size\": 3");
        assert!(parse_model_str(&text).is_err());
    }
}
