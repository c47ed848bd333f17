use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use uuid::Uuid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProblemId(Uuid);

impl ProblemId {
    pub fn new() -> Self {
        Self(Uuid::new_v4())
    }

    pub fn parse(s: &str) -> Option<Self> {
        Uuid::parse_str(s).ok().map(Self)
    }
}

impl Default for ProblemId {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProblemState {
    NeedsConfiguration,
    ReadyToSolve,
    Solving,
    Solved,
}

impl ProblemState {
    /// Whether `self -> next` is one of the four legal lifecycle edges.
    pub fn can_become(self, next: ProblemState) -> bool {
        use ProblemState::*;
        matches!(
            (self, next),
            (NeedsConfiguration, ReadyToSolve)
                | (ReadyToSolve, NeedsConfiguration)
                | (ReadyToSolve, Solving)
                | (Solving, Solved)
        )
    }

    pub fn is_configurable(self) -> bool {
        matches!(self, ProblemState::NeedsConfiguration | ProblemState::ReadyToSolve)
    }
}

impl fmt::Display for ProblemState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemState::NeedsConfiguration => "NEEDS_CONFIGURATION",
            ProblemState::ReadyToSolve => "READY_TO_SOLVE",
            ProblemState::Solving => "SOLVING",
            ProblemState::Solved => "SOLVED",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolutionStatus {
    Computing,
    Solved,
    Error,
    Invalid,
}

impl SolutionStatus {
    pub fn is_terminal(self) -> bool {
        !matches!(self, SolutionStatus::Computing)
    }
}

impl fmt::Display for SolutionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolutionStatus::Computing => "COMPUTING",
            SolutionStatus::Solved => "SOLVED",
            SolutionStatus::Error => "ERROR",
            SolutionStatus::Invalid => "INVALID",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Solution {
    pub status: SolutionStatus,
    pub result: String,
    pub objective_value: Option<f64>,
    pub metadata: BTreeMap<String, String>,
}

impl Solution {
    pub fn computing() -> Self {
        Self {
            status: SolutionStatus::Computing,
            result: String::new(),
            objective_value: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn failed(status: SolutionStatus, reason: impl Into<String>) -> Self {
        debug_assert!(matches!(status, SolutionStatus::Error | SolutionStatus::Invalid));
        let mut metadata = BTreeMap::new();
        metadata.insert("error".to_string(), reason.into());
        Self { status, result: String::new(), objective_value: None, metadata }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubRoutineBinding {
    pub sub_routine_type_id: String,
    pub child_problem_ids: Vec<ProblemId>,
}

/// A stored setting value. CHOICE settings are stored as text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SettingValue {
    Integer(i64),
    Real(f64),
    Text(String),
}

impl fmt::Display for SettingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SettingValue::Integer(v) => write!(f, "{v}"),
            SettingValue::Real(v) => write!(f, "{v}"),
            SettingValue::Text(v) => f.write_str(v),
        }
    }
}

/// Resolved solver settings: every descriptor setting has a value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Settings(pub BTreeMap<String, SettingValue>);

impl Settings {
    pub fn get(&self, name: &str) -> Option<&SettingValue> {
        self.0.get(name)
    }

    pub fn integer(&self, name: &str) -> i64 {
        match self.0.get(name) {
            Some(SettingValue::Integer(v)) => *v,
            other => panic!("setting {name} is not an integer: {other:?}"),
        }
    }

    pub fn real(&self, name: &str) -> f64 {
        match self.0.get(name) {
            Some(SettingValue::Real(v)) => *v,
            Some(SettingValue::Integer(v)) => *v as f64,
            other => panic!("setting {name} is not a real: {other:?}"),
        }
    }

    pub fn text(&self, name: &str) -> &str {
        match self.0.get(name) {
            Some(SettingValue::Text(v)) => v,
            other => panic!("setting {name} is not text: {other:?}"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Problem {
    pub id: ProblemId,
    pub type_id: String,
    pub input: String,
    pub state: ProblemState,
    pub solver_id: Option<String>,
    pub solver_settings: Settings,
    pub solution: Option<Solution>,
    pub sub_problems: Vec<SubRoutineBinding>,
    /// Problem whose solver spawned this one.
    pub parent_id: Option<ProblemId>,
}

impl Problem {
    pub(crate) fn new(type_id: &str, input: String, parent_id: Option<ProblemId>) -> Self {
        Self {
            id: ProblemId::new(),
            type_id: type_id.to_string(),
            input,
            state: ProblemState::NeedsConfiguration,
            solver_id: None,
            solver_settings: Settings::default(),
            solution: None,
            sub_problems: Vec::new(),
            parent_id,
        }
    }

    pub fn child_ids(&self) -> impl Iterator<Item = ProblemId> + '_ {
        self.sub_problems.iter().flat_map(|b| b.child_problem_ids.iter().copied())
    }

    pub fn summary(&self) -> ProblemSummary {
        ProblemSummary { id: self.id, state: self.state, type_id: self.type_id.clone() }
    }

    /// Checks the structural invariants that hold at every observable point.
    pub fn check_invariants(&self) -> Result<(), String> {
        if matches!(self.state, ProblemState::ReadyToSolve | ProblemState::Solving | ProblemState::Solved)
            && self.solver_id.is_none()
        {
            return Err(format!("{} without a solver", self.state));
        }
        if self.solution.is_some() && !matches!(self.state, ProblemState::Solving | ProblemState::Solved) {
            return Err(format!("solution present in state {}", self.state));
        }
        if self.state == ProblemState::Solved {
            match &self.solution {
                Some(s) if s.status.is_terminal() => {}
                _ => return Err("SOLVED without a terminal solution".into()),
            }
        }
        if let Some(s) = &self.solution {
            if (s.status == SolutionStatus::Solved) != !s.result.is_empty() {
                return Err("result must be non-empty exactly when status is SOLVED".into());
            }
            if s.objective_value.is_some() && s.status != SolutionStatus::Solved {
                return Err("objective value on an unsolved solution".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProblemSummary {
    pub id: ProblemId,
    pub state: ProblemState,
    pub type_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SettingKind {
    Integer,
    Real,
    Text,
    Choice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SettingDescriptor {
    pub name: String,
    pub kind: SettingKind,
    pub default: SettingValue,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub choices: Vec<String>,
    pub description: String,
}

impl SettingDescriptor {
    pub fn integer(name: &str, default: i64, description: &str) -> Self {
        Self::plain(name, SettingKind::Integer, SettingValue::Integer(default), description)
    }

    pub fn real(name: &str, default: f64, description: &str) -> Self {
        Self::plain(name, SettingKind::Real, SettingValue::Real(default), description)
    }

    pub fn text(name: &str, default: &str, description: &str) -> Self {
        Self::plain(name, SettingKind::Text, SettingValue::Text(default.to_string()), description)
    }

    pub fn choice(name: &str, default: &str, choices: &[&str], description: &str) -> Self {
        Self {
            name: name.to_string(),
            kind: SettingKind::Choice,
            default: SettingValue::Text(default.to_string()),
            choices: choices.iter().map(|c| c.to_string()).collect(),
            description: description.to_string(),
        }
    }

    fn plain(name: &str, kind: SettingKind, default: SettingValue, description: &str) -> Self {
        Self { name: name.to_string(), kind, default, choices: Vec::new(), description: description.to_string() }
    }

    /// Type-checks a raw JSON value. Integers are accepted for REAL settings.
    pub fn check(&self, raw: &serde_json::Value) -> Result<SettingValue, String> {
        match self.kind {
            SettingKind::Integer => {
                raw.as_i64().map(SettingValue::Integer).ok_or_else(|| "expected an integer".to_string())
            }
            SettingKind::Real => match raw.as_f64() {
                Some(v) if v.is_finite() => Ok(SettingValue::Real(v)),
                _ => Err("expected a finite number".to_string()),
            },
            SettingKind::Text => {
                raw.as_str().map(|s| SettingValue::Text(s.to_string())).ok_or_else(|| "expected a string".to_string())
            }
            SettingKind::Choice => match raw.as_str() {
                Some(s) if self.choices.iter().any(|c| c == s) => Ok(SettingValue::Text(s.to_string())),
                _ => Err(format!("expected one of {}", self.choices.join(", "))),
            },
        }
    }

    pub fn default_is_valid(&self) -> bool {
        match (&self.kind, &self.default) {
            (SettingKind::Integer, SettingValue::Integer(_)) => true,
            (SettingKind::Real, SettingValue::Real(v)) => v.is_finite(),
            (SettingKind::Text, SettingValue::Text(_)) => true,
            (SettingKind::Choice, SettingValue::Text(v)) => self.choices.contains(v),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolverDescriptor {
    pub solver_id: String,
    pub name: String,
    pub description: String,
    pub problem_type_id: String,
    pub settings: Vec<SettingDescriptor>,
    pub sub_routines: Vec<String>,
}

impl SolverDescriptor {
    pub fn setting(&self, name: &str) -> Option<&SettingDescriptor> {
        self.settings.iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProblemType {
    pub id: String,
    pub description: String,
    pub direction: Direction,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legal_edges() {
        use ProblemState::*;
        let all = [NeedsConfiguration, ReadyToSolve, Solving, Solved];
        let legal: Vec<_> =
            all.iter().flat_map(|&a| all.iter().map(move |&b| (a, b))).filter(|(a, b)| a.can_become(*b)).collect();
        assert_eq!(
            legal,
            vec![
                (NeedsConfiguration, ReadyToSolve),
                (ReadyToSolve, NeedsConfiguration),
                (ReadyToSolve, Solving),
                (Solving, Solved)
            ]
        );
    }

    #[test]
    fn wire_names() {
        assert_eq!(serde_json::to_string(&ProblemState::NeedsConfiguration).unwrap(), "\"NEEDS_CONFIGURATION\"");
        assert_eq!(serde_json::to_string(&SolutionStatus::Invalid).unwrap(), "\"INVALID\"");
        let p = Problem::new("tsp", String::new(), None);
        let v = serde_json::to_value(&p).unwrap();
        for key in ["id", "typeId", "input", "state", "solverId", "solverSettings", "solution", "subProblems"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn setting_checks() {
        let d = SettingDescriptor::choice("algo", "ANNEAL", &["ANNEAL", "QAOA"], "");
        assert!(d.default_is_valid());
        assert_eq!(d.check(&serde_json::json!("QAOA")), Ok(SettingValue::Text("QAOA".into())));
        assert!(d.check(&serde_json::json!("GROVER")).is_err());
        let r = SettingDescriptor::real("b", 1.0, "");
        assert_eq!(r.check(&serde_json::json!(2)), Ok(SettingValue::Real(2.0)));
        let i = SettingDescriptor::integer("n", 1, "");
        assert!(i.check(&serde_json::json!(2.5)).is_err());
        assert!(i.check(&serde_json::json!("3")).is_err());
    }
}
