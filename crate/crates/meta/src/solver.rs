use std::collections::BTreeMap;

use crate::model::{ProblemId, Settings, Solution, SolverDescriptor};

/// What a solver produced for one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub result: String,
    pub objective: Option<f64>,
    pub metadata: BTreeMap<String, String>,
}

impl SolverResult {
    pub fn new(result: String, objective: f64) -> Self {
        Self { result, objective: Some(objective), metadata: BTreeMap::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }
}

/// Solver and settings for a spawned child. `chain` is handed on as the
/// child's own `childSolver` setting; `seed_offset` is added to its `seed`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChildSolver {
    pub solver_id: String,
    pub settings: BTreeMap<String, serde_json::Value>,
    pub chain: Option<String>,
    pub seed_offset: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChildRequest {
    pub type_id: String,
    pub input: String,
    /// `None` leaves the child in NEEDS_CONFIGURATION for the client.
    pub solver: Option<ChildSolver>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Solved(SolverResult),
    /// The computation finished but produced no valid answer.
    Invalid(String),
    Failed(String),
    /// Create (more) subproblems and wait for them.
    Spawn(Vec<ChildRequest>),
}

impl From<Result<SolverResult, String>> for Outcome {
    fn from(r: Result<SolverResult, String>) -> Self {
        match r {
            Ok(r) => Outcome::Solved(r),
            Err(e) => Outcome::Failed(e),
        }
    }
}

/// A finished child as seen by the composition step.
#[derive(Debug, Clone)]
pub struct ChildView {
    pub id: ProblemId,
    pub type_id: String,
    pub input: String,
    pub solution: Solution,
}

/// Solvers are stateless: everything they need arrives in the arguments.
pub trait Solver: Send + Sync {
    fn descriptor(&self) -> &SolverDescriptor;

    fn solve(&self, input: &str, settings: &Settings) -> Outcome;

    /// Called once every child has a SOLVED solution, in spawn order.
    fn compose(&self, _input: &str, _settings: &Settings, _children: &[ChildView]) -> Outcome {
        Outcome::Failed(format!("{} does not spawn subproblems", self.descriptor().solver_id))
    }
}
