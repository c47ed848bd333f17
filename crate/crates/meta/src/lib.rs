//! Problem lifecycle, solver registry and orchestration.
//!
//! A [`ProblemManager`] stores problems, runs their solvers on background
//! threads and wires decomposing solvers to the subproblems they spawn.

pub mod bounds;
pub mod chain;
mod manager;
pub mod model;
mod registry;
pub mod solver;
pub mod solvers;

use thiserror::Error;

pub use bounds::{BoundComparison, BoundReport, BoundType};
pub use manager::{ProblemManager, ProblemPatch};
pub use model::{
    Direction, Problem, ProblemId, ProblemState, ProblemSummary, ProblemType, SettingDescriptor, SettingKind,
    SettingValue, Settings, Solution, SolutionStatus, SolverDescriptor, SubRoutineBinding,
};
pub use registry::{resolve_settings, Registry};
pub use solver::{ChildRequest, ChildSolver, ChildView, Outcome, Solver, SolverResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetaError {
    #[error("unknown problem type '{0}'")]
    UnknownProblemType(String),
    #[error("no problem with id {0}")]
    UnknownProblem(ProblemId),
    #[error("unknown solver '{0}'")]
    UnknownSolver(String),
    #[error("solver '{solver}' solves {expected} problems, not {got}")]
    SolverTypeMismatch { solver: String, expected: String, got: String },
    #[error("invalid setting '{name}': {reason}")]
    InvalidSetting { name: String, reason: String },
    #[error("cannot {action} a problem in state {state}")]
    IllegalState { state: ProblemState, action: &'static str },
    #[error("{0}")]
    InvalidRequest(String),
    #[error("input cannot be parsed: {0}")]
    Unparseable(String),
    #[error("no bound is defined for {0} problems")]
    NoBound(String),
    #[error("{0}")]
    MissingValue(String),
}
