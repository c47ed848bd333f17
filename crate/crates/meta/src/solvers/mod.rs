//! Built-in solvers, one module per problem type.

mod knapsack;
mod qcp;
mod qubo;
mod tsp;
mod vrp;

use std::sync::Arc;

use metasolve_core::formats::ParseError;

use crate::model::{SettingDescriptor, SolverDescriptor};
use crate::solver::{ChildRequest, ChildSolver, Outcome, Solver};
use crate::{chain, Settings};

pub use qcp::backend_solver_id;

pub fn builtin() -> Vec<Arc<dyn Solver>> {
    vec![
        Arc::new(vrp::TwoPhase::new()),
        Arc::new(vrp::KMeans::new()),
        Arc::new(vrp::Savings::new()),
        Arc::new(tsp::TwoOpt::new()),
        Arc::new(tsp::HeldKarp::new()),
        Arc::new(tsp::QuboTransformation::new()),
        Arc::new(qubo::QuantumSampler::new()),
        Arc::new(qubo::Exhaustive::new()),
        Arc::new(qcp::Annealer::new()),
        Arc::new(qcp::StatevectorQaoa::new()),
        Arc::new(qcp::RemoteStub::new()),
        Arc::new(knapsack::Dp::new()),
        Arc::new(knapsack::BranchBound::new()),
    ]
}

fn descriptor(
    solver_id: &str,
    problem_type_id: &str,
    name: &str,
    description: &str,
    settings: Vec<SettingDescriptor>,
    sub_routines: &[&str],
) -> SolverDescriptor {
    SolverDescriptor {
        solver_id: solver_id.into(),
        name: name.into(),
        description: description.into(),
        problem_type_id: problem_type_id.into(),
        settings,
        sub_routines: sub_routines.iter().map(|s| s.to_string()).collect(),
    }
}

fn child_solver_setting(example: &str) -> SettingDescriptor {
    SettingDescriptor::text(
        "childSolver",
        "",
        &format!("Solver chain applied to spawned subproblems, e.g. '{example}'. Empty leaves them for manual configuration."),
    )
}

fn invalid_input(e: ParseError) -> Outcome {
    Outcome::Invalid(format!("unparseable input: {e}"))
}

/// Subproblems of one type, configured from the `childSolver` setting.
fn spawn(settings: &Settings, type_id: &str, inputs: Vec<String>, seed_offset: i64) -> Outcome {
    let solver = match chain::child_solver(settings.text("childSolver"), seed_offset) {
        Ok(s) => s,
        Err(e) => return Outcome::Failed(format!("childSolver: {e}")),
    };
    Outcome::Spawn(
        inputs
            .into_iter()
            .map(|input| ChildRequest { type_id: type_id.into(), input, solver: solver.clone() })
            .collect(),
    )
}

fn spawn_with(type_id: &str, input: String, solver: ChildSolver) -> Outcome {
    Outcome::Spawn(vec![ChildRequest { type_id: type_id.into(), input, solver: Some(solver) }])
}

fn non_negative(settings: &Settings, name: &str) -> Result<u64, Outcome> {
    u64::try_from(settings.integer(name)).map_err(|_| Outcome::Invalid(format!("{name} must not be negative")))
}
