use metasolve_core::classical::{knapsack_branch_bound, knapsack_dp, serialize_knapsack_solution, KnapsackSolution};
use metasolve_core::formats::{parse_knapsack, KnapsackInstance};

use super::{descriptor, invalid_input};
use crate::model::{Settings, SolverDescriptor};
use crate::solver::{Outcome, Solver, SolverResult};

fn solved(solution: KnapsackSolution) -> Outcome {
    Outcome::Solved(
        SolverResult::new(serialize_knapsack_solution(&solution), solution.total_value)
            .with_meta("items", solution.chosen.len()),
    )
}

fn parse(input: &str) -> Result<KnapsackInstance, Outcome> {
    parse_knapsack(input).map_err(invalid_input)
}

pub struct Dp(SolverDescriptor);

impl Dp {
    pub fn new() -> Self {
        Self(descriptor(
            "knapsack.classical.dp",
            "knapsack",
            "Dynamic programming",
            "Exact DP over capacities; ties go to the lexicographically smallest item list.",
            Vec::new(),
            &[],
        ))
    }
}

impl Solver for Dp {
    fn descriptor(&self) -> &SolverDescriptor {
        &self.0
    }

    fn solve(&self, input: &str, _settings: &Settings) -> Outcome {
        match parse(input) {
            Ok(k) => match knapsack_dp(&k) {
                Ok(s) => solved(s),
                Err(e) => Outcome::Failed(e.to_string()),
            },
            Err(o) => o,
        }
    }
}

pub struct BranchBound(SolverDescriptor);

impl BranchBound {
    pub fn new() -> Self {
        Self(descriptor(
            "knapsack.classical.branch-and-bound",
            "knapsack",
            "Branch and bound",
            "Depth-first branch and bound pruned by the fractional (Dantzig) bound.",
            Vec::new(),
            &[],
        ))
    }
}

impl Solver for BranchBound {
    fn descriptor(&self) -> &SolverDescriptor {
        &self.0
    }

    fn solve(&self, input: &str, _settings: &Settings) -> Outcome {
        match parse(input) {
            Ok(k) => solved(knapsack_branch_bound(&k)),
            Err(o) => o,
        }
    }
}
