//! Classical solvers and exact oracles: knapsack (DP, branch-and-bound),
//! TSP (nearest neighbour, 2-opt, Held-Karp) and VRP (savings, brute force).

mod knapsack;
mod tour;
mod tsp;
mod validate;
mod vrp;

pub use knapsack::{
    fractional_bound, knapsack_branch_bound, knapsack_dp, parse_knapsack_solution, serialize_knapsack_solution,
    KnapsackSolution,
};
pub use tour::{cycle_length, route_length, total_route_length, Tour};
pub use tsp::{tsp_held_karp, tsp_nearest_neighbor, tsp_two_opt, HELD_KARP_LIMIT};
pub use validate::{validate_routes, ValidationReport, Violation};
pub use vrp::{vrp_brute_force, vrp_savings, BRUTE_FORCE_LIMIT};

use thiserror::Error;

use crate::formats::{InstanceError, NodeId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("instance too large: {size} exceeds limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("invalid tour: {0}")]
    InvalidTour(String),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}
