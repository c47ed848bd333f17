use metasolve_core::classical::{knapsack_branch_bound, knapsack_dp, validate_routes, vrp_savings, Tour};
use metasolve_core::decomposition::{cluster_to_tsp, compose_routes, kmeans_cluster, two_phase_cluster, Clustering};
use metasolve_core::formats::{parse_routes, parse_vrp, serialize_routes, serialize_tsp, RouteSolution, VrpInstance};

use super::{child_solver_setting, descriptor, invalid_input, non_negative, spawn};
use crate::model::{SettingDescriptor, Settings, SolverDescriptor};
use crate::solver::{ChildView, Outcome, Solver, SolverResult};

const CHAIN_EXAMPLE: &str = "tsp.classical.held-karp";

fn spawn_clusters(instance: &VrpInstance, clustering: &Clustering, settings: &Settings) -> Outcome {
    let mut inputs = Vec::with_capacity(clustering.len());
    for cluster in &clustering.clusters {
        match cluster_to_tsp(instance, cluster) {
            Ok(tsp) => inputs.push(serialize_tsp(&tsp)),
            Err(e) => return Outcome::Failed(e.to_string()),
        }
    }
    spawn(settings, "tsp", inputs, 0)
}

/// Stitches one tour per cluster back into a route set and checks it.
fn compose_clusters(input: &str, children: &[ChildView]) -> Outcome {
    let instance: VrpInstance = match parse_vrp(input) {
        Ok(i) => i,
        Err(e) => return invalid_input(e),
    };
    let mut tours = Vec::with_capacity(children.len());
    for child in children {
        let routes: RouteSolution = match parse_routes(&child.solution.result) {
            Ok(r) => r,
            Err(e) => return Outcome::Failed(format!("child {} returned an unreadable tour: {e}", child.id)),
        };
        let Ok([order]) = <[Vec<u32>; 1]>::try_from(routes.routes) else {
            return Outcome::Failed(format!("child {} did not return exactly one tour", child.id));
        };
        tours.push(Tour { order, length: routes.total_length });
    }
    let solution = match compose_routes(&instance, &tours) {
        Ok(s) => s,
        Err(e) => return Outcome::Failed(e.to_string()),
    };
    finish(&instance, solution).map(|r| r.with_meta("clusters", children.len())).into()
}

fn finish(instance: &VrpInstance, solution: RouteSolution) -> Result<SolverResult, String> {
    let report = validate_routes(instance, &solution);
    if !report.is_valid() {
        return Err(format!("composed routes are infeasible: {:?}", report.violations));
    }
    Ok(SolverResult::new(serialize_routes(&solution), solution.total_length).with_meta("routes", solution.routes.len()))
}

pub struct TwoPhase(SolverDescriptor);

impl TwoPhase {
    pub fn new() -> Self {
        Self(descriptor(
            "vrp.clusterer.two-phase",
            "cluster-vrp",
            "Two-Phase Clustering",
            "Opens clusters at far-away seed customers and fills each by solving a knapsack over the remaining \
             customers; every cluster becomes a TSP through the depot.",
            vec![
                SettingDescriptor::choice(
                    "knapsackSolver",
                    "dp",
                    &["dp", "branch-and-bound"],
                    "Exact knapsack algorithm for the clustering phase",
                ),
                child_solver_setting(CHAIN_EXAMPLE),
            ],
            &["tsp"],
        ))
    }
}

impl Solver for TwoPhase {
    fn descriptor(&self) -> &SolverDescriptor {
        &self.0
    }

    fn solve(&self, input: &str, settings: &Settings) -> Outcome {
        let instance: VrpInstance = match parse_vrp(input) {
            Ok(i) => i,
            Err(e) => return invalid_input(e),
        };
        let clustering = if settings.text("knapsackSolver") == "dp" {
            two_phase_cluster(&instance, knapsack_dp)
        } else {
            two_phase_cluster(&instance, |k| Ok(knapsack_branch_bound(k)))
        };
        match clustering {
            Ok(c) => spawn_clusters(&instance, &c, settings),
            Err(e) => Outcome::Invalid(e.to_string()),
        }
    }

    fn compose(&self, input: &str, _settings: &Settings, children: &[ChildView]) -> Outcome {
        compose_clusters(input, children)
    }
}

pub struct KMeans(SolverDescriptor);

impl KMeans {
    pub fn new() -> Self {
        Self(descriptor(
            "vrp.clusterer.kmeans",
            "cluster-vrp",
            "Capacitated k-means",
            "Seeded Lloyd iterations on customer coordinates with greedy capacity repair; every cluster becomes a TSP.",
            vec![
                SettingDescriptor::integer("k", 0, "Number of clusters; 0 picks the minimum vehicle count"),
                SettingDescriptor::integer("seed", 0, "Seed for the initial centroids"),
                SettingDescriptor::integer("maxIterations", 100, "Upper limit on Lloyd iterations"),
                child_solver_setting(CHAIN_EXAMPLE),
            ],
            &["tsp"],
        ))
    }
}

impl Solver for KMeans {
    fn descriptor(&self) -> &SolverDescriptor {
        &self.0
    }

    fn solve(&self, input: &str, settings: &Settings) -> Outcome {
        let instance: VrpInstance = match parse_vrp(input) {
            Ok(i) => i,
            Err(e) => return invalid_input(e),
        };
        let (k, seed, iters) = match (
            non_negative(settings, "k"),
            non_negative(settings, "seed"),
            non_negative(settings, "maxIterations"),
        ) {
            (Ok(k), Ok(s), Ok(i)) => (k as usize, s, i as usize),
            (Err(o), _, _) | (_, Err(o), _) | (_, _, Err(o)) => return o,
        };
        let k = if k == 0 { instance.min_vehicles().max(1) } else { k };
        match kmeans_cluster(&instance, k, seed, iters) {
            Ok(c) => spawn_clusters(&instance, &c, settings),
            Err(e) => Outcome::Invalid(e.to_string()),
        }
    }

    fn compose(&self, input: &str, _settings: &Settings, children: &[ChildView]) -> Outcome {
        compose_clusters(input, children)
    }
}

pub struct Savings(SolverDescriptor);

impl Savings {
    pub fn new() -> Self {
        Self(descriptor(
            "vrp.classical.savings",
            "cluster-vrp",
            "Clarke-Wright savings",
            "Solves the whole VRP directly with the savings heuristic followed by 2-opt per route.",
            Vec::new(),
            &[],
        ))
    }
}

impl Solver for Savings {
    fn descriptor(&self) -> &SolverDescriptor {
        &self.0
    }

    fn solve(&self, input: &str, _settings: &Settings) -> Outcome {
        let instance: VrpInstance = match parse_vrp(input) {
            Ok(i) => i,
            Err(e) => return invalid_input(e),
        };
        match vrp_savings(&instance) {
            Ok(solution) => finish(&instance, solution).into(),
            Err(e) => Outcome::Invalid(e.to_string()),
        }
    }
}
