use metasolve_core::classical::{tsp_held_karp, tsp_nearest_neighbor, tsp_two_opt, Tour};
use metasolve_core::formats::Geometry;
use metasolve_core::formats::{parse_tsp, serialize_qubo, serialize_routes, RouteSolution, TspInstance};
use metasolve_core::quantum::{parse_sampleset, sampleset_to_tour, SampleSet};
use metasolve_core::tsp_qubo::{encode_tsp_with_penalty, TspQuboEncoding};

use super::{child_solver_setting, descriptor, invalid_input, non_negative, spawn};
use crate::model::{SettingDescriptor, Settings, SolverDescriptor};
use crate::solver::{ChildView, Outcome, Solver, SolverResult};

fn parse(input: &str) -> Result<TspInstance, Outcome> {
    parse_tsp(input).map_err(invalid_input)
}

fn tour_result(tour: Tour) -> SolverResult {
    let length = tour.length;
    SolverResult::new(serialize_routes(&RouteSolution::new(vec![tour.order], length)), length)
}

pub struct TwoOpt(SolverDescriptor);

impl TwoOpt {
    pub fn new() -> Self {
        Self(descriptor(
            "tsp.classical.two-opt",
            "tsp",
            "Nearest neighbour + 2-opt",
            "Heuristic tour: nearest-neighbour construction improved by seeded 2-opt local search.",
            vec![
                SettingDescriptor::integer("seed", 0, "Seed for the move scan order"),
                SettingDescriptor::integer("maxPasses", 1000, "Upper limit on improvement passes"),
            ],
            &[],
        ))
    }
}

impl Solver for TwoOpt {
    fn descriptor(&self) -> &SolverDescriptor {
        &self.0
    }

    fn solve(&self, input: &str, settings: &Settings) -> Outcome {
        let instance = match parse(input) {
            Ok(i) => i,
            Err(o) => return o,
        };
        let (seed, passes) = match (non_negative(settings, "seed"), non_negative(settings, "maxPasses")) {
            (Ok(s), Ok(p)) => (s, p as usize),
            (Err(o), _) | (_, Err(o)) => return o,
        };
        let start = instance.node_ids().min().expect("instances have nodes");
        let tour = tsp_nearest_neighbor(&instance, start).and_then(|t| tsp_two_opt(&instance, &t, passes, seed));
        match tour {
            Ok(t) => Outcome::Solved(tour_result(t)),
            Err(e) => Outcome::Failed(e.to_string()),
        }
    }
}

pub struct HeldKarp(SolverDescriptor);

impl HeldKarp {
    pub fn new() -> Self {
        Self(descriptor(
            "tsp.classical.held-karp",
            "tsp",
            "Held-Karp",
            "Exact dynamic program over subsets; refuses instances above 20 cities.",
            Vec::new(),
            &[],
        ))
    }
}

impl Solver for HeldKarp {
    fn descriptor(&self) -> &SolverDescriptor {
        &self.0
    }

    fn solve(&self, input: &str, _settings: &Settings) -> Outcome {
        let instance = match parse(input) {
            Ok(i) => i,
            Err(o) => return o,
        };
        match tsp_held_karp(&instance) {
            Ok(t) => Outcome::Solved(tour_result(t)),
            Err(e) => Outcome::Failed(e.to_string()),
        }
    }
}

pub struct QuboTransformation(SolverDescriptor);

impl QuboTransformation {
    pub fn new() -> Self {
        Self(descriptor(
            "tsp.qubo.transformation",
            "tsp",
            "TSP to QUBO",
            "Encodes the tour as a one-hot city-by-position QUBO with equality penalties, hands it to a QUBO \
             solver and decodes the lowest-energy valid sample. Resamples when no sample decodes.",
            vec![
                SettingDescriptor::real("weightB", 0.0, "Weight of the distance term; 0 scales it to 1 / longest edge"),
                SettingDescriptor::real("penaltyA", 0.0, "Constraint penalty; 0 picks B * n * longest edge + 1"),
                SettingDescriptor::integer("retryBudget", 3, "Extra sampling rounds when no sample is a valid tour"),
                child_solver_setting("qubo.quantum.sampler[seed=1]"),
            ],
            &["qubo"],
        ))
    }

    fn encode(instance: &TspInstance, settings: &Settings) -> Result<TspQuboEncoding, String> {
        let mut b = settings.real("weightB");
        if b == 0.0 {
            let longest = instance.distance_matrix().max_entry();
            b = if longest > 0.0 { 1.0 / longest } else { 1.0 };
        }
        let a = settings.real("penaltyA");
        encode_tsp_with_penalty(instance, b, (a != 0.0).then_some(a)).map_err(|e| e.to_string())
    }
}

impl Solver for QuboTransformation {
    fn descriptor(&self) -> &SolverDescriptor {
        &self.0
    }

    fn solve(&self, input: &str, settings: &Settings) -> Outcome {
        let instance = match parse(input) {
            Ok(i) => i,
            Err(o) => return o,
        };
        if let Err(o) = non_negative(settings, "retryBudget") {
            return o;
        }
        match Self::encode(&instance, settings) {
            Ok(enc) => spawn(settings, "qubo", vec![serialize_qubo(&enc.qubo)], 0),
            Err(e) => Outcome::Invalid(e),
        }
    }

    fn compose(&self, input: &str, settings: &Settings, children: &[ChildView]) -> Outcome {
        let instance = match parse(input) {
            Ok(i) => i,
            Err(o) => return o,
        };
        let enc = match Self::encode(&instance, settings) {
            Ok(e) => e,
            Err(e) => return Outcome::Failed(e),
        };
        let Some(last) = children.last() else {
            return Outcome::Failed("no QUBO subproblem to decode".into());
        };
        let samples: SampleSet = match parse_sampleset(&last.solution.result) {
            Ok(s) => s,
            Err(e) => return Outcome::Failed(format!("child {} returned an unreadable sample set: {e}", last.id)),
        };
        let attempts = children.len();
        match sampleset_to_tour(&enc, &samples) {
            Some(tour) => Outcome::Solved(
                tour_result(tour)
                    .with_meta("attempts", attempts)
                    .with_meta("backend", &samples.backend_name)
                    .with_meta("penaltyA", enc.penalty_a)
                    .with_meta("weightB", enc.weight_b),
            ),
            None if (attempts as i64) <= settings.integer("retryBudget") => {
                spawn(settings, "qubo", vec![serialize_qubo(&enc.qubo)], attempts as i64)
            }
            None => Outcome::Invalid(format!("no valid tour among the samples of {attempts} attempt(s)")),
        }
    }
}
