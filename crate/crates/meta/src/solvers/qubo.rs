use std::collections::BTreeMap;

use metasolve_core::formats::{parse_qubo, Qubo};
use metasolve_core::quantum::parse_sampleset;
use metasolve_core::quantum::{
    default_backends, match_backend, serialize_job, serialize_sampleset, JobKind, QuantumJob, SampleSet,
};
use metasolve_core::tsp_qubo::exhaustive_qubo_min;

use super::{backend_solver_id, descriptor, invalid_input, non_negative, spawn_with};
use crate::model::{SettingDescriptor, Settings, SolverDescriptor};
use crate::solver::{ChildSolver, ChildView, Outcome, Solver, SolverResult};

pub(super) fn sampleset_result(set: &SampleSet) -> Outcome {
    let Some(best) = set.best() else {
        return Outcome::Failed("sampler returned no samples".into());
    };
    let mut r = SolverResult::new(serialize_sampleset(set), best.energy)
        .with_meta("backend", &set.backend_name)
        .with_meta("bestSample", best.bitstring());
    for (k, v) in &set.metadata {
        r.metadata.insert(k.clone(), v.clone());
    }
    for (k, v) in &set.timings {
        r.metadata.insert(format!("seconds.{k}"), v.to_string());
    }
    Outcome::Solved(r)
}

pub struct QuantumSampler(SolverDescriptor);

impl QuantumSampler {
    pub fn new() -> Self {
        let mut backends = vec!["auto"];
        let names = default_backends();
        let names: Vec<&str> = names.iter().map(|b| b.name.as_str()).collect();
        backends.extend(names.iter().copied());
        Self(descriptor(
            "qubo.quantum.sampler",
            "qubo",
            "Quantum sampler",
            "Wraps the QUBO into a quantum job (annealing schedule or QAOA circuit), matches it to a backend and \
             runs it as a quantum-circuit-processing subproblem.",
            vec![
                SettingDescriptor::choice("algorithm", "ANNEAL", &["ANNEAL", "QAOA"], "Sampling algorithm"),
                SettingDescriptor::integer("shots", 1024, "Measurements drawn from the final QAOA state"),
                SettingDescriptor::integer("seed", 0, "Master seed of the job"),
                SettingDescriptor::integer("sweeps", 1000, "Annealing sweeps per restart"),
                SettingDescriptor::integer("restarts", 10, "Independent annealing restarts"),
                SettingDescriptor::real("betaStart", 0.1, "Initial inverse temperature"),
                SettingDescriptor::real("betaEnd", 10.0, "Final inverse temperature"),
                SettingDescriptor::integer("layers", 1, "QAOA depth p"),
                SettingDescriptor::integer("optimizerIterations", 40, "Angle optimiser budget"),
                SettingDescriptor::choice(
                    "backend",
                    "auto",
                    &backends,
                    "Backend; auto picks the first compatible local simulator",
                ),
                SettingDescriptor::text("token", "", "Access token for remote backends"),
            ],
            &["quantum-circuit-processing"],
        ))
    }

    fn job(qubo: Qubo, settings: &Settings) -> Result<QuantumJob, Outcome> {
        let kind: JobKind = settings.text("algorithm").parse().map_err(Outcome::Invalid)?;
        let small = |name: &str| -> Result<u32, Outcome> {
            let v = non_negative(settings, name)?;
            u32::try_from(v).map_err(|_| Outcome::Invalid(format!("{name} is too large")))
        };
        let mut job = QuantumJob::anneal(qubo, non_negative(settings, "seed")?);
        job.kind = kind;
        job.shots = small("shots")?;
        job.anneal.sweeps = small("sweeps")?;
        job.anneal.restarts = small("restarts")?;
        job.anneal.beta_start = settings.real("betaStart");
        job.anneal.beta_end = settings.real("betaEnd");
        job.qaoa.layers = small("layers")?;
        job.qaoa.optimizer_iterations = small("optimizerIterations")?;
        job.qaoa.parameter_seed = job.seed;
        job.validate().map_err(|e| Outcome::Invalid(e.to_string()))?;
        Ok(job)
    }
}

impl Solver for QuantumSampler {
    fn descriptor(&self) -> &SolverDescriptor {
        &self.0
    }

    fn solve(&self, input: &str, settings: &Settings) -> Outcome {
        let qubo: Qubo = match parse_qubo(input) {
            Ok(q) => q,
            Err(e) => return invalid_input(e),
        };
        let job = match Self::job(qubo, settings) {
            Ok(j) => j,
            Err(o) => return o,
        };
        let backends = default_backends();
        let choice = Some(settings.text("backend")).filter(|c| *c != "auto");
        let token = settings.text("token");
        let backend = match match_backend(&job, &backends, choice, !token.is_empty()) {
            Ok(b) => b,
            Err(e) => return Outcome::Failed(e.to_string()),
        };
        let mut child_settings = BTreeMap::new();
        if backend.requires_token {
            child_settings.insert("token".to_string(), token.into());
        }
        let solver = ChildSolver {
            solver_id: backend_solver_id(&backend.name).to_string(),
            settings: child_settings,
            chain: None,
            seed_offset: 0,
        };
        spawn_with("quantum-circuit-processing", serialize_job(&job), solver)
    }

    fn compose(&self, _input: &str, _settings: &Settings, children: &[ChildView]) -> Outcome {
        let Some(child) = children.last() else {
            return Outcome::Failed("no quantum job to collect".into());
        };
        match parse_sampleset::<f64>(&child.solution.result) {
            Ok(set) => {
                let mut out = sampleset_result(&set);
                if let Outcome::Solved(r) = &mut out {
                    for (k, v) in &child.solution.metadata {
                        r.metadata.entry(k.clone()).or_insert_with(|| v.clone());
                    }
                }
                out
            }
            Err(e) => Outcome::Failed(format!("child {} returned an unreadable sample set: {e}", child.id)),
        }
    }
}

pub struct Exhaustive(SolverDescriptor);

impl Exhaustive {
    pub fn new() -> Self {
        Self(descriptor(
            "qubo.classical.exhaustive",
            "qubo",
            "Exhaustive search",
            "Enumerates every assignment; refuses more than 24 variables.",
            Vec::new(),
            &[],
        ))
    }
}

impl Solver for Exhaustive {
    fn descriptor(&self) -> &SolverDescriptor {
        &self.0
    }

    fn solve(&self, input: &str, _settings: &Settings) -> Outcome {
        let qubo: Qubo = match parse_qubo(input) {
            Ok(q) => q,
            Err(e) => return invalid_input(e),
        };
        match exhaustive_qubo_min(&qubo) {
            Ok((bits, _)) => match SampleSet::from_bitstrings(&qubo, [bits], "exhaustive") {
                Ok(set) => sampleset_result(&set),
                Err(e) => Outcome::Failed(e.to_string()),
            },
            Err(e) => Outcome::Failed(e.to_string()),
        }
    }
}
