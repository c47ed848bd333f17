use std::collections::BTreeMap;
use std::thread;
use std::time::{Duration, Instant};

use metasolve_core::classical::validate_routes;
use metasolve_core::formats::{parse_routes, serialize_vrp};
use metasolve_core::{RouteSolution64, VrpInstance64};
use metasolve_meta::{ProblemManager, ProblemPatch, ProblemState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::BenchError;

pub const CLUSTERER: &str = "vrp.clusterer.two-phase";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Classical,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TspSolver {
    Exact,
    TwoOpt,
}

/// Solver chain configured on every cluster's TSP child.
pub fn child_chain(pipeline: Pipeline, tsp: TspSolver, seed: u64) -> String {
    match (pipeline, tsp) {
        (Pipeline::Classical, TspSolver::Exact) => "tsp.classical.held-karp".into(),
        (Pipeline::Classical, TspSolver::TwoOpt) => format!("tsp.classical.two-opt[seed={seed}]"),
        (Pipeline::Hybrid, _) => format!("tsp.qubo.transformation>qubo.quantum.sampler[seed={seed}]"),
    }
}

/// Run seeds for one instance. Each instance draws from its own stream, so
/// the seeds do not depend on which other instances run or in what order.
pub fn run_seeds(master: u64, instance_index: usize, runs: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(instance_index as u64);
    (0..runs).map(|_| u64::from(rng.random::<u32>())).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRun {
    pub instance: String,
    pub pipeline: Pipeline,
    pub run: usize,
    pub length: Option<f64>,
    pub valid: bool,
    pub ms: u64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// Solution status, or `TIMEOUT` if the problem never settled.
    pub status: String,
    pub result: Option<String>,
    pub metadata: BTreeMap<String, String>,
    pub wall: Duration,
}

impl RunOutcome {
    pub fn routes(&self) -> Option<RouteSolution64> {
        self.result.as_deref().and_then(|r| parse_routes(r).ok())
    }
}

/// Where problems are solved: in this process, or on a server over HTTP.
pub enum Executor {
    Embedded(ProblemManager),
    Api { client: reqwest::blocking::Client, base: String },
}

impl Executor {
    pub fn embedded() -> Self {
        Executor::Embedded(ProblemManager::default())
    }

    pub fn api(base: &str) -> Result<Self, BenchError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| BenchError::Api(e.to_string()))?;
        Ok(Executor::Api { client, base: base.trim_end_matches('/').to_string() })
    }

    /// Solves one VRP with the two-phase clusterer and `chain` on its children.
    pub fn solve(&self, vrp: &str, chain: &str, timeout: Duration) -> Result<RunOutcome, BenchError> {
        match self {
            Executor::Embedded(m) => {
                let p = m.create("cluster-vrp", vrp)?;
                let mut patch = ProblemPatch::solve_with(CLUSTERER);
                patch.solver_settings = Some([("childSolver".to_string(), json!(chain))].into());
                let started = Instant::now();
                m.patch(p.id, patch)?;
                let done = m.wait_for_terminal(p.id, timeout)?;
                let wall = started.elapsed();
                Ok(match (done.state, done.solution) {
                    (ProblemState::Solved, Some(s)) => RunOutcome {
                        status: s.status.to_string(),
                        result: Some(s.result).filter(|r| !r.is_empty()),
                        metadata: s.metadata,
                        wall,
                    },
                    _ => timed_out(wall),
                })
            }
            Executor::Api { client, base } => {
                let err = |e: reqwest::Error| BenchError::Api(e.to_string());
                let resp = client
                    .post(format!("{base}/problems/cluster-vrp"))
                    .json(&json!({"typeId": "cluster-vrp", "input": vrp}))
                    .send()
                    .map_err(err)?;
                let created: Value = expect_status(resp, 201)?;
                let url = format!("{base}/problems/cluster-vrp/{}", created["id"].as_str().unwrap_or_default());
                let body = json!({"solverId": CLUSTERER, "solverSettings": {"childSolver": chain}, "state": "SOLVING"});
                let started = Instant::now();
                expect_status(client.patch(&url).json(&body).send().map_err(err)?, 200)?;
                loop {
                    let p: Value = expect_status(client.get(&url).send().map_err(err)?, 200)?;
                    if p["state"] == "SOLVED" {
                        let s = &p["solution"];
                        let metadata = serde_json::from_value(s["metadata"].clone()).unwrap_or_default();
                        return Ok(RunOutcome {
                            status: s["status"].as_str().unwrap_or("UNKNOWN").to_string(),
                            result: s["result"].as_str().filter(|r| !r.is_empty()).map(String::from),
                            metadata,
                            wall: started.elapsed(),
                        });
                    }
                    if started.elapsed() > timeout {
                        return Ok(timed_out(started.elapsed()));
                    }
                    thread::sleep(Duration::from_millis(5));
                }
            }
        }
    }
}

fn timed_out(wall: Duration) -> RunOutcome {
    RunOutcome { status: "TIMEOUT".into(), result: None, metadata: BTreeMap::new(), wall }
}

fn expect_status(resp: reqwest::blocking::Response, want: u16) -> Result<Value, BenchError> {
    let status = resp.status().as_u16();
    let body: Value = resp.json().map_err(|e| BenchError::Api(e.to_string()))?;
    if status != want {
        return Err(BenchError::Api(format!("expected {want}, got {status}: {body}")));
    }
    Ok(body)
}

#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub pipeline: Pipeline,
    pub tsp: TspSolver,
    pub runs: usize,
    pub master_seed: u64,
    /// Per run; a run that does not settle in time is recorded as invalid.
    pub timeout: Duration,
}

/// Runs `cfg.runs` solves of the instance at `index` one after another.
pub fn run_instance(
    exec: &Executor,
    inst: &VrpInstance64,
    index: usize,
    cfg: &RunConfig,
) -> Result<Vec<BenchmarkRun>, BenchError> {
    let text = serialize_vrp(inst);
    run_seeds(cfg.master_seed, index, cfg.runs)
        .into_iter()
        .enumerate()
        .map(|(run, seed)| {
            let outcome = exec.solve(&text, &child_chain(cfg.pipeline, cfg.tsp, seed), cfg.timeout)?;
            let routes = outcome.routes();
            let valid =
                outcome.status == "SOLVED" && routes.as_ref().is_some_and(|r| validate_routes(inst, r).is_valid());
            Ok(BenchmarkRun {
                instance: inst.name().to_string(),
                pipeline: cfg.pipeline,
                run,
                length: routes.map(|r| r.total_length),
                valid,
                ms: outcome.wall.as_millis() as u64,
                seed,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_per_instance_streams() {
        let a = run_seeds(7, 3, 10);
        assert_eq!(a, run_seeds(7, 3, 10));
        assert_eq!(&run_seeds(7, 3, 4)[..], &a[..4]);
        assert_ne!(a, run_seeds(7, 4, 10));
        assert_ne!(a, run_seeds(8, 3, 10));
    }

    #[test]
    fn chains() {
        assert_eq!(child_chain(Pipeline::Classical, TspSolver::Exact, 5), "tsp.classical.held-karp");
        assert_eq!(
            child_chain(Pipeline::Hybrid, TspSolver::Exact, 5),
            "tsp.qubo.transformation>qubo.quantum.sampler[seed=5]"
        );
    }
}
