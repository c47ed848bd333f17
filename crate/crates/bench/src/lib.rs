//! Benchmark harness: a generated instance suite, repeated pipeline runs
//! through the problem manager or the HTTP API, baselines and reports.

pub mod report;
pub mod runner;
pub mod suite;

use thiserror::Error;

pub use report::{
    baselines_path, read_baselines, read_runs, summarize, write_baselines, write_runs, BaselineRow, Summary,
};
pub use runner::{
    child_chain, run_instance, run_seeds, BenchmarkRun, Executor, Pipeline, RunConfig, RunOutcome, TspSolver,
};
pub use suite::{compute_baselines, generate_suite, load_suite, write_suite, Baselines};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}: {1}")]
    Instance(String, String),
    #[error("api: {0}")]
    Api(String),
    #[error("{0}")]
    Meta(#[from] metasolve_meta::MetaError),
}
