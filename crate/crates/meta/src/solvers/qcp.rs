use metasolve_core::quantum::{
    default_backends, parse_job, run_quantum_job, BackendDescriptor, QuantumError, QuantumJob,
};

use super::descriptor;
use super::qubo::sampleset_result;
use crate::model::{SettingDescriptor, Settings, SolverDescriptor};
use crate::solver::{Outcome, Solver};

/// The quantum-circuit-processing solver that drives a backend.
pub fn backend_solver_id(backend: &str) -> &'static str {
    match backend {
        "local-sa" => "qcp.local.annealer",
        "local-statevector" => "qcp.local.statevector-qaoa",
        _ => "qcp.remote.stub",
    }
}

fn backend(name: &str) -> BackendDescriptor {
    default_backends().into_iter().find(|b| b.name == name).expect("default backend exists")
}

fn run(input: &str, backend_name: &str) -> Outcome {
    let job: QuantumJob = match parse_job(input) {
        Ok(j) => j,
        Err(QuantumError::Parse(e)) => return Outcome::Invalid(format!("unparseable input: {e}")),
        Err(e) => return Outcome::Invalid(e.to_string()),
    };
    match run_quantum_job(&job, &backend(backend_name)) {
        Ok(set) => sampleset_result(&set),
        Err(e) => Outcome::Failed(e.to_string()),
    }
}

pub struct Annealer(SolverDescriptor);

impl Annealer {
    pub fn new() -> Self {
        Self(descriptor(
            "qcp.local.annealer",
            "quantum-circuit-processing",
            "Simulated annealer",
            "Metropolis single-flip annealing with a geometric inverse-temperature schedule; one sample per restart.",
            Vec::new(),
            &[],
        ))
    }
}

impl Solver for Annealer {
    fn descriptor(&self) -> &SolverDescriptor {
        &self.0
    }

    fn solve(&self, input: &str, _settings: &Settings) -> Outcome {
        run(input, "local-sa")
    }
}

pub struct StatevectorQaoa(SolverDescriptor);

impl StatevectorQaoa {
    pub fn new() -> Self {
        Self(descriptor(
            "qcp.local.statevector-qaoa",
            "quantum-circuit-processing",
            "Statevector QAOA",
            "Exact statevector simulation of a p-layer QAOA circuit with classically optimised angles; up to 20 qubits.",
            Vec::new(),
            &[],
        ))
    }
}

impl Solver for StatevectorQaoa {
    fn descriptor(&self) -> &SolverDescriptor {
        &self.0
    }

    fn solve(&self, input: &str, _settings: &Settings) -> Outcome {
        run(input, "local-statevector")
    }
}

pub struct RemoteStub(SolverDescriptor);

impl RemoteStub {
    pub fn new() -> Self {
        Self(descriptor(
            "qcp.remote.stub",
            "quantum-circuit-processing",
            "Remote backend (stub)",
            "Placeholder for hardware backends. Requires a token and always reports that remote execution is unavailable.",
            vec![SettingDescriptor::text("token", "", "Access token")],
            &[],
        ))
    }
}

impl Solver for RemoteStub {
    fn descriptor(&self) -> &SolverDescriptor {
        &self.0
    }

    fn solve(&self, input: &str, settings: &Settings) -> Outcome {
        if settings.text("token").is_empty() {
            return Outcome::Failed(QuantumError::AuthenticationRequired("remote-stub".into()).to_string());
        }
        run(input, "remote-stub")
    }
}
