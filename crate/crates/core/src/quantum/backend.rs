use std::collections::BTreeSet;

use super::{qaoa_statevector, simulated_anneal, JobKind, QuantumError, QuantumJob, SampleSet, STATEVECTOR_LIMIT};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    LocalSimulator,
    RemoteStub,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendDescriptor {
    pub name: String,
    pub kind: BackendKind,
    pub max_qubits: usize,
    pub supported_kinds: BTreeSet<JobKind>,
    pub requires_token: bool,
}

impl BackendDescriptor {
    pub fn local(name: &str, max_qubits: usize, kinds: &[JobKind]) -> Self {
        Self {
            name: name.to_string(),
            kind: BackendKind::LocalSimulator,
            max_qubits,
            supported_kinds: kinds.iter().copied().collect(),
            requires_token: false,
        }
    }

    /// Why this backend cannot run `job`, if it cannot.
    pub fn incompatibility<T: Scalar>(&self, job: &QuantumJob<T>) -> Option<String> {
        if !self.supported_kinds.contains(&job.kind) {
            return Some(format!("{} does not support {} jobs", self.name, job.kind));
        }
        if job.num_qubits() > self.max_qubits {
            return Some(format!("{} qubits exceed the {} limit of {}", job.num_qubits(), self.name, self.max_qubits));
        }
        None
    }
}

/// Local annealer, local statevector QAOA and a token-gated remote stub,
/// in matching priority order.
pub fn default_backends() -> Vec<BackendDescriptor> {
    vec![
        BackendDescriptor::local("local-sa", usize::MAX, &[JobKind::Anneal]),
        BackendDescriptor::local("local-statevector", STATEVECTOR_LIMIT, &[JobKind::Qaoa]),
        BackendDescriptor {
            name: "remote-stub".to_string(),
            kind: BackendKind::RemoteStub,
            max_qubits: 127,
            supported_kinds: [JobKind::Anneal, JobKind::Qaoa].into_iter().collect(),
            requires_token: true,
        },
    ]
}

/// Picks a backend for `job`. An explicit `choice` is validated as is;
/// otherwise the first compatible local simulator wins.
pub fn match_backend<'a, T: Scalar>(
    job: &QuantumJob<T>,
    backends: &'a [BackendDescriptor],
    choice: Option<&str>,
    has_token: bool,
) -> Result<&'a BackendDescriptor, QuantumError> {
    if backends.is_empty() {
        return Err(QuantumError::NoCompatibleBackend("no backends registered".into()));
    }
    if let Some(name) = choice {
        let backend = backends
            .iter()
            .find(|b| b.name == name)
            .ok_or_else(|| QuantumError::NoCompatibleBackend(format!("unknown backend '{name}'")))?;
        if let Some(reason) = backend.incompatibility(job) {
            return Err(QuantumError::NoCompatibleBackend(reason));
        }
        if backend.requires_token && !has_token {
            return Err(QuantumError::AuthenticationRequired(backend.name.clone()));
        }
        return Ok(backend);
    }
    backends.iter().find(|b| b.kind == BackendKind::LocalSimulator && b.incompatibility(job).is_none()).ok_or_else(
        || {
            QuantumError::NoCompatibleBackend(format!(
                "no local simulator runs {} jobs on {} qubits",
                job.kind,
                job.num_qubits()
            ))
        },
    )
}

/// Executes `job`, re-checking compatibility first.
pub fn run_quantum_job<T: Scalar>(
    job: &QuantumJob<T>,
    backend: &BackendDescriptor,
) -> Result<SampleSet<T>, QuantumError> {
    if let Some(reason) = backend.incompatibility(job) {
        return Err(QuantumError::BackendMismatch { backend: backend.name.clone(), reason });
    }
    job.validate()?;
    if backend.kind == BackendKind::RemoteStub {
        return Err(QuantumError::RemoteUnavailable);
    }
    let mut samples = match job.kind {
        JobKind::Anneal => simulated_anneal(job)?,
        JobKind::Qaoa => qaoa_statevector(job)?,
    };
    samples.backend_name = backend.name.clone();
    Ok(samples)
}
