//! Simulated quantum sampling: job description, backend matching, a
//! Metropolis annealer and a QAOA statevector simulator.

mod anneal;
mod backend;
mod qaoa;
mod sampleset;

pub use anneal::{simulated_anneal, simulated_anneal_traced, AnnealTrace};
pub use backend::{default_backends, match_backend, run_quantum_job, BackendDescriptor, BackendKind};
pub use qaoa::{cost_diagonal, evolve, gate_list, qaoa_expectation, qaoa_statevector, QaoaAngles, Statevector};
pub use sampleset::{
    parse_sampleset, sample_tsp_with_retry, sampleset_to_tour, serialize_sampleset, Sample, SampleSet, TourOutcome,
};

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::formats::{parse_qubo, serialize_qubo, ParseError, ParseErrorKind, Qubo};
use crate::Scalar;

/// Largest register the statevector simulator accepts.
pub const STATEVECTOR_LIMIT: usize = 20;

const SEPARATOR: &str = "---";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JobKind {
    Anneal,
    Qaoa,
}

impl fmt::Display for JobKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JobKind::Anneal => "ANNEAL",
            JobKind::Qaoa => "QAOA",
        })
    }
}

impl FromStr for JobKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ANNEAL" => Ok(JobKind::Anneal),
            "QAOA" => Ok(JobKind::Qaoa),
            other => Err(format!("unknown job kind '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealParams {
    pub sweeps: u32,
    pub restarts: u32,
    pub beta_start: f64,
    pub beta_end: f64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        Self { sweeps: 1000, restarts: 10, beta_start: 0.1, beta_end: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QaoaParams {
    pub layers: u32,
    pub optimizer_iterations: u32,
    pub parameter_seed: u64,
}

impl Default for QaoaParams {
    fn default() -> Self {
        Self { layers: 1, optimizer_iterations: 40, parameter_seed: 0 }
    }
}

/// A sampling task over a QUBO. Both parameter blocks are always present;
/// only the one matching `kind` is used.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumJob<T = f64> {
    pub kind: JobKind,
    pub qubo: Qubo<T>,
    pub shots: u32,
    pub seed: u64,
    pub anneal: AnnealParams,
    pub qaoa: QaoaParams,
}

impl<T: Scalar> QuantumJob<T> {
    pub fn anneal(qubo: Qubo<T>, seed: u64) -> Self {
        Self {
            kind: JobKind::Anneal,
            qubo,
            shots: 1024,
            seed,
            anneal: AnnealParams::default(),
            qaoa: QaoaParams::default(),
        }
    }

    pub fn qaoa(qubo: Qubo<T>, layers: u32, seed: u64) -> Self {
        Self {
            kind: JobKind::Qaoa,
            qubo,
            shots: 1024,
            seed,
            anneal: AnnealParams::default(),
            qaoa: QaoaParams { layers, ..QaoaParams::default() },
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.qubo.num_vars()
    }

    pub fn validate(&self) -> Result<(), QuantumError> {
        if self.shots == 0 {
            return Err(QuantumError::InvalidJob("shots must be positive".into()));
        }
        let a = &self.anneal;
        if a.sweeps == 0 || a.restarts == 0 {
            return Err(QuantumError::InvalidJob("sweeps and restarts must be positive".into()));
        }
        if !(a.beta_start > 0.0 && a.beta_end > 0.0 && a.beta_start.is_finite() && a.beta_end.is_finite()) {
            return Err(QuantumError::InvalidJob("inverse temperatures must be positive and finite".into()));
        }
        if self.kind == JobKind::Qaoa && self.num_qubits() > STATEVECTOR_LIMIT {
            return Err(QuantumError::TooLarge { qubits: self.num_qubits(), limit: STATEVECTOR_LIMIT });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("no compatible backend: {0}")]
    NoCompatibleBackend(String),
    #[error("backend '{0}' requires an access token; select another backend or supply a token")]
    AuthenticationRequired(String),
    #[error("backend '{backend}' cannot run this job: {reason}")]
    BackendMismatch { backend: String, reason: String },
    #[error("remote backends are out of scope; supply a local simulator")]
    RemoteUnavailable,
    #[error("{qubits} qubits exceed the statevector limit of {limit}")]
    TooLarge { qubits: usize, limit: usize },
    #[error("invalid job: {0}")]
    InvalidJob(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Header of `key: value` lines, a `---` separator, then the QUBO text.
pub fn serialize_job<T: Scalar>(job: &QuantumJob<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "kind: {}", job.kind);
    let _ = writeln!(out, "shots: {}", job.shots);
    let _ = writeln!(out, "seed: {}", job.seed);
    let _ = writeln!(out, "sweeps: {}", job.anneal.sweeps);
    let _ = writeln!(out, "restarts: {}", job.anneal.restarts);
    let _ = writeln!(out, "betaStart: {}", job.anneal.beta_start);
    let _ = writeln!(out, "betaEnd: {}", job.anneal.beta_end);
    let _ = writeln!(out, "layers: {}", job.qaoa.layers);
    let _ = writeln!(out, "optimizerIterations: {}", job.qaoa.optimizer_iterations);
    let _ = writeln!(out, "parameterSeed: {}", job.qaoa.parameter_seed);
    let _ = writeln!(out, "{SEPARATOR}");
    out.push_str(&serialize_qubo(&job.qubo));
    out
}

/// Inverse of [`serialize_job`]. Only `kind` is required in the header;
/// other keys fall back to their defaults.
pub fn parse_job<T: Scalar>(text: &str) -> Result<QuantumJob<T>, QuantumError> {
    let mut kind = None;
    let mut job = QuantumJob::anneal(Qubo::new(0), 0);
    let mut seen = std::collections::BTreeSet::new();
    let mut body_start = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == SEPARATOR {
            body_start = Some(idx + 1);
            break;
        }
        let (key, value) = line.split_once(':').map(|(k, v)| (k.trim(), v.trim())).ok_or_else(|| ParseError {
            line: line_no,
            kind: ParseErrorKind::Syntax(format!("expected 'key: value', got '{line}'")),
        })?;
        if !seen.insert(key.to_string()) {
            return Err(ParseError { line: line_no, kind: ParseErrorKind::Duplicate(key.to_string()) }.into());
        }
        let bad =
            || ParseError { line: line_no, kind: ParseErrorKind::Syntax(format!("invalid value '{value}' for {key}")) };
        match key {
            "kind" => kind = Some(value.parse::<JobKind>().map_err(|_| bad())?),
            "shots" => job.shots = value.parse().map_err(|_| bad())?,
            "seed" => job.seed = value.parse().map_err(|_| bad())?,
            "sweeps" => job.anneal.sweeps = value.parse().map_err(|_| bad())?,
            "restarts" => job.anneal.restarts = value.parse().map_err(|_| bad())?,
            "betaStart" => job.anneal.beta_start = value.parse().map_err(|_| bad())?,
            "betaEnd" => job.anneal.beta_end = value.parse().map_err(|_| bad())?,
            "layers" => job.qaoa.layers = value.parse().map_err(|_| bad())?,
            "optimizerIterations" => job.qaoa.optimizer_iterations = value.parse().map_err(|_| bad())?,
            "parameterSeed" => job.qaoa.parameter_seed = value.parse().map_err(|_| bad())?,
            _ => {
                return Err(ParseError {
                    line: line_no,
                    kind: ParseErrorKind::Unsupported { key: key.to_string(), value: value.to_string() },
                }
                .into())
            }
        }
    }
    let Some(body_start) = body_start else {
        return Err(
            ParseError { line: text.lines().count().max(1), kind: ParseErrorKind::Missing("--- separator") }.into()
        );
    };
    job.kind = kind.ok_or(ParseError { line: 1, kind: ParseErrorKind::Missing("kind") })?;
    // keep line numbers meaningful by blanking the header
    let body: String =
        std::iter::repeat_n("", body_start).chain(text.lines().skip(body_start)).map(|l| format!("{l}\n")).collect();
    job.qubo = parse_qubo(&body)?;
    job.validate()?;
    Ok(job)
}
