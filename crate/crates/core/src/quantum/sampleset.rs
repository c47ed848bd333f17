use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use super::{run_quantum_job, BackendDescriptor, QuantumError, QuantumJob};
use crate::classical::Tour;
use crate::formats::{content_lines, parse_field, parse_finite, DimensionMismatch, ParseError, ParseErrorKind, Qubo};
use crate::tsp_qubo::{decode_bitstring, Decoded, TspQuboEncoding};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T = f64> {
    pub bits: Vec<bool>,
    pub energy: T,
    pub multiplicity: u32,
}

impl<T> Sample<T> {
    pub fn bitstring(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// Measurement outcomes sorted by ascending energy (ties by bitstring), so
/// the best sample is always at index 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleSet<T = f64> {
    pub samples: Vec<Sample<T>>,
    pub backend_name: String,
    /// Wall-clock seconds per phase. Not part of the text form.
    pub timings: BTreeMap<String, f64>,
    /// Free-form annotations such as optimised angles or a gate listing.
    pub metadata: BTreeMap<String, String>,
}

impl<T: Scalar> SampleSet<T> {
    /// Aggregates raw bitstrings, computing each energy exactly from `qubo`.
    pub fn from_bitstrings(
        qubo: &Qubo<T>,
        raw: impl IntoIterator<Item = Vec<bool>>,
        backend: &str,
    ) -> Result<Self, DimensionMismatch> {
        let mut counts: HashMap<Vec<bool>, u32> = HashMap::new();
        for bits in raw {
            *counts.entry(bits).or_insert(0) += 1;
        }
        let mut samples = counts
            .into_iter()
            .map(|(bits, multiplicity)| Ok(Sample { energy: qubo.energy(&bits)?, bits, multiplicity }))
            .collect::<Result<Vec<_>, DimensionMismatch>>()?;
        sort_samples(&mut samples);
        Ok(Self { samples, backend_name: backend.to_string(), ..Self::default() })
    }

    pub fn best(&self) -> Option<&Sample<T>> {
        self.samples.first()
    }

    pub fn best_index(&self) -> Option<usize> {
        (!self.samples.is_empty()).then_some(0)
    }

    pub fn total_count(&self) -> u64 {
        self.samples.iter().map(|s| u64::from(s.multiplicity)).sum()
    }
}

fn sort_samples<T: Scalar>(samples: &mut [Sample<T>]) {
    samples.sort_by(|a, b| {
        a.energy.partial_cmp(&b.energy).unwrap_or(std::cmp::Ordering::Equal).then_with(|| a.bits.cmp(&b.bits))
    });
}

/// `BACKEND <name>` followed by `<bits> <energy> <multiplicity>` lines.
pub fn serialize_sampleset<T: Scalar>(set: &SampleSet<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "BACKEND {}", set.backend_name);
    for s in &set.samples {
        let _ = writeln!(out, "{} {} {}", s.bitstring(), s.energy, s.multiplicity);
    }
    out
}

pub fn parse_sampleset<T: Scalar>(text: &str) -> Result<SampleSet<T>, ParseError> {
    let mut lines = content_lines(text, Some('#'));
    let (line, first) = lines.next().ok_or(ParseError::new(1, ParseErrorKind::Missing("BACKEND line")))?;
    let backend = first
        .strip_prefix("BACKEND")
        .map(str::trim)
        .filter(|b| !b.is_empty())
        .ok_or_else(|| ParseError::syntax(line, "expected 'BACKEND <name>'"))?;
    let mut samples = Vec::new();
    let mut width = None;
    for (line, body) in lines {
        let mut tok = body.split_whitespace();
        let bits_text = tok.next().unwrap_or_default();
        let bits = bits_text
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(ParseError::syntax(line, format!("invalid bitstring '{bits_text}'"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if *width.get_or_insert(bits.len()) != bits.len() {
            return Err(ParseError::syntax(line, "bitstrings differ in length"));
        }
        let energy = parse_finite(line, tok.next(), "energy")?;
        let multiplicity: u32 = parse_field(line, tok.next(), "multiplicity")?;
        if multiplicity == 0 {
            return Err(ParseError::syntax(line, "multiplicity must be positive"));
        }
        if tok.next().is_some() {
            return Err(ParseError::syntax(line, "trailing tokens"));
        }
        samples.push(Sample { bits, energy, multiplicity });
    }
    sort_samples(&mut samples);
    Ok(SampleSet { samples, backend_name: backend.to_string(), ..SampleSet::default() })
}

/// First sample, in ascending energy order, that decodes to a valid tour.
pub fn sampleset_to_tour<T: Scalar>(encoding: &TspQuboEncoding<T>, samples: &SampleSet<T>) -> Option<Tour<T>> {
    samples.samples.iter().find_map(|s| match decode_bitstring(encoding, &s.bits) {
        Ok(Decoded::Valid(tour)) => Some(tour),
        _ => None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TourOutcome<T = f64> {
    /// `None` when every attempt produced only invalid samples.
    pub tour: Option<Tour<T>>,
    pub attempts: u32,
    pub last: SampleSet<T>,
}

/// Samples `job` and decodes; on failure resamples with the seed bumped by
/// one, at most `retry_budget` more times.
pub fn sample_tsp_with_retry<T: Scalar>(
    encoding: &TspQuboEncoding<T>,
    job: &QuantumJob<T>,
    backend: &BackendDescriptor,
    retry_budget: u32,
) -> Result<TourOutcome<T>, QuantumError> {
    let mut job = job.clone();
    let mut attempts = 0;
    loop {
        attempts += 1;
        let set = run_quantum_job(&job, backend)?;
        if let Some(tour) = sampleset_to_tour(encoding, &set) {
            return Ok(TourOutcome { tour: Some(tour), attempts, last: set });
        }
        if attempts > retry_budget {
            return Ok(TourOutcome { tour: None, attempts, last: set });
        }
        job.seed = job.seed.wrapping_add(1);
    }
}
