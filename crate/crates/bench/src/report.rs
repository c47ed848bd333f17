use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::runner::{BenchmarkRun, Pipeline};
use crate::suite::Baselines;
use crate::BenchError;

pub const RUN_COLUMNS: [&str; 7] = ["instance", "pipeline", "run", "length", "valid", "ms", "seed"];

/// Slack allowed when checking run lengths against the baselines.
pub const DOMINANCE_SLACK: f64 = 1e-9;

/// Writes the header even when there are no runs.
pub fn write_runs(path: &Path, runs: &[BenchmarkRun]) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(RUN_COLUMNS)?;
    for r in runs {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_runs(path: &Path) -> Result<Vec<BenchmarkRun>, BenchError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BaselineRow {
    pub instance: String,
    pub without_clustering: f64,
    pub with_clustering: f64,
}

impl BaselineRow {
    pub fn new(instance: &str, b: Baselines) -> Self {
        Self { instance: instance.into(), without_clustering: b.without_clustering, with_clustering: b.with_clustering }
    }
}

pub fn write_baselines(path: &Path, rows: &[BaselineRow]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_baselines(path: &Path) -> Result<Vec<BaselineRow>, BenchError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Where `bench run` puts the baselines for `results`: `x.csv` -> `x.baselines.csv`.
pub fn baselines_path(results: &Path) -> std::path::PathBuf {
    let stem = results.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    results.with_file_name(format!("{stem}.baselines.csv"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesStats {
    pub runs: usize,
    pub valid: usize,
    /// Valid runs matching the with-clustering baseline.
    pub hits: Option<usize>,
    pub min: Option<f64>,
    pub mean: Option<f64>,
    pub max: Option<f64>,
    pub mean_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRow {
    pub instance: String,
    pub baselines: Option<BaselineRow>,
    pub series: BTreeMap<Pipeline, SeriesStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub rows: Vec<InstanceRow>,
    /// Broken dominance checks, one message each.
    pub violations: Vec<String>,
}

pub fn matches_baseline(length: f64, baseline: f64) -> bool {
    (length - baseline).abs() <= DOMINANCE_SLACK * baseline.abs().max(1.0)
}

pub fn summarize(runs: &[BenchmarkRun], baselines: &[BaselineRow]) -> Summary {
    let mut by_instance: BTreeMap<&str, BTreeMap<Pipeline, Vec<&BenchmarkRun>>> = BTreeMap::new();
    for r in runs {
        by_instance.entry(&r.instance).or_default().entry(r.pipeline).or_default().push(r);
    }
    let mut violations = Vec::new();
    let mut rows = Vec::new();
    for (instance, series) in by_instance {
        let base = baselines.iter().find(|b| b.instance == instance).cloned();
        if let Some(b) = &base {
            if b.without_clustering > b.with_clustering + DOMINANCE_SLACK {
                violations.push(format!(
                    "{instance}: without clustering {} > with clustering {}",
                    b.without_clustering, b.with_clustering
                ));
            }
        }
        let mut stats = BTreeMap::new();
        for (pipeline, runs) in series {
            let lengths: Vec<f64> = runs.iter().filter(|r| r.valid).filter_map(|r| r.length).collect();
            if let Some(b) = &base {
                for &l in &lengths {
                    if l < b.with_clustering - DOMINANCE_SLACK {
                        violations.push(format!(
                            "{instance}/{pipeline:?}: valid run of length {l} beats the clustered optimum {}",
                            b.with_clustering
                        ));
                    }
                }
            }
            let n = lengths.len();
            stats.insert(
                pipeline,
                SeriesStats {
                    runs: runs.len(),
                    valid: n,
                    hits: base
                        .as_ref()
                        .map(|b| lengths.iter().filter(|&&l| matches_baseline(l, b.with_clustering)).count()),
                    min: lengths.iter().copied().reduce(f64::min),
                    mean: (n > 0).then(|| lengths.iter().sum::<f64>() / n as f64),
                    max: lengths.iter().copied().reduce(f64::max),
                    mean_ms: runs.iter().map(|r| r.ms as f64).sum::<f64>() / runs.len() as f64,
                },
            );
        }
        rows.push(InstanceRow { instance: instance.to_string(), baselines: base, series: stats });
    }
    Summary { rows, violations }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.3}"))
}

impl Summary {
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<10} {:>10} {:>10} {:<9} {:>4} {:>5} {:>4} {:>10} {:>10} {:>10} {:>9}",
            "instance", "optimal", "clustered", "pipeline", "runs", "valid", "hits", "min", "mean", "max", "mean ms"
        )
        .unwrap();
        for row in &self.rows {
            let (without, with) = match &row.baselines {
                Some(b) => (Some(b.without_clustering), Some(b.with_clustering)),
                None => (None, None),
            };
            for (pipeline, s) in &row.series {
                writeln!(
                    out,
                    "{:<10} {:>10} {:>10} {:<9} {:>4} {:>5} {:>4} {:>10} {:>10} {:>10} {:>9.1}",
                    row.instance,
                    cell(without),
                    cell(with),
                    format!("{pipeline:?}").to_lowercase(),
                    s.runs,
                    s.valid,
                    s.hits.map_or("-".into(), |h| h.to_string()),
                    cell(s.min),
                    cell(s.mean),
                    cell(s.max),
                    s.mean_ms,
                )
                .unwrap();
            }
        }
        out.push_str(
            "\noptimal: best route set without clustering; clustered: best route set within the two-phase clusters.\n\
             hybrid timings include the quantum simulator and are not comparable to classical ones.\n",
        );
        if self.violations.is_empty() {
            out.push_str("dominance: ok\n");
        } else {
            for v in &self.violations {
                writeln!(out, "dominance violated: {v}").unwrap();
            }
        }
        out
    }
}
