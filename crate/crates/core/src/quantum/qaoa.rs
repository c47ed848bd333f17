use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{JobKind, QuantumError, QuantumJob, SampleSet, STATEVECTOR_LIMIT};
use crate::formats::Qubo;
use crate::Scalar;

/// Amplitudes of an `n`-qubit register; basis index bit `i` is qubit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|+>^n`.
    pub fn uniform(n: usize) -> Self {
        let dim = 1usize << n;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self { n, amps: vec![a; dim] }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(Complex64::norm_sqr).collect()
    }

    /// `exp(-i gamma C)` for diagonal `C`.
    pub fn apply_cost_phase(&mut self, costs: &[f64], gamma: f64) {
        for (a, &c) in self.amps.iter_mut().zip(costs) {
            *a *= Complex64::from_polar(1.0, -gamma * c);
        }
    }

    /// `RX(2 beta)` on every qubit, i.e. `exp(-i beta sum X)`.
    pub fn apply_mixer(&mut self, beta: f64) {
        let (s, c) = beta.sin_cos();
        let mis = Complex64::new(0.0, -s);
        for q in 0..self.n {
            let bit = 1usize << q;
            for z in 0..self.amps.len() {
                if z & bit == 0 {
                    let a0 = self.amps[z];
                    let a1 = self.amps[z | bit];
                    self.amps[z] = a0 * c + a1 * mis;
                    self.amps[z | bit] = a0 * mis + a1 * c;
                }
            }
        }
    }

    pub fn expectation(&self, costs: &[f64]) -> f64 {
        self.amps.iter().zip(costs).map(|(a, &c)| a.norm_sqr() * c).sum()
    }
}

/// Energy of every basis state, index bit `i` being variable `i`.
pub fn cost_diagonal<T: Scalar>(qubo: &Qubo<T>) -> Vec<f64> {
    let n = qubo.num_vars();
    let (diag, adj) = qubo.adjacency();
    let mut costs = vec![0.0; 1usize << n];
    costs[0] = qubo.offset().as_f64();
    for z in 1..costs.len() {
        // drop the lowest set bit; every other set bit is a higher index
        let i = z.trailing_zeros() as usize;
        let rest = z & (z - 1);
        let mut e = costs[rest] + diag[i].as_f64();
        for &(j, q) in &adj[i] {
            if rest >> j & 1 == 1 {
                e += q.as_f64();
            }
        }
        costs[z] = e;
    }
    costs
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaoaAngles {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaAngles {
    pub fn layers(&self) -> usize {
        self.gammas.len()
    }

    fn get(&self, k: usize) -> f64 {
        let p = self.layers();
        if k < p {
            self.gammas[k]
        } else {
            self.betas[k - p]
        }
    }

    fn set(&mut self, k: usize, v: f64) {
        let p = self.layers();
        if k < p {
            self.gammas[k] = v;
        } else {
            self.betas[k - p] = v;
        }
    }
}

/// Runs the ansatz, calling `on_layer` after each full layer.
pub fn evolve(
    n: usize,
    costs: &[f64],
    angles: &QaoaAngles,
    mut on_layer: impl FnMut(usize, &Statevector),
) -> Statevector {
    let mut state = Statevector::uniform(n);
    for (layer, (&g, &b)) in angles.gammas.iter().zip(&angles.betas).enumerate() {
        state.apply_cost_phase(costs, g);
        state.apply_mixer(b);
        on_layer(layer, &state);
    }
    state
}

/// `<psi(gamma, beta)| C |psi(gamma, beta)>`.
pub fn qaoa_expectation(n: usize, costs: &[f64], angles: &QaoaAngles) -> f64 {
    evolve(n, costs, angles, |_, _| {}).expectation(costs)
}

/// Seeded multi-start coordinate descent with step halving. The first start
/// comes from a coarse grid with equal angles in every layer.
fn optimize(n: usize, costs: &[f64], p: usize, iterations: u32, seed: u64, gamma_max: f64) -> (QaoaAngles, f64) {
    let beta_max = PI;
    let mut best = (QaoaAngles { gammas: vec![0.0; p], betas: vec![0.0; p] }, f64::INFINITY);
    if p == 0 {
        let e = qaoa_expectation(n, costs, &best.0);
        return (best.0, e);
    }
    const GRID: usize = 8;
    let mut grid_best = best.clone();
    for gi in 0..GRID {
        for bi in 0..GRID {
            let g = gamma_max * (gi as f64 + 0.5) / GRID as f64;
            let b = beta_max * (bi as f64 + 0.5) / GRID as f64;
            let angles = QaoaAngles { gammas: vec![g; p], betas: vec![b; p] };
            let e = qaoa_expectation(n, costs, &angles);
            if e < grid_best.1 {
                grid_best = (angles, e);
            }
        }
    }

    let starts = 4usize;
    let per_start = iterations.div_ceil(starts as u32).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in 0..starts {
        let (mut angles, mut value) = if s == 0 {
            grid_best.clone()
        } else {
            let angles = QaoaAngles {
                gammas: (0..p).map(|_| rng.random::<f64>() * gamma_max).collect(),
                betas: (0..p).map(|_| rng.random::<f64>() * beta_max).collect(),
            };
            let e = qaoa_expectation(n, costs, &angles);
            (angles, e)
        };
        let mut steps: Vec<f64> = (0..2 * p).map(|k| if k < p { gamma_max / 16.0 } else { beta_max / 16.0 }).collect();
        for _ in 0..per_start {
            let mut improved = false;
            for (k, &step) in steps.iter().enumerate() {
                for dir in [1.0, -1.0] {
                    let mut trial = angles.clone();
                    trial.set(k, angles.get(k) + dir * step);
                    let e = qaoa_expectation(n, costs, &trial);
                    if e < value {
                        angles = trial;
                        value = e;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                steps.iter_mut().for_each(|s| *s /= 2.0);
            }
        }
        if value < best.1 {
            best = (angles, value);
        }
    }
    best
}

pub fn qaoa_statevector<T: Scalar>(job: &QuantumJob<T>) -> Result<SampleSet<T>, QuantumError> {
    if job.kind != JobKind::Qaoa {
        return Err(QuantumError::InvalidJob(format!("statevector simulator got a {} job", job.kind)));
    }
    let n = job.num_qubits();
    if n > STATEVECTOR_LIMIT {
        return Err(QuantumError::TooLarge { qubits: n, limit: STATEVECTOR_LIMIT });
    }
    job.validate()?;
    let started = Instant::now();
    let costs = cost_diagonal(&job.qubo);
    let scale = job.qubo.iter().map(|(_, _, q)| q.as_f64().abs()).fold(0.0, f64::max);
    let gamma_max = if scale > 0.0 { 2.0 * PI / scale } else { 2.0 * PI };
    let p = job.qaoa.layers as usize;
    let (angles, expectation) =
        optimize(n, &costs, p, job.qaoa.optimizer_iterations, job.qaoa.parameter_seed, gamma_max);
    let optimized = started.elapsed().as_secs_f64();

    let probs = evolve(n, &costs, &angles, |_, _| {}).probabilities();
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for pr in &probs {
        acc += pr;
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(job.seed);
    let raw = (0..job.shots).map(|_| {
        let u = rng.random::<f64>() * acc;
        let z = cumulative.partition_point(|&c| c <= u).min(probs.len() - 1);
        (0..n).map(|i| z >> i & 1 == 1).collect::<Vec<bool>>()
    });
    let mut set = SampleSet::from_bitstrings(&job.qubo, raw, "local-statevector").expect("register width matches");
    set.timings.insert("optimize".into(), optimized);
    set.timings.insert("total".into(), started.elapsed().as_secs_f64());
    set.metadata.insert("gammas".into(), join(&angles.gammas));
    set.metadata.insert("betas".into(), join(&angles.betas));
    set.metadata.insert("expectation".into(), expectation.to_string());
    set.metadata.insert("gates".into(), gate_list(&job.qubo, &angles));
    Ok(set)
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Textual circuit for the ansatz, using `x = (1 - z) / 2` to turn the QUBO
/// into Ising fields and couplings. For inspection only.
pub fn gate_list<T: Scalar>(qubo: &Qubo<T>, angles: &QaoaAngles) -> String {
    let n = qubo.num_vars();
    let mut h = vec![0.0; n];
    let mut couplings = Vec::new();
    for (i, j, q) in qubo.iter() {
        let q = q.as_f64();
        if i == j {
            h[i] -= q / 2.0;
        } else {
            h[i] -= q / 4.0;
            h[j] -= q / 4.0;
            couplings.push((i, j, q / 4.0));
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "qubits {n}");
    for q in 0..n {
        let _ = writeln!(out, "h {q}");
    }
    for (layer, (&g, &b)) in angles.gammas.iter().zip(&angles.betas).enumerate() {
        let _ = writeln!(out, "# layer {}", layer + 1);
        for (q, &hq) in h.iter().enumerate() {
            if hq != 0.0 {
                let _ = writeln!(out, "rz {q} {}", 2.0 * g * hq);
            }
        }
        for &(i, j, jij) in &couplings {
            let _ = writeln!(out, "rzz {i} {j} {}", 2.0 * g * jij);
        }
        for q in 0..n {
            let _ = writeln!(out, "rx {q} {}", 2.0 * b);
        }
    }
    out.push_str("measure\n");
    out
}
