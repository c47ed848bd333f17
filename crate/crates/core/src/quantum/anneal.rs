use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{JobKind, QuantumError, QuantumJob, SampleSet};
use crate::Scalar;

/// Best-so-far energy after each sweep, one vector per restart.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealTrace<T = f64> {
    pub best_per_sweep: Vec<Vec<T>>,
}

/// Metropolis single-flip annealing; one sample per restart.
pub fn simulated_anneal<T: Scalar>(job: &QuantumJob<T>) -> Result<SampleSet<T>, QuantumError> {
    simulated_anneal_traced(job).map(|(set, _)| set)
}

pub fn simulated_anneal_traced<T: Scalar>(job: &QuantumJob<T>) -> Result<(SampleSet<T>, AnnealTrace<T>), QuantumError> {
    if job.kind != JobKind::Anneal {
        return Err(QuantumError::InvalidJob(format!("annealer got a {} job", job.kind)));
    }
    job.validate()?;
    let started = Instant::now();
    let (diag, adj) = job.qubo.adjacency();
    let runs: Vec<(Vec<bool>, Vec<T>)> =
        (0..job.anneal.restarts).into_par_iter().map(|r| anneal_once(job, &diag, &adj, r)).collect();
    let mut trace = Vec::with_capacity(runs.len());
    let mut states = Vec::with_capacity(runs.len());
    for (state, t) in runs {
        states.push(state);
        trace.push(t);
    }
    let mut set = SampleSet::from_bitstrings(&job.qubo, states, "local-sa").expect("annealer keeps the register width");
    set.timings.insert("anneal".into(), started.elapsed().as_secs_f64());
    Ok((set, AnnealTrace { best_per_sweep: trace }))
}

fn anneal_once<T: Scalar>(
    job: &QuantumJob<T>,
    diag: &[T],
    adj: &[Vec<(usize, T)>],
    restart: u32,
) -> (Vec<bool>, Vec<T>) {
    let n = diag.len();
    let params = job.anneal;
    let mut rng = ChaCha8Rng::seed_from_u64(job.seed);
    rng.set_stream(u64::from(restart));
    let mut x: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
    let mut energy = job.qubo.energy(&x).expect("width matches");

    // field[i] = diag[i] + sum_j q_ij x_j; flipping i changes E by (1 - 2 x_i) * field[i]
    let mut field: Vec<T> = diag.to_vec();
    for i in 0..n {
        if x[i] {
            for &(j, q) in &adj[i] {
                field[j] = field[j] + q;
            }
        }
    }

    let mut best = x.clone();
    let mut best_energy = energy;
    let mut trace = Vec::with_capacity(params.sweeps as usize);
    let ratio = params.beta_end / params.beta_start;
    let last = f64::from(params.sweeps.saturating_sub(1).max(1));
    for sweep in 0..params.sweeps {
        let beta = T::lit(params.beta_start * ratio.powf(f64::from(sweep) / last));
        for i in 0..n {
            let delta = if x[i] { -field[i] } else { field[i] };
            let accept = delta <= T::zero() || T::lit(rng.random::<f64>()) < (-beta * delta).exp();
            if !accept {
                continue;
            }
            let sign = if x[i] { -T::one() } else { T::one() };
            x[i] = !x[i];
            energy = energy + delta;
            for &(j, q) in &adj[i] {
                field[j] = field[j] + sign * q;
            }
            if energy < best_energy {
                best_energy = energy;
                best.copy_from_slice(&x);
            }
        }
        trace.push(best_energy);
    }
    (best, trace)
}
