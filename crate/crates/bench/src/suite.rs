use std::fs;
use std::path::Path;

use metasolve_core::classical::{knapsack_dp, vrp_brute_force};
use metasolve_core::decomposition::{clustered_optimum, two_phase_cluster};
use metasolve_core::formats::{parse_vrp, serialize_vrp};
use metasolve_core::VrpInstance64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::BenchError;

pub const SIZES: [usize; 5] = [4, 5, 6, 7, 8];
pub const PER_SIZE: usize = 2;
pub const VEHICLES: u32 = 2;

/// Ten instances, two per customer count 4..=8, unit demands and capacity
/// `ceil(n / 2)` so two vehicles always suffice. Coordinates are uniform in
/// `[0, 100]^2`, rounded to two decimals so the files read back exactly.
pub fn generate_suite(seed: u64) -> Vec<VrpInstance64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = move || {
        let mut c = || (rng.random_range(0.0..=100.0f64) * 100.0).round() / 100.0;
        (c(), c())
    };
    let mut out = Vec::new();
    for n in SIZES {
        for k in 0..PER_SIZE {
            let name = format!("vrp{n:02}{}", (b'a' + k as u8) as char);
            let depot = point();
            let customers: Vec<(f64, f64, u64)> = (0..n).map(|_| point()).map(|(x, y)| (x, y, 1)).collect();
            let inst = VrpInstance64::from_points(name, depot, &customers, n.div_ceil(2) as u64, Some(VEHICLES))
                .expect("generated instance is well formed");
            out.push(inst);
        }
    }
    out
}

pub fn write_suite(instances: &[VrpInstance64], dir: &Path) -> Result<(), BenchError> {
    fs::create_dir_all(dir)?;
    for inst in instances {
        fs::write(dir.join(format!("{}.vrp", inst.name())), serialize_vrp(inst))?;
    }
    Ok(())
}

/// Every `*.vrp` file in `dir`, sorted by file name.
pub fn load_suite(dir: &Path) -> Result<Vec<VrpInstance64>, BenchError> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("vrp")))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p)?;
            parse_vrp(&text).map_err(|e| BenchError::Instance(p.display().to_string(), e.to_string()))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baselines {
    /// Optimal route set over all partitions.
    pub without_clustering: f64,
    /// Optimal tours inside the two-phase clusters.
    pub with_clustering: f64,
}

pub fn compute_baselines(inst: &VrpInstance64) -> Result<Baselines, BenchError> {
    let fail = |e: &dyn std::fmt::Display| BenchError::Instance(inst.name().to_string(), e.to_string());
    let without = vrp_brute_force(inst).map_err(|e| fail(&e))?;
    let clustering = two_phase_cluster(inst, knapsack_dp).map_err(|e| fail(&e))?;
    let with = clustered_optimum(inst, &clustering).map_err(|e| fail(&e))?;
    Ok(Baselines { without_clustering: without.total_length, with_clustering: with.total_length })
}
