use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{SolveError, Tour};
use crate::formats::{DistanceMatrix, Geometry, NodeId, TspInstance};
use crate::Scalar;

/// Largest instance `tsp_held_karp` accepts.
pub const HELD_KARP_LIMIT: usize = 20;

/// Greedy construction from `start`; ties go to the smallest node id.
pub fn tsp_nearest_neighbor<T: Scalar>(instance: &TspInstance<T>, start: NodeId) -> Result<Tour<T>, SolveError> {
    let nodes = instance.nodes();
    let mut current = instance.index_of(start).ok_or(SolveError::UnknownNode(start))?;
    let dist = instance.distance_matrix();
    let mut visited = vec![false; nodes.len()];
    visited[current] = true;
    let mut order = vec![start];
    while order.len() < nodes.len() {
        let mut next: Option<usize> = None;
        for cand in (0..nodes.len()).filter(|&c| !visited[c]) {
            next = match next {
                None => Some(cand),
                Some(best) => {
                    let (dc, db) = (dist.get(current, cand), dist.get(current, best));
                    if dc < db || (dc == db && nodes[cand].id < nodes[best].id) {
                        Some(cand)
                    } else {
                        Some(best)
                    }
                }
            };
        }
        let next = next.expect("unvisited node remains");
        visited[next] = true;
        order.push(nodes[next].id);
        current = next;
    }
    Tour::from_order(instance, order)
}

/// 2-opt local search with first-improvement acceptance.
///
/// Each pass scans every segment-reversal move in an order shuffled by a
/// generator seeded from `seed`, applying improving moves as they are found.
/// Stops after a pass without improvement or after `max_passes` passes. The
/// result is never longer than `initial`.
pub fn tsp_two_opt<T: Scalar>(
    instance: &TspInstance<T>,
    initial: &Tour<T>,
    max_passes: usize,
    seed: u64,
) -> Result<Tour<T>, SolveError> {
    let checked = Tour::from_order(instance, initial.order.clone())?;
    let dist = instance.distance_matrix();
    let mut positions: Vec<usize> = checked.order.iter().map(|&id| instance.index_of(id).expect("validated")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    two_opt_positions(&dist, &mut positions, max_passes, &mut rng);
    let order = positions.iter().map(|&p| instance.nodes()[p].id).collect();
    let improved = Tour::from_order(instance, order)?;
    Ok(if improved.length <= checked.length { improved } else { checked })
}

/// In-place 2-opt over matrix positions. Returns the number of moves applied.
pub(crate) fn two_opt_positions<T: Scalar>(
    dist: &DistanceMatrix<T>,
    tour: &mut [usize],
    max_passes: usize,
    rng: &mut ChaCha8Rng,
) -> usize {
    let n = tour.len();
    if n < 4 {
        return 0;
    }
    let mut moves: Vec<(usize, usize)> =
        (0..n - 2).flat_map(|i| ((i + 2)..n).map(move |j| (i, j))).filter(|&(i, j)| !(i == 0 && j == n - 1)).collect();
    let slack = T::epsilon() * T::lit(64.0);
    let mut applied = 0;
    for _ in 0..max_passes {
        moves.shuffle(rng);
        let mut improved = false;
        for &(i, j) in &moves {
            let (a, b) = (tour[i], tour[i + 1]);
            let (c, d) = (tour[j], tour[(j + 1) % n]);
            let removed = dist.get(a, b) + dist.get(c, d);
            let added = dist.get(a, c) + dist.get(b, d);
            if added < removed - slack * removed.max(T::one()) {
                tour[i + 1..=j].reverse();
                improved = true;
                applied += 1;
            }
        }
        if !improved {
            break;
        }
    }
    applied
}

/// Exact TSP by dynamic programming over subsets (n <= 20).
///
/// The tour starts at the smallest node id. Ties prefer the predecessor with
/// the smallest id.
pub fn tsp_held_karp<T: Scalar>(instance: &TspInstance<T>) -> Result<Tour<T>, SolveError> {
    let n = instance.len();
    if n > HELD_KARP_LIMIT {
        return Err(SolveError::TooLarge { size: n, limit: HELD_KARP_LIMIT });
    }
    let nodes = instance.nodes();
    let mut by_id: Vec<usize> = (0..n).collect();
    by_id.sort_by_key(|&p| nodes[p].id);
    let start = by_id[0];
    let others = &by_id[1..];
    let m = others.len();
    let dist = instance.distance_matrix();

    let full = (1usize << m) - 1;
    let mut cost = vec![T::infinity(); (1 << m) * m];
    let mut parent = vec![u8::MAX; (1 << m) * m];
    for k in 0..m {
        cost[(1 << k) * m + k] = dist.get(start, others[k]);
    }
    for mask in 1..=full {
        for k in 0..m {
            if mask >> k & 1 == 0 {
                continue;
            }
            let here = cost[mask * m + k];
            if !here.is_finite() {
                continue;
            }
            for j in 0..m {
                if mask >> j & 1 == 1 {
                    continue;
                }
                let next = mask | 1 << j;
                let cand = here + dist.get(others[k], others[j]);
                if cand < cost[next * m + j] {
                    cost[next * m + j] = cand;
                    parent[next * m + j] = k as u8;
                }
            }
        }
    }

    let mut last = 0;
    for k in 1..m {
        if cost[full * m + k] + dist.get(others[k], start) < cost[full * m + last] + dist.get(others[last], start) {
            last = k;
        }
    }
    let mut path = Vec::with_capacity(n);
    let mut mask = full;
    let mut k = last;
    // a single city has no others to walk back through
    if m > 0 {
        loop {
            path.push(nodes[others[k]].id);
            let prev = parent[mask * m + k];
            mask &= !(1 << k);
            if prev == u8::MAX {
                break;
            }
            k = prev as usize;
        }
    }
    path.push(nodes[start].id);
    path.reverse();
    Tour::from_order(instance, path)
}
