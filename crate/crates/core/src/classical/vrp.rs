use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tsp::two_opt_positions;
use super::{total_route_length, SolveError};
use crate::formats::{Geometry, NodeId, RouteSolution, VrpInstance};
use crate::Scalar;

/// Largest customer count `vrp_brute_force` accepts.
pub const BRUTE_FORCE_LIMIT: usize = 8;

const ROUTE_TWO_OPT_PASSES: usize = 1000;

/// Clarke-Wright parallel savings followed by 2-opt on each route.
///
/// Positive savings are merged first; if the fleet limit is still exceeded,
/// non-positive savings are merged too, and as a last resort whole routes
/// are packed together first-fit decreasing by demand.
pub fn vrp_savings<T: Scalar>(instance: &VrpInstance<T>) -> Result<RouteSolution<T>, SolveError> {
    let total = instance.total_demand();
    if let Some(k) = instance.max_vehicles() {
        if total > u64::from(k) * instance.capacity() {
            return Err(SolveError::Infeasible(format!("total demand {total} exceeds fleet capacity")));
        }
    }
    let nodes = instance.nodes();
    let dist = instance.distance_matrix();
    let depot = instance.index_of(instance.depot()).expect("depot exists");
    let customers: Vec<usize> = {
        let mut c: Vec<usize> = (0..nodes.len()).filter(|&p| p != depot).collect();
        c.sort_by_key(|&p| nodes[p].id);
        c
    };
    let demand = |p: usize| instance.demands()[p];

    let mut routes: Vec<Option<Vec<usize>>> = customers.iter().map(|&c| Some(vec![c])).collect();
    let mut route_of: HashMap<usize, usize> = customers.iter().enumerate().map(|(r, &c)| (c, r)).collect();
    let mut load: Vec<u64> = customers.iter().map(|&c| demand(c)).collect();

    let mut savings: Vec<(T, usize, usize)> = Vec::new();
    for (a, &i) in customers.iter().enumerate() {
        for &j in &customers[a + 1..] {
            savings.push((dist.get(depot, i) + dist.get(depot, j) - dist.get(i, j), i, j));
        }
    }
    savings.sort_by(|x, y| {
        y.0.partial_cmp(&x.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(nodes[x.1].id.cmp(&nodes[y.1].id))
            .then(nodes[x.2].id.cmp(&nodes[y.2].id))
    });

    let limit = instance.max_vehicles().map(|k| k as usize);
    let live = |routes: &[Option<Vec<usize>>]| routes.iter().filter(|r| r.is_some()).count();
    for allow_negative in [false, true] {
        if allow_negative && limit.is_none_or(|k| live(&routes) <= k) {
            break;
        }
        for &(s, i, j) in &savings {
            if !allow_negative && s <= T::zero() {
                break;
            }
            if allow_negative && limit.is_some_and(|k| live(&routes) <= k) {
                break;
            }
            let (ri, rj) = (route_of[&i], route_of[&j]);
            if ri == rj || load[ri] + load[rj] > instance.capacity() {
                continue;
            }
            let (a, b) = (routes[ri].as_ref().unwrap(), routes[rj].as_ref().unwrap());
            let i_end = if a.last() == Some(&i) {
                Some(false)
            } else if a.first() == Some(&i) {
                Some(true)
            } else {
                None
            };
            let j_end = if b.first() == Some(&j) {
                Some(false)
            } else if b.last() == Some(&j) {
                Some(true)
            } else {
                None
            };
            let (Some(flip_a), Some(flip_b)) = (i_end, j_end) else { continue };
            let mut merged = routes[ri].take().unwrap();
            let mut tail = routes[rj].take().unwrap();
            if flip_a {
                merged.reverse();
            }
            if flip_b {
                tail.reverse();
            }
            merged.extend(tail);
            for &c in &merged {
                route_of.insert(c, ri);
            }
            load[ri] += load[rj];
            load[rj] = 0;
            routes[ri] = Some(merged);
        }
    }

    let mut routes: Vec<Vec<usize>> = routes.into_iter().flatten().collect();
    if let Some(k) = limit {
        if routes.len() > k {
            // whole routes first, then split them into single customers
            let singles: Vec<Vec<usize>> = routes.iter().flatten().map(|&c| vec![c]).collect();
            routes = pack_routes(routes, k, instance.capacity(), &demand)
                .or_else(|| pack_routes(singles, k, instance.capacity(), &demand))
                .ok_or_else(|| SolveError::Infeasible(format!("could not fit routes into {k} vehicles")))?;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut out = Vec::with_capacity(routes.len());
    for route in routes {
        let mut cycle = Vec::with_capacity(route.len() + 1);
        cycle.push(depot);
        cycle.extend(route);
        two_opt_positions(&dist, &mut cycle, ROUTE_TWO_OPT_PASSES, &mut rng);
        let at = cycle.iter().position(|&p| p == depot).expect("depot in cycle");
        cycle.rotate_left(at);
        out.push(cycle[1..].iter().map(|&p| nodes[p].id).collect());
    }
    let total_length = total_route_length(instance, &out)?;
    Ok(RouteSolution::new(out, total_length))
}

fn pack_routes(
    mut routes: Vec<Vec<usize>>,
    vehicles: usize,
    capacity: u64,
    demand: &impl Fn(usize) -> u64,
) -> Option<Vec<Vec<usize>>> {
    let load = |r: &Vec<usize>| r.iter().map(|&c| demand(c)).sum::<u64>();
    routes.sort_by_key(|r| std::cmp::Reverse(load(r)));
    let mut bins: Vec<(u64, Vec<usize>)> = Vec::new();
    for route in routes {
        let l = load(&route);
        match bins.iter_mut().find(|(used, _)| used + l <= capacity) {
            Some((used, bin)) => {
                *used += l;
                bin.extend(route);
            }
            None => bins.push((l, route)),
        }
    }
    (bins.len() <= vehicles).then(|| bins.into_iter().map(|(_, r)| r).collect())
}

/// Globally optimal CVRP solution by exhaustive enumeration (<= 8 customers).
///
/// Every customer subset is routed optimally by trying all orderings, then
/// every set partition of the customers into capacity-feasible subsets is
/// scored. Independent of the Held-Karp code path.
pub fn vrp_brute_force<T: Scalar>(instance: &VrpInstance<T>) -> Result<RouteSolution<T>, SolveError> {
    let customers = instance.customers();
    let m = customers.len();
    if m > BRUTE_FORCE_LIMIT {
        return Err(SolveError::TooLarge { size: m, limit: BRUTE_FORCE_LIMIT });
    }
    let demands: Vec<u64> = customers.iter().map(|&c| instance.demand(c)).collect::<Result<_, _>>()?;
    // best ordering for every subset of customers
    let mut best_route: Vec<Option<(T, Vec<NodeId>)>> = vec![None; 1 << m];
    for (mask, slot) in best_route.iter_mut().enumerate().skip(1) {
        let members: Vec<NodeId> = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| customers[b]).collect();
        let load: u64 = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| demands[b]).sum();
        if load > instance.capacity() {
            continue;
        }
        for perm in permutations_of(&members) {
            let len = super::route_length(instance, &perm)?;
            if slot.as_ref().is_none_or(|(best, _)| len < *best) {
                *slot = Some((len, perm));
            }
        }
    }

    let vehicle_limit = instance.max_vehicles().map_or(m.max(1), |k| k as usize);
    let mut best: Option<(T, Vec<usize>)> = None;
    let mut blocks = Vec::new();
    enumerate_partitions((1usize << m) - 1, &best_route, vehicle_limit, &mut blocks, &mut |blocks| {
        let routes: Vec<Vec<NodeId>> = blocks.iter().map(|&b| best_route[b].as_ref().unwrap().1.clone()).collect();
        let len = total_route_length(instance, &routes).expect("ids from instance");
        if best.as_ref().is_none_or(|(b, _)| len < *b) {
            best = Some((len, blocks.to_vec()));
        }
    });

    let (total_length, blocks) = best.ok_or_else(|| SolveError::Infeasible("no capacity-feasible partition".into()))?;
    let routes = blocks.iter().map(|&b| best_route[b].as_ref().unwrap().1.clone()).collect();
    Ok(RouteSolution::new(routes, total_length))
}

/// Visits each set partition of `remaining` into routable blocks, anchoring
/// every block on the lowest remaining customer so partitions are not repeated.
fn enumerate_partitions<T>(
    remaining: usize,
    routable: &[Option<(T, Vec<NodeId>)>],
    vehicles_left: usize,
    blocks: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if remaining == 0 {
        visit(blocks);
        return;
    }
    if vehicles_left == 0 {
        return;
    }
    let low = remaining & remaining.wrapping_neg();
    let rest = remaining & !low;
    // iterate subsets of `rest`, each joined with the anchor bit
    let mut sub = rest;
    loop {
        let block = sub | low;
        if routable[block].is_some() {
            blocks.push(block);
            enumerate_partitions(remaining & !block, routable, vehicles_left - 1, blocks, visit);
            blocks.pop();
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rest;
    }
}

/// All orderings of `items` (Heap's algorithm).
fn permutations_of<V: Clone>(items: &[V]) -> Vec<Vec<V>> {
    let mut a = items.to_vec();
    let n = a.len();
    let mut out = vec![a.clone()];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}
