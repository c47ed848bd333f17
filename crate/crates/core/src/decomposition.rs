//! VRP decomposition: cluster customers under the capacity limit, route each
//! cluster as a TSP through the depot, and stitch the tours back together.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classical::{total_route_length, tsp_held_karp, KnapsackSolution, SolveError, Tour};
use crate::formats::{
    Geometry, InstanceError, KnapsackInstance, KnapsackItem, Node, NodeId, RouteSolution, TspInstance, VrpInstance,
};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompositionError {
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("composition failed: {0}")]
    Composition(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl From<InstanceError> for DecompositionError {
    fn from(e: InstanceError) -> Self {
        Self::Solve(SolveError::Instance(e))
    }
}

/// Partition of the customers; every cluster is routed by one vehicle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    /// Customer ids per cluster, ascending within each cluster.
    pub clusters: Vec<Vec<NodeId>>,
    /// Seed customer of each cluster, in the order clusters were opened.
    pub seeds: Vec<NodeId>,
}

impl Clustering {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

fn check_fleet<T: Scalar>(instance: &VrpInstance<T>, clusters: usize) -> Result<(), DecompositionError> {
    match instance.max_vehicles() {
        Some(k) if clusters > k as usize => {
            Err(DecompositionError::Infeasible(format!("{clusters} clusters needed but only {k} vehicles available")))
        }
        _ => Ok(()),
    }
}

/// Two-phase clustering with knapsack-selected cluster members.
///
/// Repeatedly opens a cluster at the unassigned customer farthest from the
/// depot and all earlier seeds, then fills it by solving a knapsack over the
/// remaining customers: weight is demand, value is `diameter - distance to
/// seed` (with the diameter padded so no value is zero), capacity is the
/// vehicle capacity left after the seed.
pub fn two_phase_cluster<T, F>(instance: &VrpInstance<T>, mut knapsack: F) -> Result<Clustering, DecompositionError>
where
    T: Scalar,
    F: FnMut(&KnapsackInstance<T>) -> Result<KnapsackSolution<T>, SolveError>,
{
    let capacity = instance.capacity();
    let depot = instance.depot_node();
    // a customer exactly one diameter from the seed would otherwise score 0
    // and could be left behind, opening a cluster the fleet may not have
    let diameter = instance.diameter();
    let reach = diameter + (diameter * T::lit(1.0 / 65536.0)).max(T::epsilon());
    for c in instance.customers() {
        let d = instance.demand(c)?;
        if d > capacity {
            return Err(DecompositionError::Infeasible(format!("customer {c} demand {d} exceeds capacity {capacity}")));
        }
    }

    let mut unassigned: BTreeSet<NodeId> = instance.customers().into_iter().collect();
    let mut anchors: Vec<&Node<T>> = vec![depot];
    let mut clustering = Clustering { clusters: Vec::new(), seeds: Vec::new() };

    while !unassigned.is_empty() {
        let mut seed: Option<(NodeId, T)> = None;
        for &c in &unassigned {
            let node = instance.node(c)?;
            let gap = anchors.iter().map(|a| a.distance_to(node)).fold(T::infinity(), T::min);
            // BTreeSet iterates ids ascending, so strict > keeps the smallest id on ties
            if seed.is_none_or(|(_, best)| gap > best) {
                seed = Some((c, gap));
            }
        }
        let (seed_id, _) = seed.expect("unassigned is non-empty");
        unassigned.remove(&seed_id);
        let seed_node = instance.node(seed_id)?;
        anchors.push(seed_node);

        let items = unassigned
            .iter()
            .map(|&c| {
                Ok(KnapsackItem {
                    id: c,
                    weight: instance.demand(c)?,
                    value: reach - instance.node(c)?.distance_to(seed_node),
                })
            })
            .collect::<Result<Vec<_>, SolveError>>()?;
        let room = capacity - instance.demand(seed_id)?;
        let problem = KnapsackInstance::new(items, room).map_err(SolveError::from)?;
        let picked = knapsack(&problem)?;

        let mut cluster = vec![seed_id];
        for id in picked.chosen {
            if !unassigned.remove(&id) {
                return Err(DecompositionError::Composition(format!("knapsack picked unknown customer {id}")));
            }
            cluster.push(id);
        }
        cluster.sort_unstable();
        clustering.clusters.push(cluster);
        clustering.seeds.push(seed_id);
    }
    check_fleet(instance, clustering.clusters.len())?;
    Ok(clustering)
}

/// Capacitated k-means: seeded Lloyd iterations on customer coordinates,
/// then greedy repair of over-full clusters.
pub fn kmeans_cluster<T: Scalar>(
    instance: &VrpInstance<T>,
    k: usize,
    seed: u64,
    max_iters: usize,
) -> Result<Clustering, DecompositionError> {
    let customers = instance.customers();
    let m = customers.len();
    if k == 0 || k > m {
        return Err(DecompositionError::InvalidArgument(format!(
            "k = {k} must be between 1 and the customer count {m}"
        )));
    }
    let points: Vec<&Node<T>> =
        customers.iter().map(|&c| instance.node(c)).collect::<Result<_, _>>().map_err(SolveError::from)?;
    let demand: Vec<u64> =
        customers.iter().map(|&c| instance.demand(c)).collect::<Result<_, _>>().map_err(SolveError::from)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial: Vec<usize> = sample(&mut rng, m, k).into_vec();
    let mut centroids: Vec<(T, T)> = initial.iter().map(|&i| (points[i].x, points[i].y)).collect();
    let dist_to = |p: &Node<T>, c: (T, T)| ((p.x - c.0) * (p.x - c.0) + (p.y - c.1) * (p.y - c.1)).sqrt();
    let nearest = |p: &Node<T>, centroids: &[(T, T)]| {
        let mut best = 0;
        for j in 1..centroids.len() {
            if dist_to(p, centroids[j]) < dist_to(p, centroids[best]) {
                best = j;
            }
        }
        best
    };

    let mut assign: Vec<usize> = points.iter().map(|p| nearest(p, &centroids)).collect();
    for _ in 0..max_iters {
        for (j, centroid) in centroids.iter_mut().enumerate() {
            let members: Vec<&Node<T>> = (0..m).filter(|&i| assign[i] == j).map(|i| points[i]).collect();
            if !members.is_empty() {
                let count = T::of_usize(members.len());
                *centroid =
                    (members.iter().map(|p| p.x).sum::<T>() / count, members.iter().map(|p| p.y).sum::<T>() / count);
            }
        }
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centroids)).collect();
        if next == assign {
            break;
        }
        assign = next;
    }

    // capacity repair
    let capacity = instance.capacity();
    let mut load = vec![0u64; k];
    for i in 0..m {
        load[assign[i]] += demand[i];
    }
    while let Some(over) = (0..k).find(|&j| load[j] > capacity) {
        let mut best: Option<(T, usize, usize)> = None;
        for i in (0..m).filter(|&i| assign[i] == over) {
            let target = (0..k).filter(|&j| j != over && load[j] + demand[i] <= capacity).min_by(|&a, &b| {
                dist_to(points[i], centroids[a])
                    .partial_cmp(&dist_to(points[i], centroids[b]))
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.cmp(&b))
            });
            if let Some(j) = target {
                let increase = dist_to(points[i], centroids[j]) - dist_to(points[i], centroids[over]);
                if best.is_none_or(|(b, _, _)| increase < b) {
                    best = Some((increase, i, j));
                }
            }
        }
        let (_, i, j) = best.ok_or_else(|| {
            DecompositionError::Infeasible(format!(
                "cannot repair cluster {over}: no cluster has room for any of its customers"
            ))
        })?;
        load[over] -= demand[i];
        load[j] += demand[i];
        assign[i] = j;
    }

    let mut clustering = Clustering { clusters: Vec::new(), seeds: Vec::new() };
    for (j, &init) in initial.iter().enumerate() {
        let cluster: Vec<NodeId> = (0..m).filter(|&i| assign[i] == j).map(|i| customers[i]).collect();
        if !cluster.is_empty() {
            clustering.clusters.push(cluster);
            clustering.seeds.push(customers[init]);
        }
    }
    check_fleet(instance, clustering.clusters.len())?;
    Ok(clustering)
}

/// TSP over the depot (listed first) and the cluster's customers.
pub fn cluster_to_tsp<T: Scalar>(
    instance: &VrpInstance<T>,
    cluster: &[NodeId],
) -> Result<TspInstance<T>, DecompositionError> {
    if cluster.is_empty() {
        return Err(DecompositionError::InvalidArgument("cluster is empty".into()));
    }
    let mut ids: Vec<NodeId> = cluster.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let mut nodes = vec![*instance.depot_node()];
    for id in ids {
        if id == instance.depot() {
            return Err(DecompositionError::InvalidArgument("cluster contains the depot".into()));
        }
        nodes.push(*instance.node(id).map_err(SolveError::from)?);
    }
    let name = format!("{}-cluster-{}", instance.name(), cluster.iter().min().expect("non-empty"));
    TspInstance::new(name, nodes).map_err(|e| DecompositionError::Solve(e.into()))
}

/// Turns one depot-containing tour per cluster into a VRP route set.
pub fn compose_routes<T: Scalar>(
    instance: &VrpInstance<T>,
    tours: &[Tour<T>],
) -> Result<RouteSolution<T>, DecompositionError> {
    let depot = instance.depot();
    let mut seen = BTreeSet::new();
    let mut routes = Vec::with_capacity(tours.len());
    for (t, tour) in tours.iter().enumerate() {
        let rotated = tour
            .rotated_to(depot)
            .ok_or_else(|| DecompositionError::Composition(format!("tour {t} does not contain the depot")))?;
        let route: Vec<NodeId> = rotated[1..].to_vec();
        for &id in &route {
            if id == depot {
                return Err(DecompositionError::Composition(format!("tour {t} visits the depot twice")));
            }
            instance.node(id).map_err(SolveError::from)?;
            if !seen.insert(id) {
                return Err(DecompositionError::Composition(format!("customer {id} appears in more than one tour")));
            }
        }
        routes.push(route);
    }
    let total = total_route_length(instance, &routes)?;
    Ok(RouteSolution::new(routes, total))
}

/// Best route set reachable once the clustering is fixed: an exact TSP per cluster.
pub fn clustered_optimum<T: Scalar>(
    instance: &VrpInstance<T>,
    clustering: &Clustering,
) -> Result<RouteSolution<T>, DecompositionError> {
    let tours = clustering
        .clusters
        .iter()
        .map(|c| Ok(tsp_held_karp(&cluster_to_tsp(instance, c)?)?))
        .collect::<Result<Vec<_>, DecompositionError>>()?;
    compose_routes(instance, &tours)
}
