use std::collections::HashSet;

use super::SolveError;
use crate::formats::{Geometry, NodeId, TspInstance, VrpInstance};
use crate::Scalar;

/// A closed tour over every node of a TSP instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour<T = f64> {
    pub order: Vec<NodeId>,
    pub length: T,
}

impl<T: Scalar> Tour<T> {
    /// Validates that `order` is a permutation of the instance's nodes and
    /// computes its length.
    pub fn from_order(instance: &TspInstance<T>, order: Vec<NodeId>) -> Result<Self, SolveError> {
        if order.len() != instance.len() {
            return Err(SolveError::InvalidTour(format!(
                "tour has {} nodes, instance has {}",
                order.len(),
                instance.len()
            )));
        }
        let mut seen = HashSet::with_capacity(order.len());
        for &id in &order {
            instance.node(id).map_err(|_| SolveError::UnknownNode(id))?;
            if !seen.insert(id) {
                return Err(SolveError::InvalidTour(format!("node {id} visited twice")));
            }
        }
        let length = cycle_length(instance, &order)?;
        Ok(Self { order, length })
    }

    /// Rotates the order so that `start` comes first.
    pub fn rotated_to(&self, start: NodeId) -> Option<Vec<NodeId>> {
        let pos = self.order.iter().position(|&id| id == start)?;
        let mut order = self.order.clone();
        order.rotate_left(pos);
        Some(order)
    }
}

/// Visiting order of a cycle normalised to start at its smallest id and
/// continue towards the smaller of that id's two neighbours. Returns
/// indices into `ids`.
pub(crate) fn canonical_indices(ids: &[NodeId]) -> Vec<usize> {
    let k = ids.len();
    if k == 0 {
        return Vec::new();
    }
    let start = (0..k).min_by_key(|&i| ids[i]).expect("non-empty");
    let next = ids[(start + 1) % k];
    let prev = ids[(start + k - 1) % k];
    if next <= prev {
        (0..k).map(|s| (start + s) % k).collect()
    } else {
        (0..k).map(|s| (start + k - s) % k).collect()
    }
}

/// Closed-cycle length through `ids`.
///
/// Summed in canonical order, so every rotation and reflection of the same
/// cycle yields a bit-identical result.
pub fn cycle_length<T: Scalar, G: Geometry<T> + ?Sized>(instance: &G, ids: &[NodeId]) -> Result<T, SolveError> {
    let nodes = ids
        .iter()
        .map(|&id| instance.node(id).map_err(|_| SolveError::UnknownNode(id)))
        .collect::<Result<Vec<_>, _>>()?;
    let k = nodes.len();
    if k < 2 {
        return Ok(T::zero());
    }
    let order = canonical_indices(ids);
    Ok((0..k).map(|s| nodes[order[s]].distance_to(nodes[order[(s + 1) % k]])).sum())
}

/// Length of a VRP route that leaves the depot, visits `route`, and returns.
pub fn route_length<T: Scalar>(instance: &VrpInstance<T>, route: &[NodeId]) -> Result<T, SolveError> {
    if route.is_empty() {
        return Ok(T::zero());
    }
    let mut cycle = Vec::with_capacity(route.len() + 1);
    cycle.push(instance.depot());
    cycle.extend_from_slice(route);
    cycle_length(instance, &cycle)
}

/// Sum of route lengths, accumulated in ascending order of each route's
/// smallest customer id so that the total does not depend on route order.
pub fn total_route_length<T: Scalar>(instance: &VrpInstance<T>, routes: &[Vec<NodeId>]) -> Result<T, SolveError> {
    let mut keyed = routes
        .iter()
        .map(|r| Ok((r.iter().copied().min().unwrap_or(NodeId::MAX), route_length(instance, r)?)))
        .collect::<Result<Vec<_>, SolveError>>()?;
    keyed.sort_by_key(|&(key, _)| key);
    Ok(keyed.into_iter().map(|(_, len)| len).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::Node;

    fn square() -> TspInstance {
        TspInstance::new(
            "sq",
            vec![Node::new(1, 0.0, 0.0), Node::new(2, 1.0, 0.0), Node::new(3, 1.0, 1.0), Node::new(4, 0.0, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(canonical_indices(&[3, 1, 4, 2]), vec![1, 0, 3, 2]);
        assert_eq!(canonical_indices(&[3, 1, 2, 4]), vec![1, 2, 3, 0]);
        assert_eq!(canonical_indices(&[7, 5]), vec![1, 0]);
    }

    #[test]
    fn rotations_and_reflections_agree_bitwise() {
        let inst = TspInstance::new(
            "r",
            vec![
                Node::new(1, 0.1, 0.7),
                Node::new(2, 3.3, 1.9),
                Node::new(3, 2.2, 5.1),
                Node::new(4, 0.3, 2.9),
                Node::new(5, 9.1, 0.2),
            ],
        )
        .unwrap();
        let base: f64 = cycle_length(&inst, &[1, 2, 3, 4, 5]).unwrap();
        for order in [[2, 3, 4, 5, 1], [5, 4, 3, 2, 1], [3, 2, 1, 5, 4]] {
            assert_eq!(cycle_length(&inst, &order).unwrap().to_bits(), base.to_bits());
        }
    }

    #[test]
    fn tour_validation() {
        let sq = square();
        assert_eq!(Tour::from_order(&sq, vec![1, 2, 3, 4]).unwrap().length, 4.0);
        assert!(matches!(Tour::from_order(&sq, vec![1, 2, 3]), Err(SolveError::InvalidTour(_))));
        assert!(matches!(Tour::from_order(&sq, vec![1, 2, 3, 3]), Err(SolveError::InvalidTour(_))));
        assert_eq!(Tour::from_order(&sq, vec![1, 2, 3, 9]), Err(SolveError::UnknownNode(9)));
    }

    #[test]
    fn single_customer_route() {
        let vrp = VrpInstance::from_points("v", (0.0, 0.0), &[(3.0, 4.0, 1)], 1, None).unwrap();
        assert_eq!(route_length(&vrp, &[2]).unwrap(), 10.0);
        assert_eq!(total_route_length(&vrp, &[vec![2], vec![]]).unwrap(), 10.0);
    }
}
