//! Relaxation bounds per problem type and their gap to a solution.

use metasolve_core::classical::fractional_bound;
use metasolve_core::formats::{
    parse_knapsack, parse_qubo, parse_tsp, parse_vrp, Geometry, KnapsackInstance, Qubo, TspInstance, VrpInstance,
};
use metasolve_core::quantum::{parse_job, QuantumJob};
use serde::{Deserialize, Serialize};

/// Denominator floor for the relative gap.
pub const GAP_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundType {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundReport {
    pub bound_type: BoundType,
    pub value: f64,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundComparison {
    pub bound: BoundReport,
    pub solution_value: f64,
    pub absolute_gap: f64,
    pub relative_gap: f64,
}

pub fn compare(bound: BoundReport, solution_value: f64) -> BoundComparison {
    let absolute_gap = (solution_value - bound.value).abs();
    let relative_gap = absolute_gap / bound.value.abs().max(GAP_EPSILON);
    BoundComparison { bound, solution_value, absolute_gap, relative_gap }
}

/// Bound for `input` read as `type_id`. `Err` carries a parse message;
/// `Ok(None)` means the type has no bound.
pub fn compute_bound(type_id: &str, input: &str) -> Result<Option<BoundReport>, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    Ok(Some(match type_id {
        "tsp" => {
            let t: TspInstance = parse_tsp(input).map_err(|e| err(&e))?;
            lower(tsp_bound(&t), "half the sum of each city's two cheapest incident edges")
        }
        "cluster-vrp" => {
            let v: VrpInstance = parse_vrp(input).map_err(|e| err(&e))?;
            lower(vrp_bound(&v), "degree relaxation: cheapest depot edge twice, each customer's two cheapest edges or a depot round trip")
        }
        "knapsack" => {
            let k: KnapsackInstance = parse_knapsack(input).map_err(|e| err(&e))?;
            BoundReport {
                bound_type: BoundType::Upper,
                value: fractional_bound(&k),
                method: "fractional greedy (Dantzig)".into(),
            }
        }
        "qubo" => {
            let q: Qubo = parse_qubo(input).map_err(|e| err(&e))?;
            lower(q.trivial_lower_bound(), "offset plus every negative coefficient")
        }
        "quantum-circuit-processing" => {
            let j: QuantumJob = parse_job(input).map_err(|e| err(&e))?;
            lower(j.qubo.trivial_lower_bound(), "offset plus every negative coefficient of the job's QUBO")
        }
        _ => return Ok(None),
    }))
}

fn lower(value: f64, method: &str) -> BoundReport {
    BoundReport { bound_type: BoundType::Lower, value, method: method.into() }
}

/// Two smallest distances from node `i` to any other node.
fn two_smallest<G: Geometry<f64>>(g: &G, i: usize) -> (f64, f64) {
    let nodes = g.nodes();
    let mut best = (f64::INFINITY, f64::INFINITY);
    for (j, other) in nodes.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = nodes[i].distance_to(other);
        if d < best.0 {
            best = (d, best.0);
        } else if d < best.1 {
            best.1 = d;
        }
    }
    best
}

/// Every city has two tour edges; with two cities both are the same edge.
pub fn tsp_bound(t: &TspInstance) -> f64 {
    let mut sum = 0.0;
    for i in 0..t.nodes().len() {
        let (a, b) = two_smallest(t, i);
        sum += a + if b.is_finite() { b } else { a };
    }
    sum / 2.0
}

/// A customer on its own route uses the depot edge twice, so its two
/// cheapest distinct edges are not a valid floor; take the smaller of the two.
pub fn vrp_bound(v: &VrpInstance) -> f64 {
    let depot = v.index_of(v.depot()).expect("depot is a node");
    let mut sum = 2.0 * two_smallest(v, depot).0;
    let depot_node = v.depot_node();
    for (i, node) in v.nodes().iter().enumerate() {
        if i == depot {
            continue;
        }
        let (a, b) = two_smallest(v, i);
        sum += (a + b).min(2.0 * node.distance_to(depot_node));
    }
    sum / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use metasolve_core::classical::{tsp_held_karp, vrp_brute_force};
    use metasolve_core::formats::Node;

    const SQUARE: &str = "NAME: sq\nTYPE: TSP\nDIMENSION: 4\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 0\n3 1 1\n4 0 1\nEOF\n";

    #[test]
    fn unit_square() {
        let b = compute_bound("tsp", SQUARE).unwrap().unwrap();
        assert_eq!(b.value, 4.0);
        assert_eq!(b.bound_type, BoundType::Lower);
        let c = compare(b, 4.0);
        assert_eq!(c.absolute_gap, 0.0);
        assert_eq!(c.relative_gap, 0.0);
    }

    #[test]
    fn other_types() {
        let k = compute_bound("knapsack", "capacity 10\n1 2 3\n2 3 4\n").unwrap().unwrap();
        assert_eq!((k.bound_type, k.value), (BoundType::Upper, 7.0));
        let q = compute_bound("qubo", "n 2\n0 0 1.5\n0 1 2\n").unwrap().unwrap();
        assert_eq!(q.value, 0.0);
        assert!(compute_bound("tsp", "garbage").is_err());
        assert_eq!(compute_bound("unknown", ""), Ok(None));
    }

    #[test]
    fn relative_gap_floor() {
        let c = compare(lower(0.0, ""), 1.0);
        assert_eq!(c.relative_gap, 1.0 / GAP_EPSILON);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn bounds_never_exceed_optima(coords in proptest::collection::vec((0.0f64..100.0, 0.0f64..100.0), 2..=7)) {
            let nodes: Vec<Node<f64>> = coords.iter().zip(1..).map(|(&(x, y), id)| Node::new(id, x, y)).collect();
            let t = TspInstance::new("r", nodes.clone()).unwrap();
            proptest::prop_assert!(tsp_bound(&t) <= tsp_held_karp(&t).unwrap().length + 1e-9);
            let demands = (0..nodes.len()).map(|i| u64::from(i != 0)).collect();
            let v = VrpInstance::new("r", 1, nodes, demands, 2, None).unwrap();
            proptest::prop_assert!(vrp_bound(&v) <= vrp_brute_force(&v).unwrap().total_length + 1e-9);
        }
    }
}
