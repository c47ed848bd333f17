use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use super::{
    content_lines, end_line, parse_field, parse_finite, Geometry, InstanceError, Node, NodeId, ParseError,
    ParseErrorKind,
};
use crate::Scalar;

/// Symmetric Euclidean TSP instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance<T = f64> {
    name: String,
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> TspInstance<T> {
    pub fn new(name: impl Into<String>, nodes: Vec<Node<T>>) -> Result<Self, InstanceError> {
        check_nodes(&nodes, 2)?;
        Ok(Self { name: name.into(), nodes })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().map(|n| n.id)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl<T: Scalar> Geometry<T> for TspInstance<T> {
    fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }
}

/// Capacitated VRP instance with a single depot.
#[derive(Debug, Clone, PartialEq)]
pub struct VrpInstance<T = f64> {
    name: String,
    depot: NodeId,
    nodes: Vec<Node<T>>,
    demands: Vec<u64>,
    capacity: u64,
    max_vehicles: Option<u32>,
}

impl<T: Scalar> VrpInstance<T> {
    /// `demands` is aligned with `nodes`.
    pub fn new(
        name: impl Into<String>,
        depot: NodeId,
        nodes: Vec<Node<T>>,
        demands: Vec<u64>,
        capacity: u64,
        max_vehicles: Option<u32>,
    ) -> Result<Self, InstanceError> {
        check_nodes(&nodes, 2)?;
        if demands.len() != nodes.len() {
            return Err(InstanceError::DemandLength { expected: nodes.len(), got: demands.len() });
        }
        if capacity == 0 {
            return Err(InstanceError::NotPositive("capacity"));
        }
        if max_vehicles == Some(0) {
            return Err(InstanceError::NotPositive("vehicle count"));
        }
        let depot_idx = nodes.iter().position(|n| n.id == depot).ok_or(InstanceError::UnknownNode(depot))?;
        if demands[depot_idx] != 0 {
            return Err(InstanceError::DepotDemand(depot));
        }
        for (node, &demand) in nodes.iter().zip(&demands) {
            if demand > capacity {
                return Err(InstanceError::DemandExceedsCapacity { node: node.id, demand, capacity });
            }
        }
        let total: u64 = demands.iter().sum();
        if let Some(k) = max_vehicles {
            if total > u64::from(k).saturating_mul(capacity) {
                return Err(InstanceError::FleetTooSmall { total, vehicles: k, capacity });
            }
        }
        Ok(Self { name: name.into(), depot, nodes, demands, capacity, max_vehicles })
    }

    /// Depot at `(depot_x, depot_y)` with id 1, customers numbered from 2.
    pub fn from_points(
        name: impl Into<String>,
        depot: (T, T),
        customers: &[(T, T, u64)],
        capacity: u64,
        max_vehicles: Option<u32>,
    ) -> Result<Self, InstanceError> {
        let mut nodes = vec![Node::new(1, depot.0, depot.1)];
        let mut demands = vec![0];
        for (k, &(x, y, d)) in customers.iter().enumerate() {
            nodes.push(Node::new(k as NodeId + 2, x, y));
            demands.push(d);
        }
        Self::new(name, 1, nodes, demands, capacity, max_vehicles)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn depot(&self) -> NodeId {
        self.depot
    }

    pub fn depot_node(&self) -> &Node<T> {
        self.nodes.iter().find(|n| n.id == self.depot).expect("depot present by construction")
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn max_vehicles(&self) -> Option<u32> {
        self.max_vehicles
    }

    pub fn demands(&self) -> &[u64] {
        &self.demands
    }

    pub fn demand(&self, id: NodeId) -> Result<u64, InstanceError> {
        self.index_of(id).map(|i| self.demands[i]).ok_or(InstanceError::UnknownNode(id))
    }

    pub fn total_demand(&self) -> u64 {
        self.demands.iter().sum()
    }

    /// Customer ids in ascending order.
    pub fn customers(&self) -> Vec<NodeId> {
        let mut ids: Vec<NodeId> = self.nodes.iter().map(|n| n.id).filter(|&id| id != self.depot).collect();
        ids.sort_unstable();
        ids
    }

    /// Minimum number of vehicles implied by capacity, `ceil(total demand / capacity)`.
    pub fn min_vehicles(&self) -> usize {
        self.total_demand().div_ceil(self.capacity) as usize
    }

    /// TSP over the depot and every customer.
    pub fn to_tsp(&self) -> TspInstance<T> {
        TspInstance { name: self.name.clone(), nodes: self.nodes.clone() }
    }
}

impl<T: Scalar> Geometry<T> for VrpInstance<T> {
    fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }
}

fn check_nodes<T: Scalar>(nodes: &[Node<T>], min: usize) -> Result<(), InstanceError> {
    if nodes.len() < min {
        return Err(InstanceError::TooFewNodes { min, got: nodes.len() });
    }
    let mut seen = HashSet::with_capacity(nodes.len());
    for n in nodes {
        if !seen.insert(n.id) {
            return Err(InstanceError::DuplicateNode(n.id));
        }
        if !n.x.is_finite() || !n.y.is_finite() {
            return Err(InstanceError::NonFinite(n.id));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Flavor {
    Tsp,
    Cvrp,
}

/// Section start line and its `(line, node, demand)` rows.
type DemandSection = (usize, Vec<(usize, NodeId, u64)>);

/// Everything read from a TSPLIB-style document before instance validation.
struct Document<T> {
    header: BTreeMap<&'static str, (usize, String)>,
    coords: Option<(usize, Vec<Node<T>>)>,
    demands: Option<DemandSection>,
    depots: Option<(usize, Vec<NodeId>)>,
}

const KEYS: [&str; 8] = ["NAME", "TYPE", "COMMENT", "DIMENSION", "EDGE_WEIGHT_TYPE", "CAPACITY", "VEHICLES", "EOF"];

fn read_document<T: Scalar>(text: &str, flavor: Flavor) -> Result<Document<T>, ParseError> {
    let mut doc = Document { header: BTreeMap::new(), coords: None, demands: None, depots: None };
    let mut lines = content_lines(text, None).peekable();
    let mut saw_eof = false;

    while let Some((line, body)) = lines.next() {
        if saw_eof {
            return Err(ParseError::syntax(line, "content after EOF"));
        }
        match body {
            "EOF" => saw_eof = true,
            "NODE_COORD_SECTION" => {
                if doc.coords.is_some() {
                    return Err(ParseError::new(line, ParseErrorKind::Duplicate("NODE_COORD_SECTION".into())));
                }
                let n = dimension(&doc, line)?;
                let mut nodes = Vec::with_capacity(n.min(4096));
                for _ in 0..n {
                    let (l, row) = lines.next().ok_or_else(|| {
                        ParseError::new(end_line(text), ParseErrorKind::Missing("node coordinate line"))
                    })?;
                    let mut tok = row.split_whitespace();
                    let id: NodeId = parse_field(l, tok.next(), "node id")?;
                    let x: T = parse_finite(l, tok.next(), "x coordinate")?;
                    let y: T = parse_finite(l, tok.next(), "y coordinate")?;
                    if tok.next().is_some() {
                        return Err(ParseError::syntax(l, "trailing tokens after coordinates"));
                    }
                    if nodes.iter().any(|n: &Node<T>| n.id == id) {
                        return Err(ParseError::new(l, ParseErrorKind::Duplicate(format!("node id {id}"))));
                    }
                    nodes.push(Node::new(id, x, y));
                }
                doc.coords = Some((line, nodes));
            }
            "DEMAND_SECTION" if flavor == Flavor::Cvrp => {
                if doc.demands.is_some() {
                    return Err(ParseError::new(line, ParseErrorKind::Duplicate("DEMAND_SECTION".into())));
                }
                let n = dimension(&doc, line)?;
                let mut rows = Vec::with_capacity(n.min(4096));
                for _ in 0..n {
                    let (l, row) = lines
                        .next()
                        .ok_or_else(|| ParseError::new(end_line(text), ParseErrorKind::Missing("demand line")))?;
                    let mut tok = row.split_whitespace();
                    let id: NodeId = parse_field(l, tok.next(), "node id")?;
                    let d: u64 = parse_field(l, tok.next(), "demand")?;
                    if tok.next().is_some() {
                        return Err(ParseError::syntax(l, "trailing tokens after demand"));
                    }
                    rows.push((l, id, d));
                }
                doc.demands = Some((line, rows));
            }
            "DEPOT_SECTION" if flavor == Flavor::Cvrp => {
                if doc.depots.is_some() {
                    return Err(ParseError::new(line, ParseErrorKind::Duplicate("DEPOT_SECTION".into())));
                }
                let mut ids = Vec::new();
                loop {
                    let (l, row) = lines.next().ok_or_else(|| {
                        ParseError::new(end_line(text), ParseErrorKind::Missing("DEPOT_SECTION terminator -1"))
                    })?;
                    let value: i64 = parse_field(l, Some(row), "depot id")?;
                    if value == -1 {
                        break;
                    }
                    let id = NodeId::try_from(value)
                        .map_err(|_| ParseError::syntax(l, format!("invalid depot id {value}")))?;
                    ids.push(id);
                }
                doc.depots = Some((line, ids));
            }
            _ => {
                let (key, value) = body.split_once(':').ok_or_else(|| {
                    ParseError::syntax(line, format!("expected 'KEY: value' or a section name, found '{body}'"))
                })?;
                let key = key.trim();
                let key = KEYS
                    .iter()
                    .copied()
                    .find(|k| *k == key && *k != "EOF")
                    .ok_or_else(|| ParseError::syntax(line, format!("unknown key '{key}'")))?;
                let value = value.trim().to_string();
                if doc.header.insert(key, (line, value)).is_some() {
                    return Err(ParseError::new(line, ParseErrorKind::Duplicate(key.into())));
                }
            }
        }
    }

    let expected_type = match flavor {
        Flavor::Tsp => "TSP",
        Flavor::Cvrp => "CVRP",
    };
    match doc.header.get("TYPE") {
        Some((l, v)) if v != expected_type => {
            return Err(ParseError::new(*l, ParseErrorKind::Unsupported { key: "TYPE".into(), value: v.clone() }))
        }
        Some(_) => {}
        None => return Err(ParseError::new(end_line(text), ParseErrorKind::Missing("TYPE"))),
    }
    match doc.header.get("EDGE_WEIGHT_TYPE") {
        Some((l, v)) if v != "EUC_2D" => {
            return Err(ParseError::new(
                *l,
                ParseErrorKind::Unsupported { key: "EDGE_WEIGHT_TYPE".into(), value: v.clone() },
            ))
        }
        Some(_) => {}
        None => return Err(ParseError::new(end_line(text), ParseErrorKind::Missing("EDGE_WEIGHT_TYPE"))),
    }
    if flavor == Flavor::Tsp {
        for key in ["CAPACITY", "VEHICLES"] {
            if let Some((l, _)) = doc.header.get(key) {
                return Err(ParseError::syntax(*l, format!("{key} is not valid in a TSP document")));
            }
        }
    }
    if doc.coords.is_none() {
        return Err(ParseError::new(end_line(text), ParseErrorKind::Missing("NODE_COORD_SECTION")));
    }
    Ok(doc)
}

fn dimension<T>(doc: &Document<T>, section_line: usize) -> Result<usize, ParseError> {
    let (l, v) = doc
        .header
        .get("DIMENSION")
        .ok_or_else(|| ParseError::syntax(section_line, "DIMENSION must precede sections"))?;
    let n: usize = parse_field(*l, Some(v.as_str()), "DIMENSION")?;
    if n < 2 {
        return Err(ParseError::syntax(*l, "DIMENSION must be at least 2"));
    }
    Ok(n)
}

fn name_of<T>(doc: &Document<T>) -> String {
    doc.header.get("NAME").map(|(_, v)| v.clone()).unwrap_or_default()
}

pub fn parse_tsp<T: Scalar>(text: &str) -> Result<TspInstance<T>, ParseError> {
    let doc = read_document::<T>(text, Flavor::Tsp)?;
    let name = name_of(&doc);
    let (line, nodes) = doc.coords.expect("checked in read_document");
    TspInstance::new(name, nodes).map_err(|e| ParseError::new(line, e.into()))
}

pub fn serialize_tsp<T: Scalar>(instance: &TspInstance<T>) -> String {
    let mut out = String::new();
    writeln!(out, "NAME: {}", instance.name).unwrap();
    out.push_str("TYPE: TSP\n");
    writeln!(out, "DIMENSION: {}", instance.nodes.len()).unwrap();
    out.push_str("EDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n");
    write_coords(&mut out, &instance.nodes);
    out.push_str("EOF\n");
    out
}

pub fn parse_vrp<T: Scalar>(text: &str) -> Result<VrpInstance<T>, ParseError> {
    let doc = read_document::<T>(text, Flavor::Cvrp)?;
    let eof = end_line(text);
    let name = name_of(&doc);

    let (cap_line, cap_text) =
        doc.header.get("CAPACITY").ok_or_else(|| ParseError::new(eof, ParseErrorKind::Missing("CAPACITY")))?;
    let capacity: u64 = parse_field(*cap_line, Some(cap_text.as_str()), "CAPACITY")?;
    if capacity == 0 {
        return Err(ParseError::syntax(*cap_line, "CAPACITY must be positive"));
    }
    let max_vehicles = match doc.header.get("VEHICLES") {
        Some((l, v)) => {
            let k: u32 = parse_field(*l, Some(v.as_str()), "VEHICLES")?;
            if k == 0 {
                return Err(ParseError::syntax(*l, "VEHICLES must be positive"));
            }
            Some(k)
        }
        None => None,
    };

    let (coord_line, nodes) = doc.coords.expect("checked in read_document");
    let (demand_line, demand_rows) =
        doc.demands.ok_or_else(|| ParseError::new(eof, ParseErrorKind::Missing("DEMAND_SECTION")))?;
    let (depot_line, depots) =
        doc.depots.ok_or_else(|| ParseError::new(eof, ParseErrorKind::Missing("DEPOT_SECTION")))?;

    let depot = match depots.as_slice() {
        [d] => *d,
        [] => return Err(ParseError::syntax(depot_line, "DEPOT_SECTION lists no depot")),
        _ => {
            return Err(ParseError::new(
                depot_line,
                ParseErrorKind::Unsupported { key: "DEPOT_SECTION".into(), value: "multiple depots".into() },
            ))
        }
    };
    if !nodes.iter().any(|n| n.id == depot) {
        return Err(ParseError::new(depot_line, InstanceError::UnknownNode(depot).into()));
    }

    let mut demands = vec![None; nodes.len()];
    for &(l, id, d) in &demand_rows {
        let idx = nodes
            .iter()
            .position(|n| n.id == id)
            .ok_or_else(|| ParseError::new(l, InstanceError::UnknownNode(id).into()))?;
        if demands[idx].replace(d).is_some() {
            return Err(ParseError::new(l, ParseErrorKind::Duplicate(format!("demand for node {id}"))));
        }
        if id == depot && d != 0 {
            return Err(ParseError::new(l, InstanceError::DepotDemand(id).into()));
        }
        if d > capacity {
            return Err(ParseError::new(l, ParseErrorKind::InfeasibleCustomer { node: id, demand: d, capacity }));
        }
    }
    // every node appears exactly once since the section has DIMENSION rows and no duplicates
    let demands: Vec<u64> = demands.into_iter().map(|d| d.unwrap_or(0)).collect();

    let blame = coord_line.max(demand_line);
    VrpInstance::new(name, depot, nodes, demands, capacity, max_vehicles).map_err(|e| ParseError::new(blame, e.into()))
}

pub fn serialize_vrp<T: Scalar>(instance: &VrpInstance<T>) -> String {
    let mut out = String::new();
    writeln!(out, "NAME: {}", instance.name).unwrap();
    out.push_str("TYPE: CVRP\n");
    writeln!(out, "DIMENSION: {}", instance.nodes.len()).unwrap();
    out.push_str("EDGE_WEIGHT_TYPE: EUC_2D\n");
    writeln!(out, "CAPACITY: {}", instance.capacity).unwrap();
    if let Some(k) = instance.max_vehicles {
        writeln!(out, "VEHICLES: {k}").unwrap();
    }
    out.push_str("NODE_COORD_SECTION\n");
    write_coords(&mut out, &instance.nodes);
    out.push_str("DEMAND_SECTION\n");
    for (n, d) in instance.nodes.iter().zip(&instance.demands) {
        writeln!(out, "{} {}", n.id, d).unwrap();
    }
    writeln!(out, "DEPOT_SECTION\n{}\n-1\nEOF", instance.depot).unwrap();
    out
}

fn write_coords<T: Scalar>(out: &mut String, nodes: &[Node<T>]) {
    for n in nodes {
        writeln!(out, "{} {} {}", n.id, n.x, n.y).unwrap();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TRIANGLE: &str =
        "NAME: t\nTYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 3 4\nEOF\n";

    const UNIT_VRP: &str = "\
NAME: unit4
TYPE: CVRP
DIMENSION: 5
EDGE_WEIGHT_TYPE: EUC_2D
CAPACITY: 2
VEHICLES: 2
NODE_COORD_SECTION
1 0 0
2 1 0
3 0 1
4 -1 0
5 0 -1
DEMAND_SECTION
1 0
2 1
3 1
4 1
5 1
DEPOT_SECTION
1
-1
EOF
";

    #[test]
    fn two_node_three_four_five() {
        let tsp: TspInstance = parse_tsp(TRIANGLE).unwrap();
        assert_eq!(tsp.len(), 2);
        assert_eq!(tsp.distance(1, 2).unwrap(), 5.0);
        assert_eq!(tsp.distance(2, 2).unwrap(), 0.0);
        assert_eq!(tsp.distance(1, 9), Err(InstanceError::UnknownNode(9)));
    }

    #[test]
    fn missing_coord_section() {
        let text = "NAME: t\nTYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\nEOF\n";
        let err = parse_tsp::<f64>(text).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Missing("NODE_COORD_SECTION"));
        assert_eq!(err.line, 5);
    }

    #[test]
    fn rejects_other_metrics_and_unknown_keys() {
        let geo = TRIANGLE.replace("EUC_2D", "GEO");
        let err = parse_tsp::<f64>(&geo).unwrap_err();
        assert_eq!(err.line, 4);
        assert!(matches!(err.kind, ParseErrorKind::Unsupported { .. }));

        let extra = TRIANGLE.replace("TYPE: TSP", "TYPE: TSP\nFOO: bar");
        assert_eq!(parse_tsp::<f64>(&extra).unwrap_err().line, 3);
    }

    #[test]
    fn short_coordinate_section() {
        let text = "TYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 1\n";
        let err = parse_tsp::<f64>(text).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Missing("node coordinate line"));
    }

    #[test]
    fn bad_coordinate_line_number() {
        let text = TRIANGLE.replace("2 3 4", "2 3 nan");
        let err = parse_tsp::<f64>(&text).unwrap_err();
        assert_eq!(err.line, 7);
    }

    #[test]
    fn unit_demand_vrp() {
        let vrp: VrpInstance = parse_vrp(UNIT_VRP).unwrap();
        assert_eq!(vrp.total_demand(), 4);
        assert_eq!(vrp.capacity(), 2);
        assert_eq!(vrp.max_vehicles(), Some(2));
        assert_eq!(vrp.depot(), 1);
        assert_eq!(vrp.customers(), vec![2, 3, 4, 5]);
        assert_eq!(vrp.min_vehicles(), 2);
    }

    #[test]
    fn infeasible_customer_at_parse() {
        let text = UNIT_VRP.replace("3 1\n4 1", "3 5\n4 1");
        let err = parse_vrp::<f64>(&text).unwrap_err();
        assert_eq!(err.line, 16);
        assert_eq!(err.kind, ParseErrorKind::InfeasibleCustomer { node: 3, demand: 5, capacity: 2 });
    }

    #[test]
    fn fleet_too_small() {
        let text = UNIT_VRP.replace("VEHICLES: 2", "VEHICLES: 1");
        let err = parse_vrp::<f64>(&text).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Instance(InstanceError::FleetTooSmall { .. })));
    }

    #[test]
    fn depot_section_validation() {
        let multi = UNIT_VRP.replace("DEPOT_SECTION\n1\n-1", "DEPOT_SECTION\n1\n2\n-1");
        assert!(matches!(parse_vrp::<f64>(&multi).unwrap_err().kind, ParseErrorKind::Unsupported { .. }));
        let unterminated = UNIT_VRP.replace("-1\nEOF\n", "");
        assert_eq!(
            parse_vrp::<f64>(&unterminated).unwrap_err().kind,
            ParseErrorKind::Missing("DEPOT_SECTION terminator -1")
        );
    }

    #[test]
    fn tsp_parser_rejects_cvrp() {
        assert!(parse_tsp::<f64>(UNIT_VRP).is_err());
    }

    #[test]
    fn content_after_eof() {
        let text = format!("{TRIANGLE}1 2 3\n");
        assert_eq!(parse_tsp::<f64>(&text).unwrap_err().line, 9);
    }

    #[test]
    fn single_precision() {
        let tsp: TspInstance<f32> = parse_tsp(TRIANGLE).unwrap();
        assert_eq!(tsp.distance(1, 2).unwrap(), 5.0f32);
    }

    fn arb_nodes(min: usize, max: usize) -> impl Strategy<Value = Vec<Node<f64>>> {
        prop::collection::btree_set(1u32..10_000, min..=max).prop_flat_map(|ids| {
            let ids: Vec<u32> = ids.into_iter().collect();
            let n = ids.len();
            prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), n)
                .prop_map(move |xy| ids.iter().zip(xy).map(|(&id, (x, y))| Node::new(id, x, y)).collect())
        })
    }

    proptest! {
        #[test]
        fn tsp_round_trip(name in "[A-Za-z0-9_-]{0,12}", nodes in arb_nodes(2, 12)) {
            let tsp = TspInstance::new(name, nodes).unwrap();
            let back: TspInstance = parse_tsp(&serialize_tsp(&tsp)).unwrap();
            prop_assert_eq!(back, tsp);
        }

        #[test]
        fn vrp_round_trip(
            name in "[A-Za-z0-9_.-]{0,12}",
            nodes in arb_nodes(2, 10),
            capacity in 1u64..20,
            seed_demands in prop::collection::vec(0u64..100, 10),
            bounded in any::<bool>(),
        ) {
            let depot = nodes[0].id;
            let mut demands: Vec<u64> = seed_demands.iter().take(nodes.len()).map(|d| d % (capacity + 1)).collect();
            demands[0] = 0;
            let total: u64 = demands.iter().sum();
            let vehicles = bounded.then(|| total.div_ceil(capacity).max(1) as u32);
            let vrp = VrpInstance::new(name, depot, nodes, demands, capacity, vehicles).unwrap();
            let back: VrpInstance = parse_vrp(&serialize_vrp(&vrp)).unwrap();
            prop_assert_eq!(back, vrp);
        }

        #[test]
        fn distance_symmetry(nodes in arb_nodes(2, 8)) {
            let tsp = TspInstance::new("s", nodes.clone()).unwrap();
            for a in &nodes {
                for b in &nodes {
                    let d = tsp.distance(a.id, b.id).unwrap();
                    prop_assert_eq!(d, tsp.distance(b.id, a.id).unwrap());
                    prop_assert!(d >= 0.0);
                    let hyp = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
                    prop_assert!((d - hyp).abs() <= 1e-12 * hyp.max(1.0));
                }
            }
        }

        #[test]
        fn parsers_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..400)) {
            let text = String::from_utf8_lossy(&bytes);
            for result in [parse_tsp::<f64>(&text).err(), parse_vrp::<f64>(&text).err()].into_iter().flatten() {
                prop_assert!(result.line >= 1);
            }
        }

        #[test]
        fn structured_garbage_never_panics(
            lines in prop::collection::vec(
                prop_oneof![
                    Just("TYPE: CVRP".to_string()),
                    Just("TYPE: TSP".to_string()),
                    Just("EDGE_WEIGHT_TYPE: EUC_2D".to_string()),
                    Just("NODE_COORD_SECTION".to_string()),
                    Just("DEMAND_SECTION".to_string()),
                    Just("DEPOT_SECTION".to_string()),
                    Just("-1".to_string()),
                    Just("EOF".to_string()),
                    (0u32..6).prop_map(|d| format!("DIMENSION: {d}")),
                    (0u32..6).prop_map(|d| format!("CAPACITY: {d}")),
                    (0u32..4, -5i32..5, -5i32..5).prop_map(|(a, b, c)| format!("{a} {b} {c}")),
                    (0u32..4, 0u32..4).prop_map(|(a, b)| format!("{a} {b}")),
                ],
                0..30,
            )
        ) {
            let text = lines.join("\n");
            if let Err(e) = parse_vrp::<f64>(&text) { prop_assert!(e.line >= 1); }
            if let Err(e) = parse_tsp::<f64>(&text) { prop_assert!(e.line >= 1); }
        }
    }
}
