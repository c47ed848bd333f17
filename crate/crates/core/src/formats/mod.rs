//! Text formats for instances and solutions.
//!
//! * TSP / CVRP: a strict subset of TSPLIB (`EDGE_WEIGHT_TYPE: EUC_2D` only).
//!   Distances are exact Euclidean reals, never rounded to integers.
//! * Knapsack: `capacity <c>` followed by `<id> <weight> <value>` lines.
//! * QUBO: `n <vars>`, optional `c <offset>`, then `<i> <j> <coeff>` lines
//!   with `i <= j`.
//! * Routes: one route per line (node ids, depot omitted), then `LENGTH <real>`.
//!
//! `#` starts a comment in the knapsack and QUBO formats.

mod geometry;
mod knapsack;
mod qubo;
mod routes;
mod tsplib;

pub use geometry::{distance, DistanceMatrix, Geometry, Node, NodeId};
pub use knapsack::{parse_knapsack, serialize_knapsack, KnapsackInstance, KnapsackItem};
pub use qubo::{parse_qubo, serialize_qubo, Qubo};
pub use routes::{parse_routes, serialize_routes, RouteSolution};
pub use tsplib::{parse_tsp, parse_vrp, serialize_tsp, serialize_vrp, TspInstance, VrpInstance};

use thiserror::Error;

/// Failure to parse a text document. `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("duplicate {0}")]
    Duplicate(String),
    #[error("unsupported {key}: {value}")]
    Unsupported { key: String, value: String },
    #[error("lower-triangle entry ({i}, {j}); QUBO entries must satisfy i <= j")]
    LowerTriangleEntry { i: usize, j: usize },
    #[error("infeasible customer {node}: demand {demand} exceeds capacity {capacity}")]
    InfeasibleCustomer { node: NodeId, demand: u64, capacity: u64 },
    #[error("invalid instance: {0}")]
    Instance(#[from] InstanceError),
}

impl ParseError {
    pub(crate) fn new(line: usize, kind: ParseErrorKind) -> Self {
        Self { line, kind }
    }

    pub(crate) fn syntax(line: usize, reason: impl Into<String>) -> Self {
        Self::new(line, ParseErrorKind::Syntax(reason.into()))
    }
}

/// Structural invariant violations when building an instance in memory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("need at least {min} nodes, got {got}")]
    TooFewNodes { min: usize, got: usize },
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
    #[error("node {0} has a non-finite coordinate")]
    NonFinite(NodeId),
    #[error("depot {0} must have zero demand")]
    DepotDemand(NodeId),
    #[error("customer {node} demand {demand} exceeds capacity {capacity}")]
    DemandExceedsCapacity { node: NodeId, demand: u64, capacity: u64 },
    #[error("total demand {total} exceeds fleet capacity {vehicles} x {capacity}")]
    FleetTooSmall { total: u64, vehicles: u32, capacity: u64 },
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("demand vector length {got} does not match node count {expected}")]
    DemandLength { expected: usize, got: usize },
    #[error("duplicate item id {0}")]
    DuplicateItem(u32),
    #[error("item {0} has a non-finite value")]
    NonFiniteValue(u32),
}

/// Bit vector of the wrong length for a QUBO or encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("expected {expected} variables, got {got}")]
pub struct DimensionMismatch {
    pub expected: usize,
    pub got: usize,
}

/// Non-blank lines with comments stripped, paired with their 1-based number.
pub(crate) fn content_lines(text: &str, comment: Option<char>) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(move |(i, raw)| {
        let body = match comment.and_then(|c| raw.find(c)) {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let body = body.trim();
        (!body.is_empty()).then_some((i + 1, body))
    })
}

/// Line number to blame for an error detected after the last line.
pub(crate) fn end_line(text: &str) -> usize {
    text.lines().count().max(1)
}

pub(crate) fn parse_field<F: std::str::FromStr>(line: usize, token: Option<&str>, what: &str) -> Result<F, ParseError> {
    let token = token.ok_or_else(|| ParseError::syntax(line, format!("expected {what}")))?;
    token.parse().map_err(|_| ParseError::syntax(line, format!("invalid {what} '{token}'")))
}

pub(crate) fn parse_finite<T: crate::Scalar>(line: usize, token: Option<&str>, what: &str) -> Result<T, ParseError> {
    let value: T = parse_field(line, token, what)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ParseError::syntax(line, format!("{what} must be finite")))
    }
}
