use std::fmt::Write as _;

use super::{content_lines, end_line, parse_field, parse_finite, NodeId, ParseError, ParseErrorKind};
use crate::Scalar;

/// A set of routes with their reported total length.
///
/// For VRP each route excludes the depot and implicitly starts and ends
/// there. For TSP there is a single cyclic route containing every node.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteSolution<T = f64> {
    pub routes: Vec<Vec<NodeId>>,
    pub total_length: T,
}

impl<T: Scalar> RouteSolution<T> {
    pub fn new(routes: Vec<Vec<NodeId>>, total_length: T) -> Self {
        Self { routes, total_length }
    }
}

pub fn parse_routes<T: Scalar>(text: &str) -> Result<RouteSolution<T>, ParseError> {
    let mut routes = Vec::new();
    let mut length = None;
    for (line, body) in content_lines(text, None) {
        if length.is_some() {
            return Err(ParseError::syntax(line, "content after LENGTH line"));
        }
        let mut tok = body.split_whitespace();
        if body.starts_with("LENGTH") {
            tok.next();
            let v: T = parse_finite(line, tok.next(), "length")?;
            if tok.next().is_some() {
                return Err(ParseError::syntax(line, "trailing tokens after length"));
            }
            length = Some(v);
        } else {
            let route = tok.map(|t| parse_field::<NodeId>(line, Some(t), "node id")).collect::<Result<Vec<_>, _>>()?;
            routes.push(route);
        }
    }
    let total_length = length.ok_or_else(|| ParseError::new(end_line(text), ParseErrorKind::Missing("LENGTH line")))?;
    Ok(RouteSolution { routes, total_length })
}

pub fn serialize_routes<T: Scalar>(solution: &RouteSolution<T>) -> String {
    let mut out = String::new();
    for route in &solution.routes {
        let ids: Vec<String> = route.iter().map(ToString::to_string).collect();
        writeln!(out, "{}", ids.join(" ")).unwrap();
    }
    writeln!(out, "LENGTH {}", solution.total_length).unwrap();
    out
}
