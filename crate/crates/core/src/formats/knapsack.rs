use std::collections::HashSet;
use std::fmt::Write as _;

use super::{content_lines, end_line, parse_field, parse_finite, InstanceError, ParseError, ParseErrorKind};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnapsackItem<T = f64> {
    pub id: u32,
    pub weight: u64,
    pub value: T,
}

/// 0/1 knapsack with integer weights and real values.
#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackInstance<T = f64> {
    items: Vec<KnapsackItem<T>>,
    capacity: u64,
}

impl<T: Scalar> KnapsackInstance<T> {
    pub fn new(items: Vec<KnapsackItem<T>>, capacity: u64) -> Result<Self, InstanceError> {
        let mut seen = HashSet::new();
        for item in &items {
            if !seen.insert(item.id) {
                return Err(InstanceError::DuplicateItem(item.id));
            }
            if !item.value.is_finite() {
                return Err(InstanceError::NonFiniteValue(item.id));
            }
        }
        Ok(Self { items, capacity })
    }

    pub fn items(&self) -> &[KnapsackItem<T>] {
        &self.items
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn item(&self, id: u32) -> Option<&KnapsackItem<T>> {
        self.items.iter().find(|i| i.id == id)
    }
}

pub fn parse_knapsack<T: Scalar>(text: &str) -> Result<KnapsackInstance<T>, ParseError> {
    let mut lines = content_lines(text, Some('#'));
    let (cap_line, header) =
        lines.next().ok_or_else(|| ParseError::new(end_line(text), ParseErrorKind::Missing("capacity line")))?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("capacity") {
        return Err(ParseError::syntax(cap_line, "first line must be 'capacity <c>'"));
    }
    let capacity: u64 = parse_field(cap_line, tok.next(), "capacity")?;
    if tok.next().is_some() {
        return Err(ParseError::syntax(cap_line, "trailing tokens after capacity"));
    }

    let mut items: Vec<KnapsackItem<T>> = Vec::new();
    for (line, body) in lines {
        let mut tok = body.split_whitespace();
        let id: u32 = parse_field(line, tok.next(), "item id")?;
        let weight: u64 = parse_field(line, tok.next(), "weight")?;
        let value: T = parse_finite(line, tok.next(), "value")?;
        if tok.next().is_some() {
            return Err(ParseError::syntax(line, "trailing tokens after value"));
        }
        if items.iter().any(|i| i.id == id) {
            return Err(ParseError::new(line, ParseErrorKind::Duplicate(format!("item id {id}"))));
        }
        items.push(KnapsackItem { id, weight, value });
    }
    KnapsackInstance::new(items, capacity).map_err(|e| ParseError::new(end_line(text), e.into()))
}

pub fn serialize_knapsack<T: Scalar>(instance: &KnapsackInstance<T>) -> String {
    let mut out = format!("capacity {}\n", instance.capacity);
    for item in &instance.items {
        writeln!(out, "{} {} {}", item.id, item.weight, item.value).unwrap();
    }
    out
}
