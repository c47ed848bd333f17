use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{content_lines, end_line, parse_field, parse_finite, DimensionMismatch, ParseError, ParseErrorKind};
use crate::Scalar;

/// Quadratic unconstrained binary objective over `n` variables.
///
/// Stored upper-triangular: only keys `(i, j)` with `i <= j` exist and
/// missing entries are zero. The energy of `x` is
/// `offset + sum_{i<=j} q[i,j] * x_i * x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Qubo<T = f64> {
    n: usize,
    coefficients: BTreeMap<(usize, usize), T>,
    offset: T,
}

impl<T: Scalar> Qubo<T> {
    pub fn new(n: usize) -> Self {
        Self { n, coefficients: BTreeMap::new(), offset: T::zero() }
    }

    pub fn with_offset(mut self, offset: T) -> Self {
        self.offset = offset;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn set_offset(&mut self, offset: T) {
        self.offset = offset;
    }

    /// Adds `value` to the coefficient of `x_i * x_j`; order of `i`, `j` is irrelevant.
    pub fn add(&mut self, i: usize, j: usize, value: T) {
        assert!(i < self.n && j < self.n, "variable index out of range");
        let key = (i.min(j), i.max(j));
        let entry = self.coefficients.entry(key).or_insert_with(T::zero);
        *entry = *entry + value;
        if *entry == T::zero() {
            self.coefficients.remove(&key);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.coefficients.get(&(i.min(j), i.max(j))).copied().unwrap_or_else(T::zero)
    }

    /// Non-zero entries in `(i, j)` order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.coefficients.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn nnz(&self) -> usize {
        self.coefficients.len()
    }

    pub fn energy(&self, x: &[bool]) -> Result<T, DimensionMismatch> {
        if x.len() != self.n {
            return Err(DimensionMismatch { expected: self.n, got: x.len() });
        }
        let mut e = self.offset;
        for (&(i, j), &q) in &self.coefficients {
            if x[i] && x[j] {
                e = e + q;
            }
        }
        Ok(e)
    }

    /// Symmetric neighbour lists: for each variable, `(other, coefficient)`
    /// pairs for off-diagonal terms, plus the diagonal term.
    pub fn adjacency(&self) -> (Vec<T>, Vec<Vec<(usize, T)>>) {
        let mut diag = vec![T::zero(); self.n];
        let mut adj = vec![Vec::new(); self.n];
        for (i, j, q) in self.iter() {
            if i == j {
                diag[i] = q;
            } else {
                adj[i].push((j, q));
                adj[j].push((i, q));
            }
        }
        (diag, adj)
    }

    /// Smallest coefficient sum a binary assignment could reach.
    pub fn trivial_lower_bound(&self) -> T {
        self.offset + self.coefficients.values().copied().filter(|v| *v < T::zero()).sum::<T>()
    }
}

pub fn parse_qubo<T: Scalar>(text: &str) -> Result<Qubo<T>, ParseError> {
    let mut lines = content_lines(text, Some('#'));
    let (n_line, header) =
        lines.next().ok_or_else(|| ParseError::new(end_line(text), ParseErrorKind::Missing("'n <vars>' line")))?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("n") {
        return Err(ParseError::syntax(n_line, "first line must be 'n <vars>'"));
    }
    let n: usize = parse_field(n_line, tok.next(), "variable count")?;
    if tok.next().is_some() {
        return Err(ParseError::syntax(n_line, "trailing tokens after variable count"));
    }

    let mut qubo = Qubo::new(n);
    let mut seen_offset = false;
    let mut seen = std::collections::BTreeSet::new();
    for (line, body) in lines {
        let mut tok = body.split_whitespace();
        let first = tok.next().expect("content lines are non-empty");
        if first == "c" {
            if seen_offset {
                return Err(ParseError::new(line, ParseErrorKind::Duplicate("offset line".into())));
            }
            if !seen.is_empty() {
                return Err(ParseError::syntax(line, "offset line must precede coefficients"));
            }
            seen_offset = true;
            qubo.offset = parse_finite(line, tok.next(), "offset")?;
        } else {
            let i: usize = parse_field(line, Some(first), "row index")?;
            let j: usize = parse_field(line, tok.next(), "column index")?;
            let v: T = parse_finite(line, tok.next(), "coefficient")?;
            if i >= n || j >= n {
                return Err(ParseError::syntax(line, format!("index out of range for n = {n}")));
            }
            if j < i {
                return Err(ParseError::new(line, ParseErrorKind::LowerTriangleEntry { i, j }));
            }
            if !seen.insert((i, j)) {
                return Err(ParseError::new(line, ParseErrorKind::Duplicate(format!("entry ({i}, {j})"))));
            }
            if v != T::zero() {
                qubo.coefficients.insert((i, j), v);
            }
        }
        if tok.next().is_some() {
            return Err(ParseError::syntax(line, "trailing tokens"));
        }
    }
    Ok(qubo)
}

pub fn serialize_qubo<T: Scalar>(qubo: &Qubo<T>) -> String {
    let mut out = format!("n {}\nc {}\n", qubo.n, qubo.offset);
    for (i, j, v) in qubo.iter() {
        writeln!(out, "{i} {j} {v}").unwrap();
    }
    out
}
