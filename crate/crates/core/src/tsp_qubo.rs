//! One-hot TSP encoding as a QUBO, decoding of samples back into tours, and
//! an exhaustive minimiser used as an oracle.
//!
//! Variable `x[v * n + p]` is 1 when city `v` sits at tour position `p`.
//! The Hamiltonian is
//!
//! ```text
//! H = A * sum_p (1 - sum_v x[v,p])^2
//!   + A * sum_v (1 - sum_p x[v,p])^2
//!   + B * sum_{u != v} w(u,v) * sum_p x[u,p] * x[v,p+1 mod n]
//! ```
//!
//! With `A > B * n * max w` any assignment that breaks a permutation
//! constraint costs more than every valid tour.

use rayon::prelude::*;
use thiserror::Error;

use crate::classical::{SolveError, Tour};
use crate::formats::{DimensionMismatch, Geometry, NodeId, Qubo, TspInstance};
use crate::Scalar;

/// Largest variable count `exhaustive_qubo_min` enumerates.
pub const EXHAUSTIVE_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EncodingError {
    #[error("need at least 2 cities, got {0}")]
    TooFewCities(usize),
    #[error("distance weight must be positive and finite")]
    InvalidWeight,
    #[error("penalty {penalty} does not exceed the separation threshold {threshold}")]
    PenaltyTooSmall { penalty: f64, threshold: f64 },
    #[error("QUBO has {size} variables, limit is {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error(transparent)]
    Dimension(#[from] DimensionMismatch),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TspQuboEncoding<T = f64> {
    pub qubo: Qubo<T>,
    pub n: usize,
    pub penalty_a: T,
    pub weight_b: T,
    /// Node id of city slot `v`.
    pub city_order: Vec<NodeId>,
    instance: TspInstance<T>,
}

impl<T: Scalar> TspQuboEncoding<T> {
    pub fn var_index(&self, city: usize, position: usize) -> usize {
        city * self.n + position
    }

    pub fn instance(&self) -> &TspInstance<T> {
        &self.instance
    }
}

/// Smallest penalty with an integer margin over the separation bound.
pub fn default_penalty<T: Scalar>(instance: &TspInstance<T>, weight_b: T) -> T {
    let w_max = instance.distance_matrix().max_entry();
    weight_b * T::of_usize(instance.len()) * w_max + T::one()
}

pub fn encode_tsp<T: Scalar>(instance: &TspInstance<T>, weight_b: T) -> Result<TspQuboEncoding<T>, EncodingError> {
    encode_tsp_with_penalty(instance, weight_b, None)
}

/// Like [`encode_tsp`] with an explicit penalty. Penalties at or below
/// `B * n * max w` are rejected because they void the validity guarantee.
pub fn encode_tsp_with_penalty<T: Scalar>(
    instance: &TspInstance<T>,
    weight_b: T,
    penalty: Option<T>,
) -> Result<TspQuboEncoding<T>, EncodingError> {
    let n = instance.len();
    if n < 2 {
        return Err(EncodingError::TooFewCities(n));
    }
    if !(weight_b > T::zero() && weight_b.is_finite()) {
        return Err(EncodingError::InvalidWeight);
    }
    let dist = instance.distance_matrix();
    let threshold = weight_b * T::of_usize(n) * dist.max_entry();
    let a = penalty.unwrap_or_else(|| default_penalty(instance, weight_b));
    if !(a > threshold && a.is_finite()) {
        return Err(EncodingError::PenaltyTooSmall { penalty: a.as_f64(), threshold: threshold.as_f64() });
    }

    let var = |v: usize, p: usize| v * n + p;
    let two = T::lit(2.0);
    let mut qubo = Qubo::new(n * n).with_offset(two * a * T::of_usize(n));
    // x^2 = x, so each squared one-hot constraint contributes -A on the
    // diagonal and +2A for every pair sharing a position (or a city)
    for v in 0..n {
        for p in 0..n {
            qubo.add(var(v, p), var(v, p), -two * a);
        }
    }
    for p in 0..n {
        for v in 0..n {
            for u in (v + 1)..n {
                qubo.add(var(v, p), var(u, p), two * a);
            }
        }
    }
    for v in 0..n {
        for p in 0..n {
            for q in (p + 1)..n {
                qubo.add(var(v, p), var(v, q), two * a);
            }
        }
    }
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let w = weight_b * dist.get(u, v);
            for p in 0..n {
                qubo.add(var(u, p), var(v, (p + 1) % n), w);
            }
        }
    }

    Ok(TspQuboEncoding {
        qubo,
        n,
        penalty_a: a,
        weight_b,
        city_order: instance.node_ids().collect(),
        instance: instance.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintViolation {
    /// Position holds `count` cities instead of one.
    Position { position: usize, count: usize },
    /// City is placed `count` times instead of once.
    City { city: NodeId, count: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decoded<T> {
    Valid(Tour<T>),
    Invalid(Vec<ConstraintViolation>),
}

impl<T> Decoded<T> {
    pub fn tour(self) -> Option<Tour<T>> {
        match self {
            Decoded::Valid(t) => Some(t),
            Decoded::Invalid(_) => None,
        }
    }
}

/// Reads a tour from a one-hot assignment. No repair is attempted.
pub fn decode_bitstring<T: Scalar>(encoding: &TspQuboEncoding<T>, x: &[bool]) -> Result<Decoded<T>, EncodingError> {
    let n = encoding.n;
    if x.len() != n * n {
        return Err(DimensionMismatch { expected: n * n, got: x.len() }.into());
    }
    let mut violations = Vec::new();
    let mut order = Vec::with_capacity(n);
    for p in 0..n {
        let cities: Vec<usize> = (0..n).filter(|&v| x[encoding.var_index(v, p)]).collect();
        if cities.len() != 1 {
            violations.push(ConstraintViolation::Position { position: p, count: cities.len() });
        } else {
            order.push(encoding.city_order[cities[0]]);
        }
    }
    for v in 0..n {
        let count = (0..n).filter(|&p| x[encoding.var_index(v, p)]).count();
        if count != 1 {
            violations.push(ConstraintViolation::City { city: encoding.city_order[v], count });
        }
    }
    if !violations.is_empty() {
        return Ok(Decoded::Invalid(violations));
    }
    Ok(Decoded::Valid(Tour::from_order(&encoding.instance, order)?))
}

/// One-hot assignment for a tour given as node ids in visiting order.
pub fn encode_tour<T: Scalar>(encoding: &TspQuboEncoding<T>, order: &[NodeId]) -> Result<Vec<bool>, EncodingError> {
    let n = encoding.n;
    if order.len() != n {
        return Err(DimensionMismatch { expected: n, got: order.len() }.into());
    }
    let mut x = vec![false; n * n];
    for (p, id) in order.iter().enumerate() {
        let v = encoding.city_order.iter().position(|c| c == id).ok_or(SolveError::UnknownNode(*id))?;
        x[encoding.var_index(v, p)] = true;
    }
    Ok(x)
}

/// `offset + sum_{i<=j} q[i,j] x_i x_j`.
pub fn energy<T: Scalar>(qubo: &Qubo<T>, x: &[bool]) -> Result<T, DimensionMismatch> {
    qubo.energy(x)
}

/// Bit `i` of `index` is variable `i`.
pub fn bits_of(index: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| index >> i & 1 == 1).collect()
}

/// Global minimiser over all `2^n` assignments; ties go to the smallest
/// integer value of `x` (variable 0 is the least significant bit).
pub fn exhaustive_qubo_min<T: Scalar>(qubo: &Qubo<T>) -> Result<(Vec<bool>, T), EncodingError> {
    let n = qubo.num_vars();
    if n > EXHAUSTIVE_LIMIT {
        return Err(EncodingError::TooLarge { size: n, limit: EXHAUSTIVE_LIMIT });
    }
    // row-major upper triangle; summation order matches Qubo::energy
    let mut dense = vec![T::zero(); n * n];
    for (i, j, q) in qubo.iter() {
        dense[i * n + j] = q;
    }
    let evaluate = |z: u64| {
        let mut e = qubo.offset();
        let mut rest = z;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let row = &dense[i * n..(i + 1) * n];
            if row[i] != T::zero() {
                e = e + row[i];
            }
            let mut higher = rest;
            while higher != 0 {
                let j = higher.trailing_zeros() as usize;
                higher &= higher - 1;
                if row[j] != T::zero() {
                    e = e + row[j];
                }
            }
        }
        e
    };
    let better = |a: (u64, T), b: (u64, T)| if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a };

    let total = 1u64 << n;
    let chunk = 1u64 << n.min(12);
    let best = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let end = (start + chunk).min(total);
            (start..end).map(|z| (z, evaluate(z))).fold((start, T::infinity()), better)
        })
        .reduce(|| (0, T::infinity()), better);
    Ok((bits_of(best.0, n), best.1))
}
