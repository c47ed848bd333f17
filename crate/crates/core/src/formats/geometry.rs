use crate::formats::InstanceError;
use crate::Scalar;

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node<T> {
    pub id: NodeId,
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Node<T> {
    pub fn new(id: NodeId, x: T, y: T) -> Self {
        Self { id, x, y }
    }

    /// Exact Euclidean distance. Symmetric bit-for-bit.
    pub fn distance_to(&self, other: &Node<T>) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Anything that owns a list of planar nodes.
pub trait Geometry<T: Scalar> {
    fn nodes(&self) -> &[Node<T>];

    fn index_of(&self, id: NodeId) -> Option<usize> {
        self.nodes().iter().position(|n| n.id == id)
    }

    fn node(&self, id: NodeId) -> Result<&Node<T>, InstanceError> {
        self.nodes().iter().find(|n| n.id == id).ok_or(InstanceError::UnknownNode(id))
    }

    fn distance(&self, u: NodeId, v: NodeId) -> Result<T, InstanceError> {
        Ok(self.node(u)?.distance_to(self.node(v)?))
    }

    fn distance_matrix(&self) -> DistanceMatrix<T> {
        DistanceMatrix::from_nodes(self.nodes())
    }

    /// Largest pairwise distance.
    fn diameter(&self) -> T {
        let nodes = self.nodes();
        let mut best = T::zero();
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                best = best.max(a.distance_to(b));
            }
        }
        best
    }
}

/// Euclidean distance between two nodes of an instance.
pub fn distance<T: Scalar, G: Geometry<T> + ?Sized>(instance: &G, u: NodeId, v: NodeId) -> Result<T, InstanceError> {
    instance.distance(u, v)
}

/// Dense symmetric distance table indexed by node position.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DistanceMatrix<T> {
    pub fn from_nodes(nodes: &[Node<T>]) -> Self {
        let n = nodes.len();
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = nodes[i].distance_to(&nodes[j]);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from explicit rows. Used by tests and synthetic encodings.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = if i == j { T::zero() } else { f(i, j) };
            }
        }
        Self { n, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn max_entry(&self) -> T {
        self.data.iter().copied().fold(T::zero(), T::max)
    }

    /// Length of the closed tour visiting `order` (positions) cyclically.
    pub fn cycle_length(&self, order: &[usize]) -> T {
        match order.len() {
            0 | 1 => T::zero(),
            len => (0..len).map(|k| self.get(order[k], order[(k + 1) % len])).sum(),
        }
    }
}
