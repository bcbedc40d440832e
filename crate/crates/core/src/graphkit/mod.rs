//! Communication graphs and their weight matrices.

mod generate;
mod matching;
mod operated;
mod weights;

pub use generate::{gen_degree_sequence, gen_regular, DEFAULT_RESAMPLE_BUDGET};
pub use matching::{max_matching, Matching};
pub use operated::{apply_malicious, OperatedWeights};
pub use weights::{reweigh, uniform_weights, WeightMatrix, SINKHORN_MAX_ITER};

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{invalid, Error, Result};

/// Undirected edge, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    u: usize,
    v: usize,
}

impl Edge {
    /// Normalizes the endpoint order. Panics on a self-pair.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "self-pair ({a}, {a}) is not an edge");
        Edge {
            u: a.min(b),
            v: a.max(b),
        }
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn touches(&self, node: usize) -> bool {
        self.u == node || self.v == node
    }
}

impl fmt::Display for Edge {
    // 1-based, as in the edge-list format
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u + 1, self.v + 1)
    }
}

/// Undirected simple graph on nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    n: usize,
    edges: BTreeSet<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl Topology {
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut edges = BTreeSet::new();
        for (a, b) in pairs {
            if a >= n || b >= n {
                return Err(invalid(format!(
                    "edge ({}, {}) has an endpoint outside 1..{n}",
                    a + 1,
                    b + 1
                )));
            }
            if a == b {
                return Err(invalid(format!("self-loop at node {}", a + 1)));
            }
            if !edges.insert(Edge::new(a, b)) {
                return Err(invalid(format!("duplicate edge {}", Edge::new(a, b))));
            }
        }
        Ok(Self::from_edge_set(n, edges))
    }

    fn from_edge_set(n: usize, edges: BTreeSet<Edge>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            adjacency[e.u].push(e.v);
            adjacency[e.v].push(e.u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Topology {
            n,
            edges,
            adjacency,
        }
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
    }

    /// Star `K_{1,leaves}` with hub 0.
    pub fn star(leaves: usize) -> Self {
        Self::new(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("star is simple")
    }

    pub fn complete(n: usize) -> Self {
        Self::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).expect("simple")
    }

    /// The Petersen graph: outer 5-cycle 0..5, inner pentagram 5..10.
    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        Self::new(10, outer.chain(spokes).chain(inner)).expect("petersen is simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    /// `Some(delta)` when every node has degree `delta`.
    pub fn regular_degree(&self) -> Option<usize> {
        let first = self.adjacency.first()?.len();
        self.adjacency
            .iter()
            .all(|a| a.len() == first)
            .then_some(first)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for &j in &self.adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == self.n
    }

    /// Copy of the topology without `removed`.
    pub fn remove_edges(&self, removed: &[Edge]) -> Result<Topology> {
        let mut edges = self.edges.clone();
        for e in removed {
            if !edges.remove(e) {
                return Err(Error::UnknownEdge(*e));
            }
        }
        Ok(Self::from_edge_set(self.n, edges))
    }
}
