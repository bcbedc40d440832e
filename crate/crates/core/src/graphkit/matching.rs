use petgraph::algo::maximum_matching;
use petgraph::graph::UnGraph;

use super::{Edge, Topology};

/// Set of node-disjoint edges of a topology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    n: usize,
    edges: Vec<Edge>,
}

impl Matching {
    /// Edges in lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_perfect(&self) -> bool {
        2 * self.edges.len() == self.n
    }
}

/// Maximum-cardinality matching (Gabow's blossom algorithm, via petgraph).
pub fn max_matching(t: &Topology) -> Matching {
    let g = UnGraph::<(), ()>::from_edges(t.edges().map(|e| (e.u() as u32, e.v() as u32)));
    let mut edges: Vec<Edge> = maximum_matching(&g)
        .edges()
        .map(|(a, b)| Edge::new(a.index(), b.index()))
        .collect();
    edges.sort_unstable();
    Matching { n: t.n(), edges }
}
