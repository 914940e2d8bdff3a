use std::collections::HashSet;

use super::union_find::UnionFind;
use crate::error::{Error, Result};

/// Undirected weighted edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

impl Edge {
    pub fn new(a: usize, b: usize, weight: f64) -> Self {
        Self { a, b, weight }
    }
}

/// Edge-weighted undirected graph. Edge indices are positions in `edges()`
/// and break every weight tie.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n_nodes: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(n_nodes: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.a >= n_nodes || e.b >= n_nodes {
                return Err(Error::InvalidParameter(format!(
                    "edge ({}, {}) references a node outside 0..{n_nodes}",
                    e.a, e.b
                )));
            }
            if e.a == e.b {
                return Err(Error::InvalidParameter(format!(
                    "self-edge on node {}",
                    e.a
                )));
            }
            if !e.weight.is_finite() || e.weight < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "edge ({}, {}) has weight {}",
                    e.a, e.b, e.weight
                )));
            }
            if !seen.insert((e.a.min(e.b), e.a.max(e.b))) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate edge ({}, {})",
                    e.a, e.b
                )));
            }
        }
        Ok(Self { n_nodes, edges })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_components(&self) -> usize {
        let mut uf = UnionFind::new(self.n_nodes);
        let merged = self
            .edges
            .iter()
            .filter(|e| uf.union(e.a, e.b).is_some())
            .count();
        self.n_nodes - merged
    }

    /// Connected components of the subgraph keeping edges with weight `<= lambda`,
    /// labeled by order of first node.
    pub fn threshold_components(&self, lambda: f64) -> Vec<u32> {
        let mut uf = UnionFind::new(self.n_nodes);
        for e in self.edges.iter().filter(|e| e.weight <= lambda) {
            uf.union(e.a, e.b);
        }
        first_appearance_labels(self.n_nodes, |i| uf.find(i)).0
    }
}

/// Relabels `root_of(i)` classes to `0..` in order of first appearance.
pub(crate) fn first_appearance_labels(
    n: usize,
    mut root_of: impl FnMut(usize) -> usize,
) -> (Vec<u32>, usize) {
    let mut map = vec![u32::MAX; n];
    let mut labels = Vec::with_capacity(n);
    let mut next = 0u32;
    for i in 0..n {
        let r = root_of(i);
        if map[r] == u32::MAX {
            map[r] = next;
            next += 1;
        }
        labels.push(map[r]);
    }
    (labels, next as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_edges() {
        assert!(Graph::new(2, vec![Edge::new(0, 0, 1.0)]).is_err());
        assert!(Graph::new(2, vec![Edge::new(0, 2, 1.0)]).is_err());
        assert!(Graph::new(2, vec![Edge::new(0, 1, -1.0)]).is_err());
        assert!(Graph::new(2, vec![Edge::new(0, 1, 1.0), Edge::new(1, 0, 2.0)]).is_err());
    }

    #[test]
    fn components() {
        let g = Graph::new(4, vec![Edge::new(0, 1, 1.0), Edge::new(2, 3, 5.0)]).unwrap();
        assert_eq!(g.n_components(), 2);
        assert_eq!(g.threshold_components(2.0), vec![0, 0, 1, 2]);
    }
}
