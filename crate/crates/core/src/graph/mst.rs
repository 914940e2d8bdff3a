use super::graph::{Edge, Graph};
use super::union_find::UnionFind;
use crate::error::{Error, Result};

/// Minimum spanning tree of a graph.
///
/// Edges are kept in ascending order of their index in the source graph;
/// that order is the tie-break for every later sort by weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Mst {
    n_nodes: usize,
    edges: Vec<Edge>,
    source: Vec<usize>,
}

impl Mst {
    /// Wraps the edges of a spanning tree given in tie-break order.
    pub fn from_tree(n_nodes: usize, edges: Vec<Edge>) -> Result<Self> {
        let source = (0..edges.len()).collect();
        let graph = Graph::new(n_nodes, edges)?;
        if n_nodes == 0 || graph.edges().len() + 1 != n_nodes || graph.n_components() != 1 {
            return Err(Error::InvalidParameter(format!(
                "{} edges do not form a spanning tree on {n_nodes} nodes",
                graph.edges().len()
            )));
        }
        Ok(Self {
            n_nodes,
            edges: graph.edges().to_vec(),
            source,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Index in the source graph of every tree edge.
    pub fn source_indices(&self) -> &[usize] {
        &self.source
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Same tree with new edge weights.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(Error::Dimension(format!(
                "{} weights for {} tree edges",
                weights.len(),
                self.edges.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidParameter(format!("tree edge weight {w}")));
        }
        let edges = self
            .edges
            .iter()
            .zip(weights)
            .map(|(e, &weight)| Edge { weight, ..*e })
            .collect();
        Ok(Self {
            edges,
            ..self.clone()
        })
    }

    /// Tree edge indices sorted by `(weight, index)`.
    pub fn sorted_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by(|&i, &j| {
            self.edges[i]
                .weight
                .total_cmp(&self.edges[j].weight)
                .then(i.cmp(&j))
        });
        order
    }
}

fn edge_less(edges: &[Edge], i: usize, j: usize) -> bool {
    edges[i]
        .weight
        .total_cmp(&edges[j].weight)
        .then(i.cmp(&j))
        .is_lt()
}

fn collect(graph: &Graph, mut chosen: Vec<usize>) -> Mst {
    chosen.sort_unstable();
    Mst {
        n_nodes: graph.n_nodes(),
        edges: chosen.iter().map(|&i| graph.edges()[i]).collect(),
        source: chosen,
    }
}

/// Borůvka's algorithm. Weights are compared as `(weight, edge index)`, so
/// the tree is unique and coincides with [`kruskal_mst`].
pub fn minimum_spanning_tree(graph: &Graph) -> Result<Mst> {
    let n = graph.n_nodes();
    let edges = graph.edges();
    let mut uf = UnionFind::new(n);
    let mut chosen = Vec::with_capacity(n.saturating_sub(1));
    let mut components = n;
    let mut cheapest = vec![usize::MAX; n];
    while components > 1 {
        cheapest.iter_mut().for_each(|c| *c = usize::MAX);
        for (i, e) in edges.iter().enumerate() {
            let (ra, rb) = (uf.find(e.a), uf.find(e.b));
            if ra == rb {
                continue;
            }
            for r in [ra, rb] {
                if cheapest[r] == usize::MAX || edge_less(edges, i, cheapest[r]) {
                    cheapest[r] = i;
                }
            }
        }
        let mut progressed = false;
        for &i in &cheapest {
            if i != usize::MAX && uf.union(edges[i].a, edges[i].b).is_some() {
                chosen.push(i);
                components -= 1;
                progressed = true;
            }
        }
        if !progressed {
            return Err(Error::Disconnected { components });
        }
    }
    Ok(collect(graph, chosen))
}

/// Kruskal's algorithm with the same `(weight, edge index)` order.
pub fn kruskal_mst(graph: &Graph) -> Result<Mst> {
    let edges = graph.edges();
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&i, &j| edges[i].weight.total_cmp(&edges[j].weight).then(i.cmp(&j)));
    let mut uf = UnionFind::new(graph.n_nodes());
    let chosen: Vec<usize> = order
        .into_iter()
        .filter(|&i| uf.union(edges[i].a, edges[i].b).is_some())
        .collect();
    if chosen.len() + 1 != graph.n_nodes() {
        return Err(Error::Disconnected {
            components: graph.n_nodes() - chosen.len(),
        });
    }
    Ok(collect(graph, chosen))
}
