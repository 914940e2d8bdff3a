//! Indexed hierarchies: the binary merge tree built on an MST, and its cuts.
//!
//! Node ids `0..n` are the leaves (fine regions); internal node `n + k` is
//! created by the `k`-th MST edge in `(weight, edge index)` order and sits at
//! that edge's weight. Because the order is sorted, altitudes never decrease
//! towards the root.

use std::sync::Arc;

use super::graph::first_appearance_labels;
use super::mst::Mst;
use super::union_find::UnionFind;
use crate::error::{Error, Result};
use crate::pixel::LabelMap;

/// One internal dendrogram node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    /// Index of the creating edge in the MST.
    pub edge: usize,
    pub altitude: f64,
}

#[derive(Clone, Debug)]
pub struct IndexedHierarchy {
    mst: Mst,
    merges: Vec<Merge>,
    parent: Vec<usize>,
    node_of_edge: Vec<usize>,
    area: Vec<u64>,
    leaf_order: Vec<usize>,
    leaf_range: Vec<(usize, usize)>,
    provenance: String,
    geometry: Option<Arc<LabelMap>>,
}

/// Dendrogram of `mst` with unit leaf areas.
pub fn build_dendrogram(mst: &Mst) -> IndexedHierarchy {
    IndexedHierarchy::build(mst.clone(), vec![1; mst.n_nodes()])
        .expect("leaf areas sized to the tree")
}

impl IndexedHierarchy {
    /// Kruskal-style union of the tree edges in increasing `(weight, index)`.
    pub fn build(mst: Mst, leaf_area: Vec<u64>) -> Result<Self> {
        let n = mst.n_nodes();
        if n == 0 {
            return Err(Error::Dimension("hierarchy needs at least one leaf".into()));
        }
        if leaf_area.len() != n {
            return Err(Error::Dimension(format!(
                "{} leaf areas for {n} leaves",
                leaf_area.len()
            )));
        }
        let mut uf = UnionFind::new(n);
        // node currently representing each union-find root
        let mut node_of_root: Vec<usize> = (0..n).collect();
        let mut merges = Vec::with_capacity(n.saturating_sub(1));
        let mut parent: Vec<usize> = (0..2 * n - 1).collect();
        let mut node_of_edge = vec![0; mst.edges().len()];
        let mut area = leaf_area;
        area.resize(2 * n - 1, 0);
        for e in mst.sorted_order() {
            let edge = mst.edges()[e];
            let (ra, rb) = (uf.find(edge.a), uf.find(edge.b));
            let (left, right) = (node_of_root[ra], node_of_root[rb]);
            let root = uf
                .union(ra, rb)
                .ok_or_else(|| Error::InvalidParameter("tree edges contain a cycle".into()))?;
            let node = n + merges.len();
            node_of_root[root] = node;
            parent[left] = node;
            parent[right] = node;
            area[node] = area[left] + area[right];
            node_of_edge[e] = node;
            merges.push(Merge {
                left,
                right,
                edge: e,
                altitude: edge.weight,
            });
        }
        let mut h = Self {
            mst,
            merges,
            parent,
            node_of_edge,
            area,
            leaf_order: Vec::new(),
            leaf_range: Vec::new(),
            provenance: "grad".to_string(),
            geometry: None,
        };
        h.index_leaves();
        Ok(h)
    }

    fn index_leaves(&mut self) {
        let n = self.n_leaves();
        let mut order = Vec::with_capacity(n);
        let mut range = vec![(0, 0); self.n_nodes()];
        let mut stack = vec![(self.root(), false)];
        while let Some((node, done)) = stack.pop() {
            if node < n {
                range[node] = (order.len(), order.len() + 1);
                order.push(node);
                continue;
            }
            let m = self.merges[node - n];
            if done {
                range[node] = (range[m.left].0, range[m.right].1);
            } else {
                stack.push((node, true));
                stack.push((m.right, false));
                stack.push((m.left, false));
            }
        }
        self.leaf_order = order;
        self.leaf_range = range;
    }

    /// Same tree topology with new MST edge weights; the dendrogram is rebuilt.
    pub fn reweighted(&self, weights: &[f64], provenance: String) -> Result<Self> {
        let mst = self.mst.with_weights(weights)?;
        let mut h = Self::build(mst, self.area[..self.n_leaves()].to_vec())?;
        h.provenance = provenance;
        h.geometry = self.geometry.clone();
        Ok(h)
    }

    pub fn mst(&self) -> &Mst {
        &self.mst
    }

    pub fn n_leaves(&self) -> usize {
        self.mst.n_nodes()
    }

    pub fn n_nodes(&self) -> usize {
        2 * self.n_leaves() - 1
    }

    pub fn root(&self) -> usize {
        self.n_nodes() - 1
    }

    /// Internal nodes in creation order.
    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Parent of `node`; the root is its own parent.
    pub fn parent(&self, node: usize) -> usize {
        self.parent[node]
    }

    pub fn children(&self, node: usize) -> Option<(usize, usize)> {
        let n = self.n_leaves();
        (node >= n).then(|| {
            let m = self.merges[node - n];
            (m.left, m.right)
        })
    }

    /// Formation altitude; leaves form at 0.
    pub fn altitude(&self, node: usize) -> f64 {
        let n = self.n_leaves();
        if node < n {
            0.0
        } else {
            self.merges[node - n].altitude
        }
    }

    pub fn altitudes(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.altitude).collect()
    }

    pub fn max_altitude(&self) -> f64 {
        self.merges.last().map_or(0.0, |m| m.altitude)
    }

    /// Pixel area (sum of leaf areas) of `node`.
    pub fn area(&self, node: usize) -> u64 {
        self.area[node]
    }

    pub fn leaf_areas(&self) -> &[u64] {
        &self.area[..self.n_leaves()]
    }

    /// Internal node created by MST edge `edge`.
    pub fn node_of_edge(&self, edge: usize) -> usize {
        self.node_of_edge[edge]
    }

    /// Leaves in depth-first order; every node's leaves are contiguous in it.
    pub fn leaf_order(&self) -> &[usize] {
        &self.leaf_order
    }

    /// Half-open range of `node`'s leaves within [`Self::leaf_order`].
    pub fn leaf_range(&self, node: usize) -> (usize, usize) {
        self.leaf_range[node]
    }

    pub fn leaves_of(&self, node: usize) -> &[usize] {
        let (lo, hi) = self.leaf_range[node];
        &self.leaf_order[lo..hi]
    }

    /// Whether `node` lies in the subtree of `ancestor` (inclusive).
    pub fn is_descendant(&self, node: usize, ancestor: usize) -> bool {
        let (lo, hi) = self.leaf_range[ancestor];
        let (a, b) = self.leaf_range[node];
        lo <= a && b <= hi && (node <= ancestor)
    }

    /// Lowest common ancestor of two nodes.
    pub fn lca(&self, mut x: usize, mut y: usize) -> usize {
        // Parents always have larger ids than their children.
        while x != y {
            if x < y {
                x = self.parent[x];
            } else {
                y = self.parent[y];
            }
        }
        x
    }

    /// Altitude at which two leaves first share a region (the ultrametric distance).
    pub fn merge_altitude(&self, x: usize, y: usize) -> f64 {
        self.altitude(self.lca(x, y))
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn set_provenance(&mut self, provenance: impl Into<String>) {
        self.provenance = provenance.into();
    }

    /// Fine label map the leaves refer to, needed by erosion-based measures.
    pub fn geometry(&self) -> Option<&Arc<LabelMap>> {
        self.geometry.as_ref()
    }

    pub fn with_geometry(mut self, labels: Arc<LabelMap>) -> Result<Self> {
        if labels.n_regions() != self.n_leaves() {
            return Err(Error::Dimension(format!(
                "label map has {} regions, hierarchy has {} leaves",
                labels.n_regions(),
                self.n_leaves()
            )));
        }
        let areas = labels.areas();
        if areas != self.leaf_areas() {
            return Err(Error::Dimension(
                "label map region areas differ from the hierarchy leaf areas".into(),
            ));
        }
        self.geometry = Some(labels);
        Ok(self)
    }

    /// Partition keeping the first `kept` merges of the creation order.
    pub(crate) fn prefix_partition(&self, kept: usize, param: CutParam) -> Partition {
        let n = self.n_leaves();
        let mut uf = UnionFind::new(n);
        for m in &self.merges[..kept] {
            let e = self.mst.edges()[m.edge];
            uf.union(e.a, e.b);
        }
        let (labels, n_regions) = first_appearance_labels(n, |i| uf.find(i));
        Partition {
            labels,
            n_regions,
            param,
        }
    }
}

/// Parameter that produced a [`Partition`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CutParam {
    Threshold(f64),
    Regions(usize),
    Markers(usize),
}

/// Region label of every leaf; labels are numbered by first leaf.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub labels: Vec<u32>,
    pub n_regions: usize,
    pub param: CutParam,
}

impl Partition {
    /// Whether every region of `self` lies inside one region of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.labels.len() != coarser.labels.len() {
            return false;
        }
        let mut image = vec![u32::MAX; self.n_regions];
        self.labels.iter().zip(&coarser.labels).all(|(&f, &c)| {
            let slot = &mut image[f as usize];
            if *slot == u32::MAX {
                *slot = c;
            }
            *slot == c
        })
    }

    /// Same grouping of leaves, regardless of label values.
    pub fn same_grouping(&self, other: &Partition) -> bool {
        self.n_regions == other.n_regions && self.refines(other) && other.refines(self)
    }
}

/// Removes every tree edge with altitude strictly above `lambda`.
pub fn cut_at(h: &IndexedHierarchy, lambda: f64) -> Result<Partition> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cut level {lambda} must be >= 0"
        )));
    }
    let kept = h.merges.partition_point(|m| m.altitude <= lambda);
    Ok(h.prefix_partition(kept, CutParam::Threshold(lambda)))
}

/// Removes the `k − 1` highest tree edges, leaving exactly `k` regions.
pub fn cut_to_k(h: &IndexedHierarchy, k: usize) -> Result<Partition> {
    let n = h.n_leaves();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "region count {k} outside 1..={n}"
        )));
    }
    Ok(h.prefix_partition(n - k, CutParam::Regions(k)))
}

/// Per-pixel labels of a partition of the fine regions.
pub fn partition_labelmap(p: &Partition, fine: &LabelMap) -> Result<LabelMap> {
    if p.labels.len() != fine.n_regions() {
        return Err(Error::Dimension(format!(
            "partition covers {} regions, label map has {}",
            p.labels.len(),
            fine.n_regions()
        )));
    }
    let raw: Vec<u32> = fine
        .labels()
        .iter()
        .map(|&l| p.labels[l as usize])
        .collect();
    LabelMap::normalize(fine.width(), fine.height(), &raw)
}
