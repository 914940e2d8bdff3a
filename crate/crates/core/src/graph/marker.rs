//! Marker-based segmentation: the minimum spanning forest rooted in markers.
//!
//! Tree edges are scanned in increasing `(weight, index)` order. Two
//! components are joined unless both already hold a marker, in which case the
//! edge is cut. Any edge scanned that way is the highest edge on the tree path
//! between some pair of markers.

use super::graph::first_appearance_labels;
use super::hierarchy::{CutParam, Partition};
use super::mst::Mst;
use super::union_find::UnionFind;
use crate::error::{Error, Result};

/// Segments `mst` from the given marker leaves.
pub fn marker_segmentation(mst: &Mst, markers: &[usize]) -> Result<Partition> {
    if markers.is_empty() {
        return Err(Error::InvalidParameter("marker set is empty".into()));
    }
    let n = mst.n_nodes();
    if let Some(&m) = markers.iter().find(|&&m| m >= n) {
        return Err(Error::InvalidParameter(format!(
            "marker {m} is not a leaf id (0..{n})"
        )));
    }
    let order = mst.sorted_order();
    let mut forest = LeveledForest::default();
    let activations: Vec<(usize, usize)> = markers.iter().map(|&m| (m, 0)).collect();
    let mut cut = vec![false; mst.edges().len()];
    forest.run(mst, &order, &activations, &mut cut);

    let mut uf = UnionFind::new(n);
    for (e, edge) in mst.edges().iter().enumerate() {
        if !cut[e] {
            uf.union(edge.a, edge.b);
        }
    }
    let (labels, n_regions) = first_appearance_labels(n, |i| uf.find(i));
    Ok(Partition {
        labels,
        n_regions,
        param: CutParam::Markers(markers.len()),
    })
}

/// Reusable scratch space for marker forests whose markers switch on at a
/// given position of the merge order.
#[derive(Debug, Default)]
pub(crate) struct LeveledForest {
    uf: Option<UnionFind>,
    active_from: Vec<usize>,
}

impl LeveledForest {
    /// `markers` holds `(leaf, rank)` pairs: the marker counts for edges at
    /// position `>= rank` in `order`. Marks `cut[e]` for every cut tree edge;
    /// other entries are left false.
    pub(crate) fn run(
        &mut self,
        mst: &Mst,
        order: &[usize],
        markers: &[(usize, usize)],
        cut: &mut [bool],
    ) {
        let n = mst.n_nodes();
        let uf = self.uf.get_or_insert_with(|| UnionFind::new(n));
        uf.reset(n);
        self.active_from.clear();
        self.active_from.resize(n, usize::MAX);
        for &(leaf, rank) in markers {
            let slot = &mut self.active_from[leaf];
            *slot = (*slot).min(rank);
        }
        cut.iter_mut().for_each(|c| *c = false);
        for (rank, &e) in order.iter().enumerate() {
            let edge = mst.edges()[e];
            let (ra, rb) = (uf.find(edge.a), uf.find(edge.b));
            let (fa, fb) = (self.active_from[ra], self.active_from[rb]);
            if fa <= rank && fb <= rank {
                cut[e] = true;
                continue;
            }
            let root = uf
                .union(ra, rb)
                .expect("tree edges join distinct components");
            self.active_from[root] = fa.min(fb);
        }
    }
}
