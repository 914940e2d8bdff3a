//! Cluster measures on dendrogram nodes.

use super::model::MeasureKind;
use crate::error::{Error, Result};
use crate::graph::IndexedHierarchy;
use crate::pixel::{erode, BinaryMask, StructuringElement};

/// Measure of every dendrogram node, evaluated when the node merges into its
/// parent (the root is evaluated at its own altitude).
///
/// Volume follows the lake recursion: a leaf forms at altitude 0, and a
/// cluster holds the volumes of its children at its formation altitude plus
/// its area times the rise up to the evaluation altitude.
pub fn cluster_measure(h: &IndexedHierarchy, kind: MeasureKind) -> Result<Vec<f64>> {
    let n_nodes = h.n_nodes();
    let eroded = match kind.erosion() {
        Some(se) => Some(eroded_node_areas(h, se)?),
        None => None,
    };
    let base = |node: usize| match &eroded {
        Some(e) => e[node] as f64,
        None => h.area(node) as f64,
    };
    if !kind.is_volumic() {
        return Ok((0..n_nodes).map(base).collect());
    }

    let n = h.n_leaves();
    let level_at_merge = |node: usize| h.altitude(h.parent(node));
    let mut internal = vec![0.0f64; n_nodes];
    for (k, m) in h.merges().iter().enumerate() {
        let node = n + k;
        internal[node] = [m.left, m.right]
            .iter()
            .map(|&c| internal[c] + h.area(c) as f64 * (m.altitude - h.altitude(c)))
            .sum();
    }
    Ok((0..n_nodes)
        .map(|node| {
            let volume =
                internal[node] + h.area(node) as f64 * (level_at_merge(node) - h.altitude(node));
            match &eroded {
                Some(_) => volume * base(node) / h.area(node) as f64,
                None => volume,
            }
        })
        .collect())
}

/// Eroded pixel area of every dendrogram node, recomputed exactly from the
/// node's pixel mask.
pub fn eroded_node_areas(h: &IndexedHierarchy, se: StructuringElement) -> Result<Vec<u64>> {
    let mut areas = vec![0u64; h.n_nodes()];
    for_each_eroded_node(h, se, |node, _, eroded| {
        areas[node] = eroded.area();
    })?;
    Ok(areas)
}

/// For every pixel, the lowest dendrogram node whose eroded mask contains it
/// (`u32::MAX` if none). Erosion is increasing, so the pixel also survives
/// erosion of every ancestor of that node.
pub(crate) fn lowest_eroded_node(h: &IndexedHierarchy, se: StructuringElement) -> Result<Vec<u32>> {
    let labels = h.geometry().ok_or(Error::MissingGeometry)?;
    let width = labels.width();
    let mut lowest = vec![u32::MAX; labels.labels().len()];
    // Nodes are visited in increasing id, i.e. children before parents.
    for_each_eroded_node(h, se, |node, bbox, eroded| {
        for y in 0..eroded.height() {
            for x in 0..eroded.width() {
                if eroded.data()[y * eroded.width() + x] {
                    let p = (bbox[1] + y) * width + bbox[0] + x;
                    if lowest[p] == u32::MAX {
                        lowest[p] = node as u32;
                    }
                }
            }
        }
    })?;
    Ok(lowest)
}

/// Calls `f(node, bbox, eroded_mask)` for every node in increasing id. The
/// mask covers the node's bounding box `[x0, y0, x1, y1]` (inclusive).
fn for_each_eroded_node(
    h: &IndexedHierarchy,
    se: StructuringElement,
    mut f: impl FnMut(usize, [usize; 4], &BinaryMask),
) -> Result<()> {
    se.validate()?;
    let labels = h.geometry().ok_or(Error::MissingGeometry)?;
    let n = h.n_leaves();
    let width = labels.width();
    let mut position = vec![0usize; n];
    for (i, &leaf) in h.leaf_order().iter().enumerate() {
        position[leaf] = i;
    }
    let mut boxes = labels.bounding_boxes();
    boxes.resize(h.n_nodes(), [0; 4]);
    for (k, m) in h.merges().iter().enumerate() {
        let (a, b) = (boxes[m.left], boxes[m.right]);
        boxes[n + k] = [
            a[0].min(b[0]),
            a[1].min(b[1]),
            a[2].max(b[2]),
            a[3].max(b[3]),
        ];
    }
    let lab = labels.labels();
    for (node, bbox) in boxes.iter().enumerate() {
        let (lo, hi) = h.leaf_range(node);
        let (bw, bh) = (bbox[2] - bbox[0] + 1, bbox[3] - bbox[1] + 1);
        let mask = BinaryMask::from_fn(bw, bh, |x, y| {
            let pos = position[lab[(bbox[1] + y) * width + bbox[0] + x] as usize];
            lo <= pos && pos < hi
        });
        f(node, *bbox, &erode(&mask, se));
    }
    Ok(())
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::graph::{build_dendrogram, Edge, IndexedHierarchy, Mst};
    use crate::pixel::{eroded_area, LabelMap};
    use std::sync::Arc;

    fn two_leaves(alt: f64) -> IndexedHierarchy {
        build_dendrogram(&Mst::from_tree(2, vec![Edge::new(0, 1, alt)]).unwrap())
    }

    #[test]
    fn unit_leaves_volume_at_merge() {
        let h = two_leaves(2.0);
        let v = cluster_measure(&h, MeasureKind::Volume).unwrap();
        assert_eq!(&v[..2], &[2.0, 2.0]);
    }

    #[test]
    fn root_surface_is_total_area() {
        let mst = Mst::from_tree(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 3.0)]).unwrap();
        let h = IndexedHierarchy::build(mst, vec![4, 5, 6]).unwrap();
        let s = cluster_measure(&h, MeasureKind::Surface).unwrap();
        assert_eq!(s[h.root()], 15.0);
    }

    /// Per-level accumulation: between consecutive altitudes of the node's
    /// ancestor chain, every pixel of the current cluster adds `area × rise`.
    fn volume_by_levels(h: &IndexedHierarchy, node: usize) -> f64 {
        let target = h.altitude(h.parent(node));
        let mut total = 0.0;
        for leaf in h.leaves_of(node) {
            let mut cur = *leaf;
            let mut level = 0.0;
            loop {
                let next = if cur == node {
                    target
                } else {
                    h.altitude(h.parent(cur))
                };
                total += h.area(*leaf) as f64 * (next - level);
                level = next;
                if cur == node {
                    break;
                }
                cur = h.parent(cur);
            }
        }
        total
    }

    #[test]
    fn volume_matches_level_integration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let n = rng.random_range(2..15);
            let edges = (1..n)
                .map(|i| Edge::new(rng.random_range(0..i), i, rng.random_range(0.0..10.0)))
                .collect();
            let areas = (0..n).map(|_| rng.random_range(1..20)).collect();
            let h = IndexedHierarchy::build(Mst::from_tree(n, edges).unwrap(), areas).unwrap();
            let v = cluster_measure(&h, MeasureKind::Volume).unwrap();
            for node in 0..h.n_nodes() {
                let expected = volume_by_levels(&h, node);
                assert!((v[node] - expected).abs() <= 1e-9 * expected.max(1.0));
            }
        }
    }

    fn striped() -> IndexedHierarchy {
        // Three vertical stripes of width 3, 4, 5 on a 12x6 image.
        let raw: Vec<u32> = (0..72)
            .map(|p| match p % 12 {
                0..=2 => 0,
                3..=6 => 1,
                _ => 2,
            })
            .collect();
        let labels = Arc::new(LabelMap::new(12, 6, raw).unwrap());
        let mst = Mst::from_tree(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0)]).unwrap();
        IndexedHierarchy::build(mst, labels.areas())
            .unwrap()
            .with_geometry(labels)
            .unwrap()
    }

    #[test]
    fn eroded_areas_match_direct_masks() {
        let h = striped();
        let labels = h.geometry().unwrap().clone();
        for se in [
            StructuringElement::Disk(1),
            StructuringElement::HSeg(4),
            StructuringElement::VSeg(5),
        ] {
            let areas = eroded_node_areas(&h, se).unwrap();
            for node in 0..h.n_nodes() {
                let leaves = h.leaves_of(node).to_vec();
                let mask = BinaryMask::from_fn(12, 6, |x, y| {
                    leaves.contains(&(labels.get(x, y) as usize))
                });
                assert_eq!(areas[node], eroded_area(&mask, se), "{se} node {node}");
            }
        }
    }

    #[test]
    fn disk_zero_reproduces_surface() {
        let h = striped();
        let plain = cluster_measure(&h, MeasureKind::Surface).unwrap();
        let eroded =
            cluster_measure(&h, MeasureKind::ErodedSurface(StructuringElement::Disk(0))).unwrap();
        assert_eq!(plain, eroded);
        let vol = cluster_measure(&h, MeasureKind::Volume).unwrap();
        let evol =
            cluster_measure(&h, MeasureKind::ErodedVolume(StructuringElement::Disk(0))).unwrap();
        assert_eq!(vol, evol);
    }

    #[test]
    fn lowest_node_increments_sum_to_eroded_area() {
        let h = striped();
        let se = StructuringElement::HSeg(4);
        let lowest = lowest_eroded_node(&h, se).unwrap();
        let areas = eroded_node_areas(&h, se).unwrap();
        for node in 0..h.n_nodes() {
            let count = lowest
                .iter()
                .filter(|&&l| l != u32::MAX && h.is_descendant(l as usize, node))
                .count() as u64;
            assert_eq!(count, areas[node]);
        }
    }

    #[test]
    fn erosion_needs_geometry() {
        let h = two_leaves(1.0);
        assert!(matches!(
            cluster_measure(&h, MeasureKind::ErodedSurface(StructuringElement::Disk(1))),
            Err(Error::MissingGeometry)
        ));
    }
}
