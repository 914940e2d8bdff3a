use std::collections::BTreeMap;

use super::graph::{Edge, Graph};
use crate::error::{Error, Result};
use crate::pixel::{check_same_dims, Image, LabelMap, ScalarField};

/// How the dissimilarity between two adjacent regions is computed from the
/// relief along their shared boundary. Each straddling pixel pair contributes
/// the higher of its two relief values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dissimilarity {
    /// Lowest pair value along the boundary: the level at which the two
    /// basins' floods meet.
    #[default]
    PassValue,
    /// Mean pair value along the boundary.
    MeanBoundary,
}

/// Accumulated image statistics of one region.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RegionStats {
    pub area: u64,
    pub sum: [f64; 3],
    pub sum_sq: [f64; 3],
}

impl RegionStats {
    pub fn merge(&mut self, other: &RegionStats) {
        self.area += other.area;
        for c in 0..3 {
            self.sum[c] += other.sum[c];
            self.sum_sq[c] += other.sum_sq[c];
        }
    }

    /// Total variance `Σ_p Σ_c (I_c(p) − μ_c)²` over the first `channels` channels.
    pub fn total_variance(&self, channels: usize) -> f64 {
        if self.area == 0 {
            return 0.0;
        }
        let n = self.area as f64;
        (0..channels)
            .map(|c| (self.sum_sq[c] - self.sum[c] * self.sum[c] / n).max(0.0))
            .sum()
    }

    /// Mean of the unweighted channel average.
    pub fn mean_luminance(&self, channels: usize) -> f64 {
        if self.area == 0 {
            return 0.0;
        }
        self.sum[..channels].iter().sum::<f64>() / (channels as f64 * self.area as f64)
    }
}

/// Region adjacency graph of a fine partition.
///
/// Edges are sorted by `(a, b)` with `a < b`; `boundary[i]` counts the
/// 4-adjacent pixel pairs straddling edge `i`.
#[derive(Clone, Debug)]
pub struct Rag {
    graph: Graph,
    regions: Vec<RegionStats>,
    boundary: Vec<u64>,
    channels: usize,
}

impl Rag {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n_nodes(&self) -> usize {
        self.graph.n_nodes()
    }

    pub fn edges(&self) -> &[Edge] {
        self.graph.edges()
    }

    pub fn regions(&self) -> &[RegionStats] {
        &self.regions
    }

    pub fn boundary(&self) -> &[u64] {
        &self.boundary
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn areas(&self) -> Vec<u64> {
        self.regions.iter().map(|r| r.area).collect()
    }
}

/// Builds the region adjacency graph with the default pass-value dissimilarity.
pub fn build_rag(img: &Image, labels: &LabelMap, relief: &ScalarField) -> Result<Rag> {
    build_rag_with(img, labels, relief, Dissimilarity::PassValue)
}

pub fn build_rag_with(
    img: &Image,
    labels: &LabelMap,
    relief: &ScalarField,
    dissimilarity: Dissimilarity,
) -> Result<Rag> {
    let dims = (img.width(), img.height());
    check_same_dims("image vs labels", dims, (labels.width(), labels.height()))?;
    check_same_dims("image vs relief", dims, (relief.width(), relief.height()))?;
    let (w, h) = dims;
    let channels = img.channels();
    let lab = labels.labels();
    let rel = relief.values();

    let mut regions = vec![RegionStats::default(); labels.n_regions()];
    for (p, &l) in lab.iter().enumerate() {
        let stats = &mut regions[l as usize];
        stats.area += 1;
        for (c, &v) in img.pixel(p).iter().enumerate() {
            stats.sum[c] += v;
            stats.sum_sq[c] += v * v;
        }
    }

    // (a, b) -> (min pair value, sum of pair values, pair count)
    let mut acc: BTreeMap<(u32, u32), (f64, f64, u64)> = BTreeMap::new();
    let mut visit = |p: usize, q: usize| {
        let (lp, lq) = (lab[p], lab[q]);
        if lp == lq {
            return;
        }
        let key = (lp.min(lq), lp.max(lq));
        let v = rel[p].max(rel[q]);
        let e = acc.entry(key).or_insert((f64::INFINITY, 0.0, 0));
        e.0 = e.0.min(v);
        e.1 += v;
        e.2 += 1;
    };
    for y in 0..h {
        for x in 0..w {
            let p = y * w + x;
            if x + 1 < w {
                visit(p, p + 1);
            }
            if y + 1 < h {
                visit(p, p + w);
            }
        }
    }

    let mut edges = Vec::with_capacity(acc.len());
    let mut boundary = Vec::with_capacity(acc.len());
    for ((a, b), (min, sum, count)) in acc {
        let weight = match dissimilarity {
            Dissimilarity::PassValue => min,
            Dissimilarity::MeanBoundary => sum / count as f64,
        };
        edges.push(Edge::new(a as usize, b as usize, weight));
        boundary.push(count);
    }
    let graph = Graph::new(labels.n_regions(), edges)?;
    let components = graph.n_components();
    if components != 1 {
        return Err(Error::Disconnected { components });
    }
    Ok(Rag {
        graph,
        regions,
        boundary,
        channels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn flat(w: usize, h: usize) -> (Image, ScalarField) {
        (
            Image::from_fn(w, h, |_, _| 0.5).unwrap(),
            ScalarField::from_fn(w, h, |_, _| 0.0).unwrap(),
        )
    }

    #[test]
    fn singleton_regions_on_2x2() {
        let (img, rel) = flat(2, 2);
        let labels = LabelMap::new(2, 2, vec![0, 1, 2, 3]).unwrap();
        let rag = build_rag(&img, &labels, &rel).unwrap();
        assert_eq!(rag.n_nodes(), 4);
        let pairs: Vec<(usize, usize)> = rag.edges().iter().map(|e| (e.a, e.b)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(rag.boundary(), &[1, 1, 1, 1]);
    }

    #[test]
    fn single_region_has_no_edges() {
        let (img, rel) = flat(3, 3);
        let labels = LabelMap::new(3, 3, vec![0; 9]).unwrap();
        let rag = build_rag(&img, &labels, &rel).unwrap();
        assert_eq!(rag.n_nodes(), 1);
        assert!(rag.edges().is_empty());
        assert_eq!(rag.regions()[0].area, 9);
    }

    #[test]
    fn pass_value_is_lowest_crossing() {
        let img = Image::from_fn(2, 2, |_, _| 0.0).unwrap();
        let labels = LabelMap::new(2, 2, vec![0, 1, 0, 1]).unwrap();
        let rel = ScalarField::new(2, 2, vec![0.1, 0.7, 0.4, 0.2]).unwrap();
        let rag = build_rag(&img, &labels, &rel).unwrap();
        assert_eq!(rag.edges()[0].weight, 0.4);
        let mean = build_rag_with(&img, &labels, &rel, Dissimilarity::MeanBoundary).unwrap();
        assert!((mean.edges()[0].weight - 0.55).abs() < 1e-12);
    }

    #[test]
    fn edges_match_brute_force_adjacency() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let raw: Vec<u32> = (0..256).map(|_| rng.random_range(0..6)).collect();
            let labels = LabelMap::normalize(16, 16, &raw).unwrap();
            let (img, rel) = flat(16, 16);
            let rag = build_rag(&img, &labels, &rel).unwrap();
            let mut expected = BTreeSet::new();
            let mut counts = std::collections::BTreeMap::new();
            for y in 0..16 {
                for x in 0..16 {
                    for (nx, ny) in [(x + 1, y), (x, y + 1)] {
                        if nx < 16 && ny < 16 {
                            let (a, b) = (labels.get(x, y), labels.get(nx, ny));
                            if a != b {
                                let k = (a.min(b) as usize, a.max(b) as usize);
                                expected.insert(k);
                                *counts.entry(k).or_insert(0u64) += 1;
                            }
                        }
                    }
                }
            }
            let got: BTreeSet<(usize, usize)> = rag.edges().iter().map(|e| (e.a, e.b)).collect();
            assert_eq!(got, expected);
            for (e, &c) in rag.edges().iter().zip(rag.boundary()) {
                assert_eq!(counts[&(e.a, e.b)], c);
            }
        }
    }

    #[test]
    fn stats_accumulate_per_channel() {
        let img = Image::new(2, 1, 3, vec![0.2, 0.4, 0.6, 0.4, 0.4, 0.4]).unwrap();
        let labels = LabelMap::new(2, 1, vec![0, 0]).unwrap();
        let rel = ScalarField::from_fn(2, 1, |_, _| 0.0).unwrap();
        let rag = build_rag(&img, &labels, &rel).unwrap();
        let s = rag.regions()[0];
        assert_eq!(s.area, 2);
        // Channel 0: values 0.2, 0.4 -> variance 0.02; channel 2: 0.6, 0.4 -> 0.02.
        assert!((s.total_variance(3) - 0.04).abs() < 1e-12);
        assert!((s.mean_luminance(3) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let (img, rel) = flat(2, 2);
        let labels = LabelMap::new(3, 1, vec![0, 0, 0]).unwrap();
        assert!(matches!(
            build_rag(&img, &labels, &rel),
            Err(Error::Dimension(_))
        ));
    }
}
