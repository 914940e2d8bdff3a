use crate::error::Result;
use crate::graph::{Partition, Rag, RegionStats};
use crate::pixel::{check_same_dims, Image, LabelMap};

/// Scale parameter used for the cell images.
pub const DEFAULT_SCALE: f64 = 1.168;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MsConfig {
    /// Weight of the contour-length term.
    pub s: f64,
}

impl Default for MsConfig {
    fn default() -> Self {
        Self { s: DEFAULT_SCALE }
    }
}

/// The two terms of the piecewise-constant Mumford-Shah energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MsTerms {
    /// Sum over regions and channels of squared deviations from the region mean.
    pub variance: f64,
    /// Number of 4-adjacent pixel pairs carrying different labels.
    pub contour: u64,
}

impl MsTerms {
    pub fn energy(&self, cfg: &MsConfig) -> f64 {
        self.variance + cfg.s * self.contour as f64
    }
}

/// Energy terms of a pixel segmentation, from per-region sum and
/// sum-of-squares accumulators.
pub fn mumford_shah_terms(img: &Image, seg: &LabelMap) -> Result<MsTerms> {
    check_same_dims(
        "image vs segmentation",
        (img.width(), img.height()),
        (seg.width(), seg.height()),
    )?;
    let mut stats = vec![RegionStats::default(); seg.n_regions()];
    for (p, &l) in seg.labels().iter().enumerate() {
        let s = &mut stats[l as usize];
        s.area += 1;
        for (c, &v) in img.pixel(p).iter().enumerate() {
            s.sum[c] += v;
            s.sum_sq[c] += v * v;
        }
    }
    let variance = stats.iter().map(|s| s.total_variance(img.channels())).sum();
    let (w, h) = (seg.width(), seg.height());
    let lab = seg.labels();
    let mut contour = 0u64;
    for y in 0..h {
        for x in 0..w {
            let p = y * w + x;
            if x + 1 < w && lab[p] != lab[p + 1] {
                contour += 1;
            }
            if y + 1 < h && lab[p] != lab[p + w] {
                contour += 1;
            }
        }
    }
    Ok(MsTerms { variance, contour })
}

/// `Σ var(R) + s · C` for a pixel segmentation.
pub fn mumford_shah(img: &Image, seg: &LabelMap, cfg: &MsConfig) -> Result<f64> {
    Ok(mumford_shah_terms(img, seg)?.energy(cfg))
}

/// Same terms for a partition of the RAG's fine regions, computed from the
/// region statistics and boundary lengths without touching pixels.
pub fn partition_ms_terms(rag: &Rag, partition: &Partition) -> MsTerms {
    let mut stats = vec![RegionStats::default(); partition.n_regions];
    for (leaf, &l) in partition.labels.iter().enumerate() {
        stats[l as usize].merge(&rag.regions()[leaf]);
    }
    let variance = stats.iter().map(|s| s.total_variance(rag.channels())).sum();
    let contour = rag
        .edges()
        .iter()
        .zip(rag.boundary())
        .filter(|(e, _)| partition.labels[e.a] != partition.labels[e.b])
        .map(|(_, &b)| b)
        .sum();
    MsTerms { variance, contour }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_single_region_is_zero() {
        let img = Image::from_fn(5, 4, |_, _| 0.3).unwrap();
        let seg = LabelMap::new(5, 4, vec![0; 20]).unwrap();
        assert!(
            mumford_shah(&img, &seg, &MsConfig::default())
                .unwrap()
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn constant_two_regions_cost_contour_only() {
        let img = Image::from_fn(4, 3, |_, _| 0.7).unwrap();
        // Vertical boundary of length 3 between columns 1 and 2.
        let raw: Vec<u32> = (0..12).map(|p| (p % 4 >= 2) as u32).collect();
        let seg = LabelMap::new(4, 3, raw).unwrap();
        let cfg = MsConfig { s: 2.5 };
        let e = mumford_shah(&img, &seg, &cfg).unwrap();
        assert!((e - 7.5).abs() < 1e-12);
    }

    /// Two-pass reference: explicit region means, then squared deviations.
    fn two_pass(img: &Image, seg: &LabelMap, s: f64) -> f64 {
        let n = seg.n_regions();
        let c = img.channels();
        let mut mean = vec![0.0; n * c];
        let mut count = vec![0.0; n];
        for (p, &l) in seg.labels().iter().enumerate() {
            count[l as usize] += 1.0;
            for k in 0..c {
                mean[l as usize * c + k] += img.pixel(p)[k];
            }
        }
        for l in 0..n {
            for k in 0..c {
                mean[l * c + k] /= count[l];
            }
        }
        let mut var = 0.0;
        for (p, &l) in seg.labels().iter().enumerate() {
            for k in 0..c {
                let d = img.pixel(p)[k] - mean[l as usize * c + k];
                var += d * d;
            }
        }
        let mut contour = 0.0;
        for y in 0..seg.height() {
            for x in 0..seg.width() {
                if x + 1 < seg.width() && seg.get(x, y) != seg.get(x + 1, y) {
                    contour += 1.0;
                }
                if y + 1 < seg.height() && seg.get(x, y) != seg.get(x, y + 1) {
                    contour += 1.0;
                }
            }
        }
        var + s * contour
    }

    #[test]
    fn matches_two_pass_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for channels in [1, 3] {
            for _ in 0..10 {
                let vals = (0..256 * channels).map(|_| rng.random::<f64>()).collect();
                let img = Image::new(16, 16, channels, vals).unwrap();
                let raw: Vec<u32> = (0..256).map(|_| rng.random_range(0..5)).collect();
                let seg = LabelMap::normalize(16, 16, &raw).unwrap();
                let cfg = MsConfig {
                    s: rng.random_range(0.1..3.0),
                };
                let got = mumford_shah(&img, &seg, &cfg).unwrap();
                let expected = two_pass(&img, &seg, cfg.s);
                assert!(
                    (got - expected).abs() < 1e-9 * expected,
                    "{got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn graph_terms_match_pixels_and_ignore_label_values() {
        use crate::graph::{
            build_dendrogram, build_rag, cut_to_k, minimum_spanning_tree, partition_labelmap,
        };
        use crate::pixel::ScalarField;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let img = Image::from_fn(8, 8, |x, y| ((x * 7 + y * 3) % 10) as f64 / 10.0).unwrap();
        let raw: Vec<u32> = (0..64).map(|_| rng.random_range(0..6)).collect();
        let fine = LabelMap::normalize(8, 8, &raw).unwrap();
        let relief = ScalarField::from_fn(8, 8, |_, _| 0.0).unwrap();
        let rag = build_rag(&img, &fine, &relief).unwrap();
        let h = build_dendrogram(&minimum_spanning_tree(rag.graph()).unwrap());
        let p = cut_to_k(&h, 3).unwrap();
        let permuted = Partition {
            labels: p.labels.iter().map(|l| 2 - l).collect(),
            ..p.clone()
        };
        let a = partition_ms_terms(&rag, &p);
        let b = partition_ms_terms(&rag, &permuted);
        assert_eq!(a.contour, b.contour);
        assert!((a.variance - b.variance).abs() < 1e-12);
        let pixels = mumford_shah_terms(&img, &partition_labelmap(&p, &fine).unwrap()).unwrap();
        assert_eq!(a.contour, pixels.contour);
        assert!((a.variance - pixels.variance).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch() {
        let img = Image::from_fn(2, 2, |_, _| 0.0).unwrap();
        let seg = LabelMap::new(4, 1, vec![0; 4]).unwrap();
        assert!(mumford_shah(&img, &seg, &MsConfig::default()).is_err());
    }
}
