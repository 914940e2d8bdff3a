use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swseg::graph::{build_rag, hierarchy_to_bytes, IndexedHierarchy};
use swseg::pixel::{morphological_gradient, watershed_fine_partition, Image, StructuringElement};
use swseg::stochastic::{
    compose_chain, cut_probabilities, gradient_hierarchy, monte_carlo_cut_frequency, sws_reweight,
    HierarchySpec, Intensity, MarkerModel, MarkerProcess, MeasureKind,
};
use swseg::synthetic::random_hierarchy;

/// Blocky random image so that fine regions are large enough to survive erosion.
fn blocky_image(seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
    Image::from_fn(24, 24, |x, y| blocks[(y / 6) * 4 + x / 6]).unwrap()
}

fn image_hierarchy(seed: u64) -> IndexedHierarchy {
    let img = blocky_image(seed);
    let relief = morphological_gradient(&img, 1).unwrap();
    let fine = watershed_fine_partition(&relief).unwrap();
    let rag = build_rag(&img, &fine, &relief).unwrap();
    gradient_hierarchy(&rag, Arc::new(fine)).unwrap()
}

fn measures() -> Vec<MeasureKind> {
    vec![
        MeasureKind::Surface,
        MeasureKind::Volume,
        MeasureKind::ErodedSurface(StructuringElement::Disk(1)),
        MeasureKind::ErodedVolume(StructuringElement::HSeg(3)),
        MeasureKind::ErodedSurface(StructuringElement::VSeg(4)),
    ]
}

#[test]
fn monte_carlo_matches_on_image_hierarchies() {
    let trials = 20_000u64;
    for seed in 0..3 {
        let h = image_hierarchy(seed);
        for measure in measures() {
            for process in [
                MarkerProcess::Poisson(Intensity::ExpectedCount(6.0)),
                MarkerProcess::Uniform(6),
            ] {
                let model = MarkerModel::new(process, measure);
                let p = cut_probabilities(&h, &model).unwrap();
                let f = monte_carlo_cut_frequency(&h, &model, trials, seed).unwrap();
                for (e, (&p, &f)) in p.iter().zip(&f).enumerate() {
                    let band = 4.0 * (p * (1.0 - p) / trials as f64).sqrt() + 2e-3;
                    assert!((p - f).abs() <= band, "{model} edge {e}: {p} vs {f}");
                }
            }
        }
    }
}

#[test]
fn compose_chain_equals_stepwise_reweighting() {
    let img = blocky_image(4);
    let relief = morphological_gradient(&img, 1).unwrap();
    let fine = watershed_fine_partition(&relief).unwrap();
    let spec: HierarchySpec = "svol(erode=disk:1)|ssurf|grad".parse().unwrap();
    let composed = compose_chain(&img, &fine, &relief, &spec).unwrap();
    let rag = build_rag(&img, &fine, &relief).unwrap();
    let base = gradient_hierarchy(&rag, Arc::new(fine)).unwrap();
    let mut h = base;
    for op in spec.ops() {
        h = sws_reweight(&h, op).unwrap();
    }
    assert_eq!(hierarchy_to_bytes(&composed), hierarchy_to_bytes(&h));
    assert_eq!(composed.provenance(), spec.canonical());
}

proptest! {
    #[test]
    fn probabilities_grow_with_intensity(seed in any::<u64>(), n in 2usize..20, volumic in any::<bool>()) {
        let h = random_hierarchy(&mut ChaCha8Rng::seed_from_u64(seed), n, 30);
        let measure = if volumic { MeasureKind::Volume } else { MeasureKind::Surface };
        let mut previous = vec![0.0; n - 1];
        for theta in [0.001, 0.01, 0.1, 1.0] {
            let model = MarkerModel::new(MarkerProcess::Poisson(Intensity::Rate(theta)), measure);
            let p = cut_probabilities(&h, &model).unwrap();
            for (a, b) in previous.iter().zip(&p) {
                prop_assert!((0.0..=1.0).contains(b));
                prop_assert!(*b >= *a);
            }
            previous = p;
        }
        let mut previous = vec![0.0; n - 1];
        for count in [1, 2, 5, 20, 100] {
            let model = MarkerModel::new(MarkerProcess::Uniform(count), measure);
            let p = cut_probabilities(&h, &model).unwrap();
            for (a, b) in previous.iter().zip(&p) {
                prop_assert!((0.0..=1.0).contains(b));
                prop_assert!(*b >= *a - 1e-12);
            }
            previous = p;
        }
    }

    #[test]
    fn reweighting_keeps_the_tree(seed in any::<u64>(), n in 2usize..20) {
        let h = random_hierarchy(&mut ChaCha8Rng::seed_from_u64(seed), n, 30);
        let model = MarkerModel::new(MarkerProcess::default(), MeasureKind::Surface);
        let r = sws_reweight(&h, &model).unwrap();
        let ends = |h: &IndexedHierarchy| -> Vec<(usize, usize)> {
            h.mst().edges().iter().map(|e| (e.a, e.b)).collect()
        };
        prop_assert_eq!(ends(&h), ends(&r));
        prop_assert_eq!(h.leaf_areas(), r.leaf_areas());
        prop_assert!(r.max_altitude() <= 1.0);
    }
}
