//! Monte Carlo estimate of edge cut frequencies, used to check the closed
//! forms of [`cut_probabilities`](super::cut_probabilities).
//!
//! Markers are implanted as points of the measured domain: pixels for
//! surfaces, pixels of a cluster's eroded mask for erosion variants, and
//! (pixel, height) pairs below the root altitude for volumes. A marker lying
//! in the exclusive part of dendrogram node `N`, at height `z`, takes part in
//! the segmentation of every merge above `N` whose altitude is at least `z`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;
use rayon::prelude::*;

use super::measure::lowest_eroded_node;
use super::model::{MarkerModel, MarkerProcess};
use crate::error::{Error, Result};
use crate::graph::{IndexedHierarchy, LeveledForest};

/// Places where markers can fall, with their share of the measure.
struct MarkerCells {
    /// `(leaf, first merge rank the marker may take part in, weight)`.
    cells: Vec<(usize, usize, f64)>,
    /// Height range for volumic measures (root altitude), `None` for surfaces.
    height: Option<f64>,
    total: f64,
}

impl MarkerCells {
    fn new(h: &IndexedHierarchy, model: &MarkerModel) -> Result<Self> {
        let n = h.n_leaves();
        let mut exclusive = vec![0.0f64; h.n_nodes()];
        match model.measure.erosion() {
            None => {
                for (leaf, &a) in h.leaf_areas().iter().enumerate() {
                    exclusive[leaf] = a as f64;
                }
            }
            Some(se) => {
                for node in lowest_eroded_node(h, se)? {
                    if node != u32::MAX {
                        exclusive[node as usize] += 1.0;
                    }
                }
            }
        }
        let height = model.measure.is_volumic().then(|| h.max_altitude());
        let scale = height.unwrap_or(1.0);
        let cells: Vec<(usize, usize, f64)> = exclusive
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(node, &w)| {
                let leaf = h.leaves_of(node)[0];
                let rank = if node < n { 0 } else { node - n + 1 };
                (leaf, rank, w * scale)
            })
            .collect();
        let total: f64 = cells.iter().map(|c| c.2).sum();
        if !(total > 0.0) && !h.merges().is_empty() {
            return Err(Error::DegenerateMeasure(format!(
                "total {} measure of `{}` is {total}",
                model.short_name(),
                h.provenance()
            )));
        }
        Ok(Self {
            cells,
            height,
            total,
        })
    }
}

/// Empirical frequency with which each MST edge is cut by marker-based
/// segmentation from random markers. Trial `t` draws from its own stream
/// derived from `(seed, t)`, so results do not depend on thread scheduling.
pub fn monte_carlo_cut_frequency(
    h: &IndexedHierarchy,
    model: &MarkerModel,
    trials: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    model.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let n_edges = h.mst().edges().len();
    if n_edges == 0 {
        return Ok(Vec::new());
    }
    let cells = MarkerCells::new(h, model)?;
    let order: Vec<usize> = h.merges().iter().map(|m| m.edge).collect();
    let altitudes = h.altitudes();
    let rank_of_height = |z: f64| altitudes.partition_point(|&a| a < z);

    enum Sampler {
        Poisson(Vec<Option<Poisson<f64>>>),
        Uniform(u32, WeightedIndex<f64>),
    }
    let sampler = match model.process {
        MarkerProcess::Poisson(_) => {
            let theta = model.process.rate(cells.total).expect("poisson rate");
            Sampler::Poisson(
                cells
                    .cells
                    .iter()
                    .map(|c| Poisson::new(theta * c.2).ok())
                    .collect(),
            )
        }
        MarkerProcess::Uniform(count) => Sampler::Uniform(
            count,
            WeightedIndex::new(cells.cells.iter().map(|c| c.2))
                .map_err(|e| Error::DegenerateMeasure(e.to_string()))?,
        ),
    };

    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || {
                (
                    vec![0u64; n_edges],
                    LeveledForest::default(),
                    Vec::new(),
                    vec![false; n_edges],
                )
            },
            |(mut counts, mut forest, mut markers, mut cut), trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial);
                markers.clear();
                let mut place = |rng: &mut ChaCha8Rng, cell: usize| {
                    let (leaf, rank, _) = cells.cells[cell];
                    let rank = match cells.height {
                        Some(top) => rank.max(rank_of_height(rng.random::<f64>() * top)),
                        None => rank,
                    };
                    markers.push((leaf, rank));
                };
                match &sampler {
                    Sampler::Poisson(dists) => {
                        for (cell, dist) in dists.iter().enumerate() {
                            if let Some(d) = dist {
                                let k = d.sample(&mut rng) as u64;
                                for _ in 0..k {
                                    place(&mut rng, cell);
                                }
                            }
                        }
                    }
                    Sampler::Uniform(count, dist) => {
                        for _ in 0..*count {
                            let cell = dist.sample(&mut rng);
                            place(&mut rng, cell);
                        }
                    }
                }
                forest.run(h.mst(), &order, &markers, &mut cut);
                for (c, &hit) in counts.iter_mut().zip(&cut) {
                    *c += hit as u64;
                }
                (counts, forest, markers, cut)
            },
        )
        .map(|(counts, ..)| counts)
        .reduce(
            || vec![0u64; n_edges],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / trials as f64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_dendrogram, Edge, Mst};
    use crate::stochastic::{cut_probabilities, MeasureKind};

    fn two_equal_leaves() -> IndexedHierarchy {
        IndexedHierarchy::build(
            Mst::from_tree(2, vec![Edge::new(0, 1, 1.0)]).unwrap(),
            vec![5, 5],
        )
        .unwrap()
    }

    #[test]
    fn single_marker_never_cuts() {
        let h = build_dendrogram(
            &Mst::from_tree(
                4,
                vec![
                    Edge::new(0, 1, 1.0),
                    Edge::new(1, 2, 3.0),
                    Edge::new(2, 3, 2.0),
                ],
            )
            .unwrap(),
        );
        let m = MarkerModel::new(MarkerProcess::Uniform(1), MeasureKind::Surface);
        let f = monte_carlo_cut_frequency(&h, &m, 1000, 1).unwrap();
        assert!(f.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn same_seed_same_output() {
        let h = two_equal_leaves();
        let m = MarkerModel::new(MarkerProcess::Uniform(2), MeasureKind::Volume);
        let a = monte_carlo_cut_frequency(&h, &m, 5000, 42).unwrap();
        let b = monte_carlo_cut_frequency(&h, &m, 5000, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn two_markers_on_equal_halves() {
        let h = two_equal_leaves();
        let m = MarkerModel::new(MarkerProcess::Uniform(2), MeasureKind::Surface);
        let trials = 10_000u64;
        let f = monte_carlo_cut_frequency(&h, &m, trials, 7).unwrap();
        let sigma = (0.25f64 / trials as f64).sqrt();
        assert!((f[0] - 0.5).abs() <= 3.0 * sigma, "{}", f[0]);
    }

    #[test]
    fn agrees_with_closed_form_on_a_small_tree() {
        let mst = Mst::from_tree(
            5,
            vec![
                Edge::new(0, 1, 0.2),
                Edge::new(1, 2, 0.9),
                Edge::new(2, 3, 0.4),
                Edge::new(3, 4, 0.6),
            ],
        )
        .unwrap();
        let h = IndexedHierarchy::build(mst, vec![3, 1, 4, 1, 5]).unwrap();
        let trials = 40_000;
        for process in [
            MarkerProcess::Uniform(3),
            MarkerProcess::Poisson(crate::stochastic::Intensity::ExpectedCount(3.0)),
        ] {
            for measure in [MeasureKind::Surface, MeasureKind::Volume] {
                let m = MarkerModel::new(process, measure);
                let p = cut_probabilities(&h, &m).unwrap();
                let f = monte_carlo_cut_frequency(&h, &m, trials, 3).unwrap();
                for (pe, fe) in p.iter().zip(&f) {
                    let band = 4.0 * (pe * (1.0 - pe) / trials as f64).sqrt() + 1e-3;
                    assert!((pe - fe).abs() <= band, "{m}: {pe} vs {fe}");
                }
            }
        }
    }

    #[test]
    fn zero_trials_rejected() {
        let m = MarkerModel::new(MarkerProcess::Uniform(2), MeasureKind::Surface);
        assert!(monte_carlo_cut_frequency(&two_equal_leaves(), &m, 0, 0).is_err());
    }
}
