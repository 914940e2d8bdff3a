//! Stochastic watershed re-weighting of tree edges.

use super::measure::cluster_measure;
use super::model::{MarkerModel, MarkerProcess};
use crate::error::{Error, Result};
use crate::graph::IndexedHierarchy;

/// Probability, for every MST edge, that random markers land in both
/// clusters the edge merges, i.e. that the edge is cut by the marker-based
/// segmentation.
pub fn cut_probabilities(h: &IndexedHierarchy, model: &MarkerModel) -> Result<Vec<f64>> {
    model.validate()?;
    let n_edges = h.mst().edges().len();
    if n_edges == 0 {
        return Ok(Vec::new());
    }
    let measure = cluster_measure(h, model.measure)?;
    let total = measure[h.root()];
    if !(total > 0.0) {
        return Err(Error::DegenerateMeasure(format!(
            "total {} measure of `{}` is {total}",
            model.short_name(),
            h.provenance()
        )));
    }
    let mut probs = vec![0.0; n_edges];
    for m in h.merges() {
        let (m1, m2) = (measure[m.left], measure[m.right]);
        probs[m.edge] = pair_probability(model.process, m1, m2, total);
    }
    Ok(probs)
}

/// Closed form for two disjoint clusters of measures `m1`, `m2` out of `total`.
pub fn pair_probability(process: MarkerProcess, m1: f64, m2: f64, total: f64) -> f64 {
    let p = match process {
        MarkerProcess::Poisson(_) => {
            let theta = process.rate(total).expect("poisson has a rate");
            (-(-theta * m1).exp_m1()) * (-(-theta * m2).exp_m1())
        }
        MarkerProcess::Uniform(count) => {
            let n = count as i32;
            let a1 = (m1 / total).clamp(0.0, 1.0);
            let a2 = (m2 / total).clamp(0.0, 1.0);
            let both = (1.0 - a1 - a2).max(0.0);
            1.0 - (1.0 - a1).powi(n) - (1.0 - a2).powi(n) + both.powi(n)
        }
    };
    p.clamp(0.0, 1.0)
}

/// Same tree, with every edge valued by its cut probability under `model`;
/// the dendrogram is rebuilt from the new valuation.
pub fn sws_reweight(h: &IndexedHierarchy, model: &MarkerModel) -> Result<IndexedHierarchy> {
    let probs = cut_probabilities(h, model)?;
    h.reweighted(&probs, format!("{model}|{}", h.provenance()))
}
