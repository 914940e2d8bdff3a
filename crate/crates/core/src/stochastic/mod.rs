//! Stochastic watershed re-weighting, hierarchy composition and the Monte
//! Carlo check of the cut probabilities.

mod compose;
mod measure;
mod model;
mod monte_carlo;
mod reweight;
mod spec;

pub use self::compose::{apply_chain, compose_chain, gradient_hierarchy};
pub use self::measure::{cluster_measure, eroded_node_areas};
pub use self::model::{Intensity, MarkerModel, MarkerProcess, MeasureKind};
pub use self::monte_carlo::monte_carlo_cut_frequency;
pub use self::reweight::{cut_probabilities, pair_probability, sws_reweight};
pub use self::spec::{
    default_operator_set, default_se_catalog, enumerate_specs, HierarchySpec, OperatorTemplate,
    MAX_CHAIN_DEPTH,
};
