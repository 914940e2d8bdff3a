//! Datasets, run configuration, hierarchy cache and saliency rendering.

mod cache;
mod config;
mod dataset;
mod saliency;

pub use self::cache::HierarchyCache;
pub use self::config::{RunConfig, SpecSet, Split};
pub use self::dataset::{write_manifest, Dataset, DatasetEntry, ManifestEntry};
pub use self::saliency::{render_saliency, sidecar_path, SaliencyImage};
