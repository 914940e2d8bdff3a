//! Per-image preparation shared by segmentation, scoring and model selection.

use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{build_rag_with, Dissimilarity, IndexedHierarchy, Rag};
use crate::pixel::{
    morphological_gradient, watershed_fine_partition, Image, LabelMap, ScalarField,
};
use crate::scoring::JudgmentSet;
use crate::stochastic::gradient_hierarchy;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineOptions {
    /// Disk radius of the morphological gradient.
    pub gradient_radius: u32,
    pub dissimilarity: Dissimilarity,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            gradient_radius: 1,
            dissimilarity: Dissimilarity::PassValue,
        }
    }
}

/// An image with its fine partition, region adjacency graph and gradient
/// hierarchy, ready to be re-weighted and cut.
#[derive(Clone, Debug)]
pub struct ImageCase {
    id: String,
    image: Image,
    relief: ScalarField,
    fine: Arc<LabelMap>,
    rag: Rag,
    base: IndexedHierarchy,
    judgments: Option<JudgmentSet>,
    fingerprint: String,
}

impl ImageCase {
    /// Computes the gradient relief and, unless `labels` supplies one, the
    /// watershed fine partition; then the RAG and the gradient hierarchy.
    pub fn prepare(
        id: impl Into<String>,
        image: Image,
        labels: Option<LabelMap>,
        judgments: Option<JudgmentSet>,
        options: &PipelineOptions,
    ) -> Result<Self> {
        let id = id.into();
        Self::build(&id, image, labels, judgments, options).map_err(|e| Error::for_image(&id, e))
    }

    fn build(
        id: &str,
        image: Image,
        labels: Option<LabelMap>,
        judgments: Option<JudgmentSet>,
        options: &PipelineOptions,
    ) -> Result<Self> {
        let relief = morphological_gradient(&image, options.gradient_radius)?;
        let fine = match labels {
            Some(l) => {
                if (l.width(), l.height()) != (image.width(), image.height()) {
                    return Err(Error::Dimension(format!(
                        "label map is {}x{}, image is {}x{}",
                        l.width(),
                        l.height(),
                        image.width(),
                        image.height()
                    )));
                }
                l
            }
            None => watershed_fine_partition(&relief)?,
        };
        let fine = Arc::new(fine);
        let rag = build_rag_with(&image, &fine, &relief, options.dissimilarity)?;
        let base = gradient_hierarchy(&rag, fine.clone())?;
        let fingerprint = fingerprint(&image, &fine, options);
        Ok(Self {
            id: id.to_string(),
            image,
            relief,
            fine,
            rag,
            base,
            judgments,
            fingerprint,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn image(&self) -> &Image {
        &self.image
    }

    pub fn relief(&self) -> &ScalarField {
        &self.relief
    }

    pub fn fine(&self) -> &Arc<LabelMap> {
        &self.fine
    }

    pub fn rag(&self) -> &Rag {
        &self.rag
    }

    pub fn base(&self) -> &IndexedHierarchy {
        &self.base
    }

    pub fn judgments(&self) -> Option<&JudgmentSet> {
        self.judgments.as_ref()
    }

    /// Content hash of the image, fine partition and options; keys the
    /// hierarchy cache.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }
}

fn fingerprint(image: &Image, fine: &LabelMap, options: &PipelineOptions) -> String {
    let mut hasher = Sha256::new();
    hasher.update((image.width() as u64).to_le_bytes());
    hasher.update((image.height() as u64).to_le_bytes());
    hasher.update((image.channels() as u64).to_le_bytes());
    for v in image.values() {
        hasher.update(v.to_le_bytes());
    }
    for l in fine.labels() {
        hasher.update(l.to_le_bytes());
    }
    hasher.update(options.gradient_radius.to_le_bytes());
    hasher.update([options.dissimilarity as u8]);
    hex::encode(&hasher.finalize()[..16])
}
