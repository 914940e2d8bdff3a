use std::sync::Arc;

use super::reweight::sws_reweight;
use super::spec::HierarchySpec;
use crate::error::Result;
use crate::graph::{build_rag, minimum_spanning_tree, IndexedHierarchy, Rag};
use crate::pixel::{Image, LabelMap, ScalarField};

/// Gradient hierarchy of a region adjacency graph: the MST of the RAG with
/// leaf areas and the fine label map attached.
pub fn gradient_hierarchy(rag: &Rag, labels: Arc<LabelMap>) -> Result<IndexedHierarchy> {
    let mst = minimum_spanning_tree(rag.graph())?;
    IndexedHierarchy::build(mst, rag.areas())?.with_geometry(labels)
}

/// Applies the operators of `spec` in order, each consuming the previous output.
pub fn apply_chain(base: &IndexedHierarchy, spec: &HierarchySpec) -> Result<IndexedHierarchy> {
    let mut h = base.clone();
    for op in spec.ops() {
        h = sws_reweight(&h, op)?;
    }
    Ok(h)
}

/// Builds the gradient hierarchy of an image and composes `spec` on top of it.
pub fn compose_chain(
    img: &Image,
    labels: &LabelMap,
    relief: &ScalarField,
    spec: &HierarchySpec,
) -> Result<IndexedHierarchy> {
    let rag = build_rag(img, labels, relief)?;
    let base = gradient_hierarchy(&rag, Arc::new(labels.clone()))?;
    apply_chain(&base, spec)
}
