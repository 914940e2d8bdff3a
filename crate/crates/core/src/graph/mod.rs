//! Region adjacency graphs, minimum spanning trees, indexed hierarchies,
//! cuts and marker-based segmentation.

mod graph;
mod hierarchy;
mod marker;
mod mst;
mod persist;
mod rag;
mod union_find;

pub use self::graph::{Edge, Graph};
pub use self::hierarchy::{
    build_dendrogram, cut_at, cut_to_k, partition_labelmap, CutParam, IndexedHierarchy, Merge,
    Partition,
};
pub use self::marker::marker_segmentation;
pub use self::mst::{kruskal_mst, minimum_spanning_tree, Mst};
pub use self::persist::{
    hierarchy_from_bytes, hierarchy_to_bytes, hierarchy_to_text, load_hierarchy, save_hierarchy,
    FORMAT_VERSION,
};
pub use self::rag::{build_rag, build_rag_with, Dissimilarity, Rag, RegionStats};

pub(crate) use self::marker::LeveledForest;
