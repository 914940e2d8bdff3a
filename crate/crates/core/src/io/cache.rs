use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{hierarchy_from_bytes, hierarchy_to_bytes, IndexedHierarchy};
use crate::pipeline::ImageCase;
use crate::stochastic::HierarchySpec;

/// On-disk store of built hierarchies, one file per (image content, spec).
///
/// Layout: `<root>/<image fingerprint>/<spec hash>.swh`. The spec's canonical
/// name is stored inside the file as its provenance and checked on load, so a
/// hash collision or stale file is rebuilt rather than trusted.
#[derive(Clone, Debug)]
pub struct HierarchyCache {
    root: PathBuf,
}

impl HierarchyCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_for(&self, case: &ImageCase, spec: &HierarchySpec) -> PathBuf {
        let digest = Sha256::digest(spec.canonical().as_bytes());
        self.root
            .join(case.fingerprint())
            .join(format!("{}.swh", hex::encode(&digest[..12])))
    }

    /// Cached hierarchy for `spec`, or `None` when absent or unusable.
    pub fn load(&self, case: &ImageCase, spec: &HierarchySpec) -> Result<Option<IndexedHierarchy>> {
        let path = self.path_for(case, spec);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(path, e)),
        };
        let h = match hierarchy_from_bytes(&bytes) {
            Ok(h) => h,
            Err(_) => return Ok(None),
        };
        if h.provenance() != spec.canonical() || h.leaf_areas() != case.base().leaf_areas() {
            return Ok(None);
        }
        h.with_geometry(case.fine().clone()).map(Some)
    }

    /// Writes through a temporary file so readers never see partial output.
    pub fn store(
        &self,
        case: &ImageCase,
        spec: &HierarchySpec,
        h: &IndexedHierarchy,
    ) -> Result<()> {
        let path = self.path_for(case, spec);
        let dir = path.parent().expect("cache path has a parent");
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, hierarchy_to_bytes(h)).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }

    pub fn get_or_build(
        &self,
        case: &ImageCase,
        spec: &HierarchySpec,
        build: impl FnOnce() -> Result<IndexedHierarchy>,
    ) -> Result<IndexedHierarchy> {
        if let Some(h) = self.load(case, spec)? {
            return Ok(h);
        }
        let h = build()?;
        self.store(case, spec, &h)?;
        Ok(h)
    }
}
