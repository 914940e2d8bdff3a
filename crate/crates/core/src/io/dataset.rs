use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{ImageCase, PipelineOptions};
use crate::pixel::{import_labels, load_image};
use crate::scoring::JudgmentSet;

/// One manifest record. Relative paths are relative to the manifest file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub image: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub judgments: Option<PathBuf>,
}

/// A dataset entry with resolved paths and an id.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetEntry {
    pub id: String,
    pub image: PathBuf,
    pub labels: Option<PathBuf>,
    pub judgments: Option<PathBuf>,
}

impl DatasetEntry {
    /// Loads the files and prepares the image. Judgments are read with the
    /// given tolerance.
    pub fn prepare(&self, options: &PipelineOptions, delta: f64) -> Result<ImageCase> {
        let load = || -> Result<_> {
            let image = load_image(&self.image)?;
            let dims = (image.width(), image.height());
            let labels = self
                .labels
                .as_ref()
                .map(|p| import_labels(p, Some(dims)))
                .transpose()?;
            let judgments = self
                .judgments
                .as_ref()
                .map(|p| JudgmentSet::load(p, dims.0, dims.1, delta))
                .transpose()?;
            Ok((image, labels, judgments))
        };
        let (image, labels, judgments) = load().map_err(|e| Error::for_image(&self.id, e))?;
        ImageCase::prepare(&self.id, image, labels, judgments, options)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    entries: Vec<DatasetEntry>,
}

impl Dataset {
    /// Reads a JSON manifest: a list of `{id?, image, labels?, judgments?}`.
    /// The id defaults to the image file stem.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let raw: Vec<ManifestEntry> =
            serde_json::from_str(&text).map_err(|source| Error::Json {
                path: path.to_path_buf(),
                source,
            })?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_manifest(base, raw)
    }

    pub fn from_manifest(base: &Path, raw: Vec<ManifestEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut entries = Vec::with_capacity(raw.len());
        for m in raw {
            let id = match m.id {
                Some(id) => id,
                None => m
                    .image
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .ok_or_else(|| {
                        Error::Config(format!("cannot derive an id from `{}`", m.image.display()))
                    })?,
            };
            if !seen.insert(id.clone()) {
                return Err(Error::Config(format!(
                    "duplicate image id `{id}` in manifest"
                )));
            }
            let entry = DatasetEntry {
                id,
                image: base.join(&m.image),
                labels: m.labels.map(|p| base.join(p)),
                judgments: m.judgments.map(|p| base.join(p)),
            };
            for p in [
                Some(&entry.image),
                entry.labels.as_ref(),
                entry.judgments.as_ref(),
            ]
            .into_iter()
            .flatten()
            {
                if !p.is_file() {
                    return Err(Error::Config(format!(
                        "image `{}`: missing file {}",
                        entry.id,
                        p.display()
                    )));
                }
            }
            entries.push(entry);
        }
        if entries.is_empty() {
            return Err(Error::Config("manifest lists no images".into()));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[DatasetEntry] {
        &self.entries
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }

    pub fn get(&self, id: &str) -> Option<&DatasetEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// Prepares the named images in the given order; the first failure in
    /// that order is returned.
    pub fn prepare(
        &self,
        ids: &[String],
        options: &PipelineOptions,
        delta: f64,
    ) -> Result<Vec<ImageCase>> {
        let entries = ids
            .iter()
            .map(|id| {
                self.get(id)
                    .ok_or_else(|| Error::Config(format!("image `{id}` is not in the manifest")))
            })
            .collect::<Result<Vec<_>>>()?;
        let cases: Vec<Result<ImageCase>> = entries
            .par_iter()
            .map(|e| e.prepare(options, delta))
            .collect();
        cases.into_iter().collect()
    }
}

pub fn write_manifest(entries: &[ManifestEntry], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(entries).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}
