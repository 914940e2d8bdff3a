use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::pipeline::PipelineOptions;
use crate::pixel::StructuringElement;
use crate::select::{CutGrid, ScoreKind};
use crate::stochastic::{
    default_operator_set, default_se_catalog, enumerate_specs, HierarchySpec, MarkerProcess,
};

/// Train/test split: explicit id lists, or a seeded random split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Split {
    Lists {
        train: Vec<String>,
        test: Vec<String>,
    },
    Ratio {
        train_ratio: f64,
    },
}

impl Default for Split {
    fn default() -> Self {
        Split::Ratio { train_ratio: 0.5 }
    }
}

/// `"all-depth-2"`, `"all-depth-1"`, `"base"`, or a list of chains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpecSet {
    Named(String),
    List(Vec<String>),
}

impl Default for SpecSet {
    fn default() -> Self {
        SpecSet::Named("all-depth-2".into())
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_catalog() -> Vec<String> {
    default_se_catalog()
        .iter()
        .map(ToString::to_string)
        .collect()
}

fn default_marker() -> String {
    MarkerProcess::default().to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub manifest: PathBuf,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub split: Split,
    #[serde(default)]
    pub specs: SpecSet,
    #[serde(default = "default_catalog")]
    pub se_catalog: Vec<String>,
    /// Marker process of operators that do not name one.
    #[serde(default = "default_marker")]
    pub marker: String,
    #[serde(default)]
    pub score: ScoreKind,
    #[serde(default)]
    pub grid: CutGrid,
    #[serde(default)]
    pub pipeline: PipelineOptions,
}

impl RunConfig {
    pub fn new(manifest: impl Into<PathBuf>) -> Self {
        Self {
            manifest: manifest.into(),
            output_dir: default_output_dir(),
            cache_dir: None,
            seed: 0,
            workers: None,
            split: Split::default(),
            specs: SpecSet::default(),
            se_catalog: default_catalog(),
            marker: default_marker(),
            score: ScoreKind::default(),
            grid: CutGrid::default(),
            pipeline: PipelineOptions::default(),
        }
    }

    /// Parses a TOML file; relative paths are taken from the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.manifest = base.join(&cfg.manifest);
        cfg.output_dir = base.join(&cfg.output_dir);
        cfg.cache_dir = cfg.cache_dir.map(|d| base.join(d));
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks everything that does not need the dataset.
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.score.validate()?;
        self.specs()?;
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        if self.pipeline.gradient_radius == 0 {
            return Err(Error::Config("gradient_radius must be >= 1".into()));
        }
        match &self.split {
            Split::Ratio { train_ratio } if !(*train_ratio > 0.0 && *train_ratio < 1.0) => Err(
                Error::Config(format!("train_ratio {train_ratio} outside (0, 1)")),
            ),
            Split::Lists { train, test } => {
                let train_set: HashSet<&String> = train.iter().collect();
                if let Some(id) = test.iter().find(|id| train_set.contains(id)) {
                    return Err(Error::Config(format!(
                        "image `{id}` is in both train and test"
                    )));
                }
                if train.is_empty() || test.is_empty() {
                    return Err(Error::Config(
                        "train and test sets must be non-empty".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn marker_process(&self) -> Result<MarkerProcess> {
        self.marker
            .parse()
            .map_err(|e: Error| Error::Config(format!("marker: {e}")))
    }

    pub fn catalog(&self) -> Result<Vec<StructuringElement>> {
        self.se_catalog
            .iter()
            .map(|s| {
                s.parse()
                    .map_err(|e: Error| Error::Config(format!("se_catalog: {e}")))
            })
            .collect()
    }

    pub fn specs(&self) -> Result<Vec<HierarchySpec>> {
        let process = self.marker_process()?;
        let specs = match &self.specs {
            SpecSet::Named(name) => {
                let all = enumerate_specs(&default_operator_set(process), &self.catalog()?);
                match name.as_str() {
                    "all-depth-2" => all,
                    "all-depth-1" => all.into_iter().filter(|s| s.depth() <= 1).collect(),
                    "base" => vec![HierarchySpec::base()],
                    other => return Err(Error::Config(format!("unknown spec set `{other}`"))),
                }
            }
            SpecSet::List(list) => list
                .iter()
                .map(|s| HierarchySpec::parse_with_default(s, process))
                .collect::<Result<Vec<_>>>()?,
        };
        if specs.is_empty() {
            return Err(Error::Config("spec set is empty".into()));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = specs.iter().find(|s| !seen.insert(s.canonical())) {
            return Err(Error::Config(format!("spec `{dup}` listed twice")));
        }
        Ok(specs)
    }

    /// Train and test ids, each in manifest order.
    pub fn split_ids(&self, dataset: &Dataset) -> Result<(Vec<String>, Vec<String>)> {
        let ids: Vec<String> = dataset.ids().map(str::to_string).collect();
        let (train, test): (HashSet<String>, HashSet<String>) = match &self.split {
            Split::Lists { train, test } => {
                for id in train.iter().chain(test) {
                    if dataset.get(id).is_none() {
                        return Err(Error::Config(format!("split names unknown image `{id}`")));
                    }
                }
                (
                    train.iter().cloned().collect(),
                    test.iter().cloned().collect(),
                )
            }
            Split::Ratio { train_ratio } => {
                if ids.len() < 2 {
                    return Err(Error::Config(
                        "a ratio split needs at least 2 images".into(),
                    ));
                }
                let mut shuffled = ids.clone();
                shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));
                let n_train =
                    ((train_ratio * ids.len() as f64).round() as usize).clamp(1, ids.len() - 1);
                let (a, b) = shuffled.split_at(n_train);
                (a.iter().cloned().collect(), b.iter().cloned().collect())
            }
        };
        let pick =
            |set: &HashSet<String>| ids.iter().filter(|id| set.contains(*id)).cloned().collect();
        Ok((pick(&train), pick(&test)))
    }
}
