//! A configured train/test run over a dataset.

use std::io::Write;

use crate::error::{Error, Result};
use crate::io::{Dataset, HierarchyCache, RunConfig};
use crate::pipeline::ImageCase;
use crate::scoring::DEFAULT_DELTA;
use crate::select::{evaluate_tables, select, ModelResult, ScoreKind, Search, Selection};
use crate::stochastic::HierarchySpec;

#[derive(Debug)]
pub struct Experiment {
    config: RunConfig,
    dataset: Dataset,
    specs: Vec<HierarchySpec>,
    train_ids: Vec<String>,
    test_ids: Vec<String>,
    cache: Option<HierarchyCache>,
}

impl Experiment {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let dataset = Dataset::load(&config.manifest).map_err(|e| match e {
            Error::Io { path, source } => {
                Error::Config(format!("cannot read manifest {}: {source}", path.display()))
            }
            e => e,
        })?;
        if config.score.needs_judgments() {
            if let Some(e) = dataset.entries().iter().find(|e| e.judgments.is_none()) {
                return Err(Error::Config(format!(
                    "whdr scoring needs judgments, image `{}` has none",
                    e.id
                )));
            }
        }
        let specs = config.specs()?;
        let (train_ids, test_ids) = config.split_ids(&dataset)?;
        let cache = config.cache_dir.as_ref().map(HierarchyCache::new);
        Ok(Self {
            config,
            dataset,
            specs,
            train_ids,
            test_ids,
            cache,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn specs(&self) -> &[HierarchySpec] {
        &self.specs
    }

    pub fn train_ids(&self) -> &[String] {
        &self.train_ids
    }

    pub fn test_ids(&self) -> &[String] {
        &self.test_ids
    }

    fn delta(&self) -> f64 {
        match self.config.score {
            ScoreKind::Whdr { delta } => delta,
            ScoreKind::Ms { .. } => DEFAULT_DELTA,
        }
    }

    pub fn prepare(&self, ids: &[String]) -> Result<Vec<ImageCase>> {
        self.dataset
            .prepare(ids, &self.config.pipeline, self.delta())
    }

    pub fn search(&self) -> Search<'_, ScoreKind> {
        let s = Search::new(&self.specs, &self.config.grid, &self.config.score);
        match &self.cache {
            Some(c) => s.with_cache(c),
            None => s,
        }
    }

    pub fn train(&self) -> Result<Selection> {
        self.search().train_model(&self.prepare(&self.train_ids)?)
    }

    /// Per-image oracle for the given images.
    pub fn oracles(&self, ids: &[String]) -> Result<Vec<(String, Selection)>> {
        let cases = self.prepare(ids)?;
        let tables = self.search().tables(&cases)?;
        tables
            .iter()
            .map(|t| {
                let sel = select(std::slice::from_ref(t), &self.specs, &self.config.grid)?;
                Ok((t.image_id().to_string(), sel))
            })
            .collect()
    }

    /// Trains on the train split and scores the model against the oracle on
    /// the test split.
    pub fn evaluate(&self) -> Result<ModelResult> {
        let model = self.train()?;
        let test = self.prepare(&self.test_ids)?;
        let tables = self.search().tables(&test)?;
        evaluate_tables(&tables, &model, &self.specs, &self.config.grid)
    }
}

pub fn write_oracle_csv(rows: &[(String, Selection)], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["image_id", "oracle_spec", "oracle_cut", "oracle_score"])?;
    for (id, sel) in rows {
        w.write_record([
            id.clone(),
            sel.spec.canonical(),
            sel.cut.to_string(),
            sel.score.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

/// `key = value` lines describing a trained model.
pub fn model_summary(model: &Selection) -> String {
    format!(
        "spec = {}\nname = {}\ncut = {}\ntraining_score = {}\n",
        model.spec.canonical(),
        model.spec.display_name(),
        model.cut,
        model.score
    )
}
