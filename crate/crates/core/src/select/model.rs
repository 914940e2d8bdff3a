use std::io::Write;

use super::grid::{CutGrid, CutValue};
use super::score::ScoreFn;
use super::table::{score_table, score_tables, ScoreTable};
use crate::error::{Error, Result};
use crate::io::HierarchyCache;
use crate::pipeline::ImageCase;
use crate::stochastic::HierarchySpec;

/// A chosen (hierarchy, cut) pair and its score.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub spec_index: usize,
    pub cut_index: usize,
    pub spec: HierarchySpec,
    pub cut: CutValue,
    /// Summed over the images the selection was made on.
    pub score: f64,
}

/// Model and oracle outcome on one test image.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageOutcome {
    pub image_id: String,
    pub model_score: f64,
    pub oracle: Selection,
}

impl ImageOutcome {
    pub fn error(&self) -> f64 {
        self.model_score - self.oracle.score
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelResult {
    pub model: Selection,
    pub images: Vec<ImageOutcome>,
    pub mean_error: f64,
    /// Population standard deviation.
    pub std_error: f64,
}

/// Search space and score shared by training, oracle and evaluation.
#[derive(Clone, Copy)]
pub struct Search<'a, S: ScoreFn + ?Sized> {
    pub specs: &'a [HierarchySpec],
    pub grid: &'a CutGrid,
    pub score: &'a S,
    pub cache: Option<&'a HierarchyCache>,
}

impl<'a, S: ScoreFn + ?Sized> Search<'a, S> {
    pub fn new(specs: &'a [HierarchySpec], grid: &'a CutGrid, score: &'a S) -> Self {
        Self {
            specs,
            grid,
            score,
            cache: None,
        }
    }

    pub fn with_cache(mut self, cache: &'a HierarchyCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn tables(&self, cases: &[ImageCase]) -> Result<Vec<ScoreTable>> {
        score_tables(cases, self.specs, self.grid, self.score, self.cache)
    }

    pub fn train_model(&self, train: &[ImageCase]) -> Result<Selection> {
        if train.is_empty() {
            return Err(Error::Config("training set is empty".into()));
        }
        select(&self.tables(train)?, self.specs, self.grid)
    }

    pub fn oracle(&self, case: &ImageCase) -> Result<Selection> {
        let table = score_table(case, self.specs, self.grid, self.score, self.cache)?;
        select(std::slice::from_ref(&table), self.specs, self.grid)
    }

    pub fn evaluate(&self, test: &[ImageCase], model: &Selection) -> Result<ModelResult> {
        if test.is_empty() {
            return Err(Error::Config("test set is empty".into()));
        }
        evaluate_tables(&self.tables(test)?, model, self.specs, self.grid)
    }
}

/// Argmin of `(spec, cut)` over the summed tables. Ties go to the earlier
/// spec, then to the earlier (smaller) cut.
pub fn select(tables: &[ScoreTable], specs: &[HierarchySpec], grid: &CutGrid) -> Result<Selection> {
    let first = tables
        .first()
        .ok_or_else(|| Error::Config("no images to select on".into()))?;
    let (n_specs, n_cuts) = (first.n_specs(), first.n_cuts());
    if n_specs != specs.len() || n_cuts != grid.len() {
        return Err(Error::Dimension(format!(
            "score table is {n_specs}x{n_cuts}, search space is {}x{}",
            specs.len(),
            grid.len()
        )));
    }
    if let Some(t) = tables
        .iter()
        .find(|t| (t.n_specs(), t.n_cuts()) != (n_specs, n_cuts))
    {
        return Err(Error::Dimension(format!(
            "score table of `{}` has a different shape",
            t.image_id()
        )));
    }
    let mut best: Option<(usize, usize, f64)> = None;
    for (s, spec) in specs.iter().enumerate() {
        for c in 0..n_cuts {
            let total: f64 = tables.iter().map(|t| t.get(s, c)).sum();
            if total.is_nan() {
                return Err(Error::InvalidParameter(format!(
                    "score of {} at {} is NaN",
                    spec,
                    grid.value(c)
                )));
            }
            if best.is_none_or(|(_, _, b)| total < b) {
                best = Some((s, c, total));
            }
        }
    }
    let (s, c, score) = best.expect("non-empty table");
    Ok(Selection {
        spec_index: s,
        cut_index: c,
        spec: specs[s].clone(),
        cut: grid.value(c),
        score,
    })
}

/// Per-image model score against the per-image oracle.
pub fn evaluate_tables(
    tables: &[ScoreTable],
    model: &Selection,
    specs: &[HierarchySpec],
    grid: &CutGrid,
) -> Result<ModelResult> {
    if tables.is_empty() {
        return Err(Error::Config("test set is empty".into()));
    }
    let mut images = Vec::with_capacity(tables.len());
    for t in tables {
        let oracle = select(std::slice::from_ref(t), specs, grid)?;
        images.push(ImageOutcome {
            image_id: t.image_id().to_string(),
            model_score: t.get(model.spec_index, model.cut_index),
            oracle,
        });
    }
    let errors: Vec<f64> = images.iter().map(ImageOutcome::error).collect();
    let (mean_error, std_error) = mean_std(&errors);
    Ok(ModelResult {
        model: model.clone(),
        images,
        mean_error,
        std_error,
    })
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn train_model<S: ScoreFn + ?Sized>(
    train: &[ImageCase],
    specs: &[HierarchySpec],
    grid: &CutGrid,
    score: &S,
) -> Result<Selection> {
    Search::new(specs, grid, score).train_model(train)
}

pub fn oracle<S: ScoreFn + ?Sized>(
    case: &ImageCase,
    specs: &[HierarchySpec],
    grid: &CutGrid,
    score: &S,
) -> Result<Selection> {
    Search::new(specs, grid, score).oracle(case)
}

pub fn evaluate<S: ScoreFn + ?Sized>(
    test: &[ImageCase],
    model: &Selection,
    specs: &[HierarchySpec],
    grid: &CutGrid,
    score: &S,
) -> Result<ModelResult> {
    Search::new(specs, grid, score).evaluate(test, model)
}

pub const CSV_HEADER: [&str; 8] = [
    "image_id",
    "model_spec",
    "model_cut",
    "model_score",
    "oracle_spec",
    "oracle_cut",
    "oracle_score",
    "error",
];

impl ModelResult {
    /// One row per test image, then `mean` and `std` rows aggregating the
    /// score and error columns.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        let spec = self.model.spec.canonical();
        let cut = self.model.cut.to_string();
        for im in &self.images {
            w.write_record([
                im.image_id.clone(),
                spec.clone(),
                cut.clone(),
                im.model_score.to_string(),
                im.oracle.spec.canonical(),
                im.oracle.cut.to_string(),
                im.oracle.score.to_string(),
                im.error().to_string(),
            ])?;
        }
        let model: Vec<f64> = self.images.iter().map(|i| i.model_score).collect();
        let oracle: Vec<f64> = self.images.iter().map(|i| i.oracle.score).collect();
        let (mm, ms) = mean_std(&model);
        let (om, os) = mean_std(&oracle);
        for (label, m, o, e) in [
            ("mean", mm, om, self.mean_error),
            ("std", ms, os, self.std_error),
        ] {
            w.write_record([
                label.to_string(),
                spec.clone(),
                cut.clone(),
                m.to_string(),
                String::new(),
                String::new(),
                o.to_string(),
                e.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}
