use std::collections::HashMap;

use rayon::prelude::*;

use super::grid::CutGrid;
use super::score::ScoreFn;
use crate::error::{Error, Result};
use crate::graph::IndexedHierarchy;
use crate::io::HierarchyCache;
use crate::pipeline::ImageCase;
use crate::stochastic::{sws_reweight, HierarchySpec};

/// Scores of one image for every (spec, cut) pair, spec-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable {
    image_id: String,
    n_specs: usize,
    n_cuts: usize,
    scores: Vec<f64>,
}

impl ScoreTable {
    pub fn from_rows(image_id: impl Into<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_specs = rows.len();
        let n_cuts = rows.first().map_or(0, Vec::len);
        if n_specs == 0 || n_cuts == 0 || rows.iter().any(|r| r.len() != n_cuts) {
            return Err(Error::Dimension(
                "score table must be a non-empty rectangle".into(),
            ));
        }
        Ok(Self {
            image_id: image_id.into(),
            n_specs,
            n_cuts,
            scores: rows.into_iter().flatten().collect(),
        })
    }

    pub fn image_id(&self) -> &str {
        &self.image_id
    }

    pub fn n_specs(&self) -> usize {
        self.n_specs
    }

    pub fn n_cuts(&self) -> usize {
        self.n_cuts
    }

    pub fn get(&self, spec: usize, cut: usize) -> f64 {
        self.scores[spec * self.n_cuts + cut]
    }

    pub fn row(&self, spec: usize) -> &[f64] {
        &self.scores[spec * self.n_cuts..(spec + 1) * self.n_cuts]
    }
}

/// Builds the hierarchy of `spec` for one image, reusing the hierarchy of
/// its inner chain when given.
fn build(
    case: &ImageCase,
    spec: &HierarchySpec,
    inner: Option<&IndexedHierarchy>,
    cache: Option<&HierarchyCache>,
) -> Result<IndexedHierarchy> {
    let compute = || {
        let (mut h, done) = match inner {
            Some(h) => (h.clone(), spec.depth() - 1),
            None => (case.base().clone(), 0),
        };
        for op in &spec.ops()[done..] {
            h = sws_reweight(&h, op)?;
        }
        Ok(h)
    };
    if spec.is_base() {
        return Ok(case.base().clone());
    }
    match cache {
        Some(c) => c.get_or_build(case, spec, compute),
        None => compute(),
    }
}

/// Every hierarchy of `specs` for one image, in spec order. Depth-2 chains
/// share the build of their inner operator.
pub fn build_hierarchies(
    case: &ImageCase,
    specs: &[HierarchySpec],
    cache: Option<&HierarchyCache>,
) -> Result<Vec<IndexedHierarchy>> {
    let mut out = Vec::with_capacity(specs.len());
    for_each_hierarchy(case, specs, cache, |_, h| Ok(h.clone()), &mut out)?;
    Ok(out)
}

fn for_each_hierarchy<T: Send>(
    case: &ImageCase,
    specs: &[HierarchySpec],
    cache: Option<&HierarchyCache>,
    f: impl Fn(&HierarchySpec, &IndexedHierarchy) -> Result<T> + Sync,
    out: &mut Vec<T>,
) -> Result<()> {
    let mut inner_specs: Vec<HierarchySpec> = Vec::new();
    for spec in specs.iter().filter(|s| s.depth() >= 2) {
        let p = spec.prefix(spec.depth() - 1);
        if !inner_specs.contains(&p) {
            inner_specs.push(p);
        }
    }
    let inner: Vec<Result<IndexedHierarchy>> = inner_specs
        .par_iter()
        .map(|s| build(case, s, None, cache))
        .collect();
    let mut memo = HashMap::with_capacity(inner.len());
    for (s, h) in inner_specs.iter().zip(inner) {
        memo.insert(s.canonical(), h?);
    }
    let results: Vec<Result<T>> = specs
        .par_iter()
        .map(|spec| {
            if let Some(h) = memo.get(&spec.canonical()) {
                return f(spec, h);
            }
            let inner = if spec.depth() >= 2 {
                memo.get(&spec.prefix(spec.depth() - 1).canonical())
            } else {
                None
            };
            f(spec, &build(case, spec, inner, cache)?)
        })
        .collect();
    for r in results {
        out.push(r?);
    }
    Ok(())
}

/// Scores every (spec, cut) pair for one image. Base hierarchies are cut on
/// altitudes normalized by their maximum; re-weighted ones already lie in [0, 1].
pub fn score_table<S: ScoreFn + ?Sized>(
    case: &ImageCase,
    specs: &[HierarchySpec],
    grid: &CutGrid,
    score: &S,
    cache: Option<&HierarchyCache>,
) -> Result<ScoreTable> {
    let run = || -> Result<ScoreTable> {
        if specs.is_empty() {
            return Err(Error::Config("spec set is empty".into()));
        }
        grid.validate()?;
        let mut rows = Vec::with_capacity(specs.len());
        for_each_hierarchy(
            case,
            specs,
            cache,
            |spec, h| {
                grid.partitions(h, spec.is_base())?
                    .iter()
                    .map(|p| score.score(case, p))
                    .collect::<Result<Vec<f64>>>()
            },
            &mut rows,
        )?;
        ScoreTable::from_rows(case.id(), rows)
    };
    run().map_err(|e| match e {
        e @ Error::Image { .. } => e,
        e => Error::for_image(case.id(), e),
    })
}

/// Score tables of several images, in input order; the first failing image
/// (in input order) aborts the run.
pub fn score_tables<S: ScoreFn + ?Sized>(
    cases: &[ImageCase],
    specs: &[HierarchySpec],
    grid: &CutGrid,
    score: &S,
    cache: Option<&HierarchyCache>,
) -> Result<Vec<ScoreTable>> {
    let results: Vec<Result<ScoreTable>> = cases
        .par_iter()
        .map(|c| score_table(c, specs, grid, score, cache))
        .collect();
    results.into_iter().collect()
}
