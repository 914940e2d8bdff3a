//! Weighted human disagreement rate over pairwise darker/equal judgments.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Partition, Rag, RegionStats};
use crate::pixel::{check_same_dims, Image, LabelMap};

pub const DEFAULT_DELTA: f64 = 0.10;

/// Which point of a pair is darker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Darker {
    #[serde(rename = "1")]
    First,
    #[serde(rename = "2")]
    Second,
    #[serde(rename = "E")]
    Equal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    /// Pixel coordinates `(x, y)`.
    pub point1: (usize, usize),
    pub point2: (usize, usize),
    pub darker: Darker,
    pub weight: f64,
}

/// Human judgments for one image.
#[derive(Clone, Debug, PartialEq)]
pub struct JudgmentSet {
    pub comparisons: Vec<Comparison>,
    /// Relative difference below which two reflectances count as equal.
    pub delta: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointId {
    Int(i64),
    Str(String),
}

impl PointId {
    fn key(&self) -> String {
        match self {
            PointId::Int(i) => i.to_string(),
            PointId::Str(s) => s.clone(),
        }
    }
}

#[derive(Deserialize)]
struct JudgmentPoint {
    id: PointId,
    x_rel: f64,
    y_rel: f64,
}

#[derive(Deserialize)]
struct JudgmentComparison {
    p1: PointId,
    p2: PointId,
    darker: Darker,
    weight: f64,
}

#[derive(Deserialize)]
struct JudgmentFile {
    points: Vec<JudgmentPoint>,
    comparisons: Vec<JudgmentComparison>,
}

/// Algorithm answer for two reflectances: `2 darker` when `r1 > (1+δ)·r2`,
/// `1 darker` when `r2 > (1+δ)·r1`, `equal` otherwise. A zero reflectance
/// facing a positive one is the darker side.
pub fn judge(r1: f64, r2: f64, delta: f64) -> Darker {
    if r1 > (1.0 + delta) * r2 {
        Darker::Second
    } else if r2 > (1.0 + delta) * r1 {
        Darker::First
    } else {
        Darker::Equal
    }
}

impl JudgmentSet {
    pub fn new(comparisons: Vec<Comparison>, delta: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta {delta} must be >= 0"
            )));
        }
        if let Some(c) = comparisons
            .iter()
            .find(|c| !(c.weight > 0.0) || !c.weight.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "judgment weight {} must be positive",
                c.weight
            )));
        }
        Ok(Self { comparisons, delta })
    }

    /// Parses the JSON judgment format, mapping relative coordinates onto a
    /// `width × height` pixel grid.
    pub fn from_json(text: &str, width: usize, height: usize, delta: f64) -> Result<Self> {
        let file: JudgmentFile =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("judgments: {e}")))?;
        let to_pixel = |rel: f64, size: usize| -> Result<usize> {
            if !(0.0..=1.0).contains(&rel) {
                return Err(Error::Format(format!(
                    "relative coordinate {rel} outside [0, 1]"
                )));
            }
            Ok(((rel * size as f64).floor() as usize).min(size - 1))
        };
        let mut points = HashMap::new();
        for p in &file.points {
            let xy = (to_pixel(p.x_rel, width)?, to_pixel(p.y_rel, height)?);
            points.insert(p.id.key(), xy);
        }
        let lookup = |id: &PointId| {
            points
                .get(&id.key())
                .copied()
                .ok_or_else(|| Error::Format(format!("unknown point id `{}`", id.key())))
        };
        let comparisons = file
            .comparisons
            .iter()
            .map(|c| {
                Ok(Comparison {
                    point1: lookup(&c.p1)?,
                    point2: lookup(&c.p2)?,
                    darker: c.darker,
                    weight: c.weight,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(comparisons, delta)
    }

    pub fn load(path: impl AsRef<Path>, width: usize, height: usize, delta: f64) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, width, height, delta).map_err(|e| match e {
            Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn check_points(&self, width: usize, height: usize) -> Result<()> {
        if self.comparisons.is_empty() {
            return Err(Error::InvalidParameter("judgment set is empty".into()));
        }
        let inside = |(x, y): (usize, usize)| x < width && y < height;
        if let Some(c) = self
            .comparisons
            .iter()
            .find(|c| !inside(c.point1) || !inside(c.point2))
        {
            return Err(Error::Dimension(format!(
                "judgment points {:?}, {:?} outside {width}x{height}",
                c.point1, c.point2
            )));
        }
        Ok(())
    }

    /// Weighted share of judgments contradicted by `reflectance(point)`.
    fn disagreement(&self, reflectance: impl Fn((usize, usize)) -> f64) -> Result<f64> {
        let mut total = 0.0;
        let mut wrong = 0.0;
        for c in &self.comparisons {
            total += c.weight;
            if judge(reflectance(c.point1), reflectance(c.point2), self.delta) != c.darker {
                wrong += c.weight;
            }
        }
        if !(total > 0.0) {
            return Err(Error::InvalidParameter(
                "judgment weights sum to zero".into(),
            ));
        }
        Ok(wrong / total)
    }
}

/// WHDR of a segmentation whose reflectance is the mean luminance of each region.
pub fn whdr(img: &Image, seg: &LabelMap, judgments: &JudgmentSet) -> Result<f64> {
    check_same_dims(
        "image vs segmentation",
        (img.width(), img.height()),
        (seg.width(), seg.height()),
    )?;
    judgments.check_points(img.width(), img.height())?;
    let mut stats = vec![RegionStats::default(); seg.n_regions()];
    for (p, &l) in seg.labels().iter().enumerate() {
        let s = &mut stats[l as usize];
        s.area += 1;
        for (c, &v) in img.pixel(p).iter().enumerate() {
            s.sum[c] += v;
        }
    }
    let means: Vec<f64> = stats
        .iter()
        .map(|s| s.mean_luminance(img.channels()))
        .collect();
    judgments.disagreement(|(x, y)| means[seg.get(x, y) as usize])
}

/// WHDR of a partition of the RAG's fine regions.
pub fn partition_whdr(
    rag: &Rag,
    fine: &LabelMap,
    partition: &Partition,
    judgments: &JudgmentSet,
) -> Result<f64> {
    judgments.check_points(fine.width(), fine.height())?;
    let mut stats = vec![RegionStats::default(); partition.n_regions];
    for (leaf, &l) in partition.labels.iter().enumerate() {
        stats[l as usize].merge(&rag.regions()[leaf]);
    }
    let means: Vec<f64> = stats
        .iter()
        .map(|s| s.mean_luminance(rag.channels()))
        .collect();
    judgments.disagreement(|(x, y)| means[partition.labels[fine.get(x, y) as usize] as usize])
}
