use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{cut_at, cut_to_k, IndexedHierarchy, Partition};

pub const DEFAULT_LEVELS: usize = 64;

/// Cut parameters searched for every hierarchy.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CutGrid {
    /// `levels` evenly spaced thresholds `j / (levels − 1)` on the normalized altitude.
    Threshold { levels: usize },
    /// Fixed region counts, clamped to the number of fine regions.
    Regions { counts: Vec<usize> },
}

impl Default for CutGrid {
    fn default() -> Self {
        CutGrid::Threshold {
            levels: DEFAULT_LEVELS,
        }
    }
}

/// One point of a [`CutGrid`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CutValue {
    Threshold(f64),
    Regions(usize),
}

impl fmt::Display for CutValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutValue::Threshold(t) => write!(f, "t:{t}"),
            CutValue::Regions(k) => write!(f, "k:{k}"),
        }
    }
}

impl FromStr for CutValue {
    type Err = Error;

    /// `k:N`, `t:x`, or a bare threshold.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse cut `{s}`"));
        let s = s.trim();
        if let Some(k) = s.strip_prefix("k:") {
            let k: usize = k.trim().parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(bad());
            }
            return Ok(CutValue::Regions(k));
        }
        let t: f64 = s
            .strip_prefix("t:")
            .unwrap_or(s)
            .trim()
            .parse()
            .map_err(|_| bad())?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(bad());
        }
        Ok(CutValue::Threshold(t))
    }
}

impl CutValue {
    /// Cuts `h`. Thresholds are scaled by the maximum altitude when `normalize`.
    pub fn cut(&self, h: &IndexedHierarchy, normalize: bool) -> Result<Partition> {
        match *self {
            CutValue::Threshold(t) => {
                let lambda = if normalize { t * h.max_altitude() } else { t };
                cut_at(h, lambda)
            }
            CutValue::Regions(k) => cut_to_k(h, k.clamp(1, h.n_leaves())),
        }
    }
}

impl CutGrid {
    /// Sorted, deduplicated region counts.
    pub fn regions(counts: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut counts: Vec<usize> = counts.into_iter().collect();
        counts.sort_unstable();
        counts.dedup();
        let grid = CutGrid::Regions { counts };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CutGrid::Threshold { levels } if *levels < 2 => Err(Error::Config(format!(
                "threshold grid needs at least 2 levels, got {levels}"
            ))),
            CutGrid::Regions { counts } if counts.is_empty() => {
                Err(Error::Config("region-count grid is empty".into()))
            }
            CutGrid::Regions { counts } if counts.contains(&0) => {
                Err(Error::Config("region counts must be >= 1".into()))
            }
            CutGrid::Regions { counts } if counts.windows(2).any(|w| w[0] >= w[1]) => Err(
                Error::Config("region counts must be strictly increasing".into()),
            ),
            _ => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            CutGrid::Threshold { levels } => *levels,
            CutGrid::Regions { counts } => counts.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, index: usize) -> CutValue {
        match self {
            CutGrid::Threshold { levels } => {
                CutValue::Threshold(index as f64 / (*levels - 1) as f64)
            }
            CutGrid::Regions { counts } => CutValue::Regions(counts[index]),
        }
    }

    pub fn values(&self) -> impl Iterator<Item = CutValue> + '_ {
        (0..self.len()).map(|i| self.value(i))
    }

    /// Every partition of the grid, in grid order.
    pub fn partitions(&self, h: &IndexedHierarchy, normalize: bool) -> Result<Vec<Partition>> {
        self.values().map(|v| v.cut(h, normalize)).collect()
    }
}
