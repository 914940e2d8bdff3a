use crate::error::{Error, Result};
use crate::graph::Partition;
use crate::pipeline::ImageCase;
use crate::scoring::{partition_ms_terms, partition_whdr, MsConfig, DEFAULT_DELTA};

/// A segmentation quality score; lower is better.
pub trait ScoreFn: Sync {
    fn score(&self, case: &ImageCase, partition: &Partition) -> Result<f64>;
}

impl<F> ScoreFn for F
where
    F: Fn(&ImageCase, &Partition) -> Result<f64> + Sync,
{
    fn score(&self, case: &ImageCase, partition: &Partition) -> Result<f64> {
        self(case, partition)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScoreKind {
    /// Mumford-Shah energy with contour weight `s`.
    Ms {
        #[serde(default = "default_scale")]
        s: f64,
    },
    /// WHDR against each image's judgments; `delta` is applied when loading them.
    Whdr {
        #[serde(default = "default_delta")]
        delta: f64,
    },
}

fn default_scale() -> f64 {
    MsConfig::default().s
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

impl Default for ScoreKind {
    fn default() -> Self {
        ScoreKind::Ms { s: default_scale() }
    }
}

impl ScoreKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ScoreKind::Ms { s } if !(s >= 0.0 && s.is_finite()) => Err(Error::Config(format!(
                "ms scale must be finite and >= 0, got {s}"
            ))),
            ScoreKind::Whdr { delta } if !(delta >= 0.0 && delta.is_finite()) => Err(
                Error::Config(format!("whdr delta must be finite and >= 0, got {delta}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn needs_judgments(&self) -> bool {
        matches!(self, ScoreKind::Whdr { .. })
    }
}

impl ScoreFn for ScoreKind {
    fn score(&self, case: &ImageCase, partition: &Partition) -> Result<f64> {
        match *self {
            ScoreKind::Ms { s } => {
                Ok(partition_ms_terms(case.rag(), partition).energy(&MsConfig { s }))
            }
            ScoreKind::Whdr { .. } => {
                let judgments = case.judgments().ok_or_else(|| {
                    Error::Config(format!(
                        "image `{}` has no judgments for whdr scoring",
                        case.id()
                    ))
                })?;
                partition_whdr(case.rag(), case.fine(), partition, judgments)
            }
        }
    }
}
