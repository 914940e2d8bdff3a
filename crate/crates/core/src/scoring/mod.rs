//! Segmentation scores: piecewise-constant Mumford-Shah energy and WHDR.

mod mumford_shah;
mod whdr;

pub use self::mumford_shah::{
    mumford_shah, mumford_shah_terms, partition_ms_terms, MsConfig, MsTerms, DEFAULT_SCALE,
};
pub use self::whdr::{judge, partition_whdr, whdr, Comparison, Darker, JudgmentSet, DEFAULT_DELTA};
