#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::module_inception)]

pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod pipeline;
pub mod pixel;
pub mod scoring;
pub mod select;
pub mod stochastic;
pub mod synthetic;

pub use error::{Error, Result};
pub use experiment::Experiment;
pub use pipeline::{ImageCase, PipelineOptions};
