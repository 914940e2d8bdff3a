//! Exhaustive (hierarchy, cut) search: trained model, per-image oracle and
//! the error between them.

mod grid;
mod model;
mod score;
mod table;

pub use self::grid::{CutGrid, CutValue, DEFAULT_LEVELS};
pub use self::model::{
    evaluate, evaluate_tables, mean_std, oracle, select, train_model, ImageOutcome, ModelResult,
    Search, Selection, CSV_HEADER,
};
pub use self::score::{ScoreFn, ScoreKind};
pub use self::table::{build_hierarchies, score_table, score_tables, ScoreTable};
