//! Metrics, cross-validation splits and hyper-parameter search.

mod grid;
mod kfold;
mod metrics;

pub use grid::{grid_search, grid_search_with, CvRow, GridResult, GridSpec};
pub use kfold::{kfold_split, Fold, FoldMode};
pub use metrics::{f1_favor_against, ConfusionMatrix, EvalReport};
