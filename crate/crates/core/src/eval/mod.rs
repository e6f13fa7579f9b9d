//! Metrics, dataset statistics and the repeated-run evaluation protocol.

pub mod experiment;
pub mod metrics;
pub mod report;
pub mod stats;

use thiserror::Error;

use crate::baselines::BaselineError;
use crate::generator::GenError;

pub use experiment::{evaluate_dataset, run_experiment, EvalReport, ExperimentConfig, SplitReport, Summary};
pub use metrics::{auc, mse};
pub use stats::{describe, DatasetStats};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("length mismatch: {left} predictions vs {right} labels")]
    LengthMismatch { left: usize, right: usize },
    #[error("no predictions")]
    Empty,
    #[error("at least one run is required")]
    NoRuns,
    #[error(transparent)]
    Dataset(#[from] GenError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}
