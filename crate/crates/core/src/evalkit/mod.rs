//! Scoring: accuracy, premise F1, content effect and combined score, with
//! bootstrap intervals, the unbiased-model analysis, synthetic relevance
//! data and dataset I/O.

mod bootstrap;
mod io;
mod metrics;
mod synth;
mod unbiased;

use thiserror::Error;

pub use bootstrap::{bootstrap_ci, percentile, DEFAULT_BOOTSTRAP};
pub use io::{emit_report, load_dataset, load_predictions, save_dataset, save_predictions, write_csv};
pub use metrics::{
    accuracy, align, combined_score, content_effect, evaluate, group_accuracies, premise_f1, ContentEffect,
    GroupAccuracies, GroupCounts, Metric, MetricReport, Scored,
};
pub use synth::{content_tokens, synthesize_subtask2};
pub use unbiased::{
    ce_significance_threshold, cs_single_flip, expected_ce_closed_form, folded_normal_mean, sensitivity_curve,
    simulate_scatter, simulate_unbiased_ce, summarize_simulation, ScatterPoint, SensitivityPoint, SimulationRow,
    SingleFlip, ThresholdRow, Trial, UnbiasedModelSpec,
};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}:{line}: {message}")]
    Schema { path: String, line: usize, message: String },
    #[error("predictions and gold do not align: {0}")]
    IdMismatch(String),
    #[error("missing labels: {0}")]
    MissingLabels(String),
    #[error("no samples in group {0}")]
    EmptyGroup(&'static str),
    #[error("pool has too few related premises for `{id}` (need {needed}, found {found})")]
    InsufficientPool { id: String, needed: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
