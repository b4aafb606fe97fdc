//! Experiment drivers: the reference reproduction run and the trade-off sweep.

mod report;
mod reproduce;
mod sweep;

pub use report::{to_sorted_json, write_json};
pub use reproduce::{
    reproduce_paper, run_reproduction, DatasetStudy, DatasetSummary, GroupSummary, MethodResult,
    Reproduction, SkewRow, Transform, DEFAULT_BINS,
};
pub use sweep::{run_tradeoff_sweep, sweep, sweep_datasets, ExperimentConfig, ReportRow};
