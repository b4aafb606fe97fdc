//! Fairness/accuracy trade-off laboratory.
//!
//! Generates two-group synthetic datasets with controlled disparities, applies
//! pre-processing repairs (quantile repair, reweighing, FairBalance and
//! prototype-based fair representations), measures group skew and group
//! fairness metrics before and after repair, and quantifies what a classifier
//! trained on repaired data loses when it is tested on untouched data.
//!
//! ```
//! use fairlab::{dataset, metrics, repair};
//!
//! let data = dataset::generate(&dataset::DatasetSpec::d1(7)).unwrap();
//! let repaired = repair::dir_repair(&data, 1.0).unwrap();
//! let before = metrics::group_skew(&data).unwrap();
//! let after = metrics::group_skew(&repaired).unwrap();
//! assert!(after < 0.01 * before);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod repair;
pub mod rng;

pub use dataset::{Dataset, DatasetSpec, GroupSpec, Record, SplitPair};
pub use error::{Error, Result};
pub use metrics::{HistogramData, MetricsReport};
pub use model::{FitConfig, LogisticModel};
pub use repair::{LfrModel, LfrParams, RepairConfig};
