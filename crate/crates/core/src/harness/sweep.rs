//! Train-on-repaired, test-on-original trade-off sweep.
//!
//! For every `(dataset, repair)` pair the original data is split once, the
//! repair is fitted on the training partition only, and two classifiers are
//! trained: one on the untouched training partition and one on its repaired
//! version. Both are scored on the untouched test partition; the repaired one
//! is also scored on a "curated" test partition that went through the same
//! repair.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{csv_table, fmt_opt, write_json, write_text};
use crate::dataset::{generate, resample_by_weight, split, Dataset, DatasetSpec, SplitPair};
use crate::error::{Error, Result};
use crate::metrics::{self, MetricsReport};
use crate::model::{fit_logistic, predict, FitConfig};
use crate::repair::{lfr_transform, RepairConfig};
use crate::rng::derive_seed;

const THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// `None` selects D1–D3 seeded from `master_seed`.
    #[serde(default)]
    pub datasets: Option<Vec<DatasetSpec>>,
    pub repairs: Vec<RepairConfig>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default)]
    pub fit: FitConfig,
}

fn default_test_fraction() -> f64 {
    0.2
}

fn default_bins() -> usize {
    super::reproduce::DEFAULT_BINS
}

impl ExperimentConfig {
    pub fn new(repairs: Vec<RepairConfig>, master_seed: u64) -> Self {
        Self {
            datasets: None,
            repairs,
            master_seed,
            test_fraction: default_test_fraction(),
            bins: default_bins(),
            fit: FitConfig::default(),
        }
    }

    pub fn dataset_specs(&self) -> Vec<DatasetSpec> {
        self.datasets
            .clone()
            .unwrap_or_else(|| DatasetSpec::reference_set(self.master_seed))
    }

    pub fn validate(&self) -> Result<()> {
        if self.repairs.is_empty() {
            return Err(Error::InvalidConfig("repairs list is empty".into()));
        }
        if matches!(&self.datasets, Some(d) if d.is_empty()) {
            return Err(Error::InvalidConfig("datasets list is empty".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "test_fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        if self.bins == 0 {
            return Err(Error::InvalidConfig("bins must be at least 1".into()));
        }
        for spec in self.dataset_specs() {
            spec.validate()
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", spec.name)))?;
        }
        for r in &self.repairs {
            r.validate()
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", r.label())))?;
        }
        self.fit
            .validate()
            .map_err(|e| Error::InvalidConfig(format!("fit: {e}")))
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }
}

/// One `(dataset, repair)` combination. Numeric fields are `None` when the row
/// failed; `error` then carries the reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub dataset: String,
    pub repair: String,
    pub repair_config: RepairConfig,
    /// Phi coefficient of the full original dataset.
    pub phi_original: Option<f64>,
    /// Dataset metrics of the untouched training partition, plus accuracy and
    /// equalized-odds gap of the original-trained model on the untouched test
    /// partition.
    pub metrics_original: Option<MetricsReport>,
    /// Dataset metrics of the repaired training partition (weights
    /// materialized by resampling), plus accuracy and equalized-odds gap of
    /// the repaired-trained model on the untouched test partition.
    pub metrics_transformed: Option<MetricsReport>,
    /// Per-group Wasserstein distance between original and repaired training
    /// values, summed over groups. Weight-only repairs are measured on the
    /// reweighted distribution.
    pub distortion: Option<f64>,
    pub accuracy_original_model: Option<f64>,
    pub accuracy_on_original_test: Option<f64>,
    pub accuracy_on_transformed_test: Option<f64>,
    pub eo_gap_original_model: Option<f64>,
    pub eo_gap_of_predictions: Option<f64>,
    pub prediction_spd_original_model: Option<f64>,
    pub prediction_spd: Option<f64>,
    pub error: Option<String>,
}

impl ReportRow {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// Per-dataset state shared by all rows of that dataset.
struct Baseline {
    spec: DatasetSpec,
    phi: Option<f64>,
    split: SplitPair,
    pred: Vec<u8>,
}

impl Baseline {
    fn build(spec: DatasetSpec, index: u64, cfg: &ExperimentConfig) -> Result<Self> {
        let data = generate(&spec)?;
        let phi = metrics::phi_coefficient(&data).ok();
        let split = split(
            &data,
            cfg.test_fraction,
            derive_seed(cfg.master_seed, 1000 + index),
        )?;
        let model = fit_logistic(&split.train, &cfg.fit)?;
        let pred = predict(&model, &split.test, THRESHOLD)?;
        Ok(Self {
            spec,
            phi,
            split,
            pred,
        })
    }
}

struct RowValues {
    materialized_train: Dataset,
    metrics_original: MetricsReport,
    metrics_transformed: MetricsReport,
    distortion: f64,
    accuracy_original_model: f64,
    accuracy_on_original_test: f64,
    accuracy_on_transformed_test: f64,
    eo_gap_original_model: Option<f64>,
    eo_gap_of_predictions: Option<f64>,
    prediction_spd_original_model: Option<f64>,
    prediction_spd: Option<f64>,
}

fn evaluate_row(
    base: &Baseline,
    repair: &RepairConfig,
    row_seed: u64,
    cfg: &ExperimentConfig,
) -> Result<RowValues> {
    let train = &base.split.train;
    let test = &base.split.test;
    let repaired = repair.apply(train)?;

    // Weighted methods train on weights; every method is measured on data.
    let model = fit_logistic(&repaired.data, &cfg.fit)?;
    let materialized_train = if repair.is_weighting() {
        resample_by_weight(&repaired.data, derive_seed(row_seed, 1))?
    } else {
        repaired.data.clone()
    };

    let curated_test = match (&repaired.model, repair) {
        (Some(lfr), RepairConfig::Lfr(params)) => lfr_transform(lfr, test, params.threshold)?,
        _ => repair.materialize(test, derive_seed(row_seed, 2))?.data,
    };

    let pred = predict(&model, test, THRESHOLD)?;
    let curated_pred = predict(&model, &curated_test, THRESHOLD)?;
    let groups = test.groups();

    Ok(RowValues {
        metrics_original: MetricsReport::for_dataset(train).with_predictions(test, &base.pred),
        metrics_transformed: MetricsReport::for_dataset(&materialized_train)
            .with_predictions(test, &pred),
        distortion: metrics::distortion(train, &repaired.data)?,
        accuracy_original_model: metrics::accuracy(&test.outcomes(), &base.pred)?,
        accuracy_on_original_test: metrics::accuracy(&test.outcomes(), &pred)?,
        accuracy_on_transformed_test: metrics::accuracy(&curated_test.outcomes(), &curated_pred)?,
        eo_gap_original_model: metrics::equalized_odds_gap(&test.outcomes(), &base.pred, &groups)
            .ok(),
        eo_gap_of_predictions: metrics::equalized_odds_gap(&test.outcomes(), &pred, &groups).ok(),
        prediction_spd_original_model: metrics::prediction_parity_difference(&base.pred, &groups)
            .ok(),
        prediction_spd: metrics::prediction_parity_difference(&pred, &groups).ok(),
        materialized_train,
    })
}

fn row(
    base: &Baseline,
    repair: &RepairConfig,
    result: Result<RowValues>,
) -> (ReportRow, Option<Dataset>) {
    let mut row = ReportRow {
        dataset: base.spec.name.clone(),
        repair: repair.label(),
        repair_config: repair.clone(),
        phi_original: base.phi,
        metrics_original: None,
        metrics_transformed: None,
        distortion: None,
        accuracy_original_model: None,
        accuracy_on_original_test: None,
        accuracy_on_transformed_test: None,
        eo_gap_original_model: None,
        eo_gap_of_predictions: None,
        prediction_spd_original_model: None,
        prediction_spd: None,
        error: None,
    };
    let mut materialized = None;
    match result {
        Ok(v) => {
            materialized = Some(v.materialized_train);
            row.metrics_original = Some(v.metrics_original);
            row.metrics_transformed = Some(v.metrics_transformed);
            row.distortion = Some(v.distortion);
            row.accuracy_original_model = Some(v.accuracy_original_model);
            row.accuracy_on_original_test = Some(v.accuracy_on_original_test);
            row.accuracy_on_transformed_test = Some(v.accuracy_on_transformed_test);
            row.eo_gap_original_model = v.eo_gap_original_model;
            row.eo_gap_of_predictions = v.eo_gap_of_predictions;
            row.prediction_spd_original_model = v.prediction_spd_original_model;
            row.prediction_spd = v.prediction_spd;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    (row, materialized)
}

/// Runs every `(dataset, repair)` combination; rows are ordered by dataset,
/// then repair, regardless of execution order.
///
/// A failing dataset (generation, split or baseline fit) or repair marks its
/// rows as failed without aborting the others.
pub fn sweep(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    Ok(sweep_detailed(cfg)?.rows)
}

/// Sweep rows plus the data needed to draw their histograms.
struct SweepRun {
    rows: Vec<ReportRow>,
    /// Original training partition per dataset (None if the dataset failed).
    originals: Vec<(String, Option<Dataset>)>,
    /// Materialized repaired training partition per row.
    transformed: Vec<Option<Dataset>>,
}

fn sweep_detailed(cfg: &ExperimentConfig) -> Result<SweepRun> {
    cfg.validate()?;
    let specs = cfg.dataset_specs();
    let baselines: Vec<(DatasetSpec, Result<Baseline, String>)> = specs
        .into_par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let base = Baseline::build(spec.clone(), i as u64, cfg).map_err(|e| e.to_string());
            (spec, base)
        })
        .collect();

    let jobs: Vec<(usize, usize)> = (0..baselines.len())
        .flat_map(|i| (0..cfg.repairs.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<(ReportRow, Option<Dataset>)> = jobs
        .into_par_iter()
        .map(|(i, j)| {
            let repair = &cfg.repairs[j];
            let (spec, base) = &baselines[i];
            match base {
                Ok(base) => {
                    let row_seed =
                        derive_seed(derive_seed(cfg.master_seed, 2000 + i as u64), j as u64);
                    row(base, repair, evaluate_row(base, repair, row_seed, cfg))
                }
                Err(e) => (failed_dataset_row(spec, repair, e), None),
            }
        })
        .collect();
    let originals = baselines
        .into_iter()
        .map(|(spec, base)| (spec.name, base.ok().map(|b| b.split.train)))
        .collect();
    let (rows, transformed) = results.into_iter().unzip();
    Ok(SweepRun {
        rows,
        originals,
        transformed,
    })
}

fn failed_dataset_row(spec: &DatasetSpec, repair: &RepairConfig, error: &str) -> ReportRow {
    ReportRow {
        dataset: spec.name.clone(),
        repair: repair.label(),
        repair_config: repair.clone(),
        phi_original: None,
        metrics_original: None,
        metrics_transformed: None,
        distortion: None,
        accuracy_original_model: None,
        accuracy_on_original_test: None,
        accuracy_on_transformed_test: None,
        eo_gap_original_model: None,
        eo_gap_of_predictions: None,
        prediction_spd_original_model: None,
        prediction_spd: None,
        error: Some(error.to_string()),
    }
}

/// Runs the sweep and writes `sweep.json`, `sweep.csv` and training-partition
/// histograms (`hist/<dataset>/<transform>/<group>.json`) under `out_dir`.
pub fn run_tradeoff_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<ReportRow>> {
    let run = sweep_detailed(cfg)?;
    write_json(&out_dir.join("sweep.json"), &run.rows)?;
    write_text(&out_dir.join("sweep.csv"), &sweep_csv(&run.rows))?;
    let per_dataset = cfg.repairs.len();
    for (i, (name, original)) in run.originals.iter().enumerate() {
        let Some(original) = original else { continue };
        let rows = i * per_dataset..(i + 1) * per_dataset;
        let mut named: Vec<(String, &Dataset)> = vec![("original".into(), original)];
        for (repair, data) in cfg.repairs.iter().zip(&run.transformed[rows]) {
            if let Some(d) = data {
                named.push((repair.slug(), d));
            }
        }
        let range = value_range(named.iter().map(|(_, d)| *d));
        for (slug, data) in &named {
            for g in original.group_counts().keys() {
                let h = metrics::group_histogram(data, *g, cfg.bins, range)?;
                let path = out_dir
                    .join("hist")
                    .join(name)
                    .join(slug)
                    .join(format!("{g}.json"));
                write_json(&path, &h)?;
            }
        }
    }
    Ok(run.rows)
}

fn value_range<'a>(data: impl Iterator<Item = &'a Dataset>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for d in data {
        for r in d.records() {
            lo = lo.min(r.v);
            hi = hi.max(r.v);
        }
    }
    if lo < hi {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn sweep_csv(rows: &[ReportRow]) -> String {
    let lines: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let gs = |m: &Option<MetricsReport>| fmt_opt(m.as_ref().and_then(|m| m.group_skew));
            vec![
                r.dataset.clone(),
                r.repair.clone(),
                fmt_opt(r.phi_original),
                gs(&r.metrics_original),
                gs(&r.metrics_transformed),
                fmt_opt(r.distortion),
                fmt_opt(r.accuracy_original_model),
                fmt_opt(r.accuracy_on_original_test),
                fmt_opt(r.accuracy_on_transformed_test),
                fmt_opt(r.eo_gap_original_model),
                fmt_opt(r.eo_gap_of_predictions),
                fmt_opt(r.prediction_spd_original_model),
                fmt_opt(r.prediction_spd),
                r.error.clone().unwrap_or_default().replace(',', ";"),
            ]
        })
        .collect();
    csv_table(
        &[
            "dataset",
            "repair",
            "phi_original",
            "group_skew_original",
            "group_skew_transformed",
            "distortion",
            "accuracy_original_model",
            "accuracy_on_original_test",
            "accuracy_on_transformed_test",
            "eo_gap_original_model",
            "eo_gap_of_predictions",
            "prediction_spd_original_model",
            "prediction_spd",
            "error",
        ],
        &lines,
    )
}

/// Convenience used by examples and tests: a sweep over explicit datasets.
pub fn sweep_datasets(
    datasets: Vec<DatasetSpec>,
    repairs: Vec<RepairConfig>,
    master_seed: u64,
) -> Result<Vec<ReportRow>> {
    let cfg = ExperimentConfig {
        datasets: Some(datasets),
        ..ExperimentConfig::new(repairs, master_seed)
    };
    sweep(&cfg)
}
