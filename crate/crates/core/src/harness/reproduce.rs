//! Dataset overview, per-method group skew tables and histogram data for
//! D1–D3 under every reference repair.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::report::{csv_table, fmt_opt, write_json, write_text};
use crate::dataset::{generate, resample_by_weight, Dataset, DatasetSpec};
use crate::error::Result;
use crate::metrics::{self, HistogramData};
use crate::repair::RepairConfig;
use crate::rng::derive_seed;

pub const DEFAULT_BINS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub group_id: u8,
    pub size: usize,
    pub mean: f64,
    pub std: f64,
    pub p_favorable: f64,
}

/// Empirical overview of one generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub dataset: String,
    pub seed: u64,
    pub size: usize,
    pub groups: Vec<GroupSummary>,
    pub spd: Option<f64>,
    pub di: Option<f64>,
    pub group_skew: Option<f64>,
    pub phi: Option<f64>,
}

impl DatasetSummary {
    pub fn of(name: &str, seed: u64, data: &Dataset) -> Self {
        let groups = data
            .group_counts()
            .keys()
            .rev()
            .map(|&g| {
                let recs: Vec<_> = data.records().iter().filter(|r| r.g == g).collect();
                let n = recs.len() as f64;
                let mean = recs.iter().map(|r| r.v).sum::<f64>() / n;
                // Sample standard deviation.
                let var =
                    recs.iter().map(|r| (r.v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
                let fav = recs.iter().filter(|r| r.y == 1).count() as f64 / n;
                GroupSummary {
                    group_id: g,
                    size: recs.len(),
                    mean,
                    std: var.sqrt(),
                    p_favorable: fav,
                }
            })
            .collect();
        Self {
            dataset: name.to_string(),
            seed,
            size: data.len(),
            groups,
            spd: metrics::statistical_parity_difference(data).ok(),
            di: metrics::disparate_impact_ratio(data).ok(),
            group_skew: metrics::group_skew(data).ok(),
            phi: metrics::phi_coefficient(data).ok(),
        }
    }
}

/// Outcome of one repair on one dataset, measured on the materialized data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodResult {
    pub group_skew: Option<f64>,
    pub distortion: Option<f64>,
    pub spd: Option<f64>,
    pub di: Option<f64>,
    pub error: Option<String>,
}

/// One row of a group-skew table: the original skew and one entry per method,
/// keyed by method label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkewRow {
    pub dataset: String,
    pub original: Option<f64>,
    pub methods: BTreeMap<String, MethodResult>,
}

/// A successful transform. Weight-only repairs keep the weighted data used
/// for distortion next to the resampled data used for everything else.
#[derive(Debug, Clone)]
pub struct Transform {
    pub data: Dataset,
    pub weighted: Option<Dataset>,
}

impl Transform {
    /// The transformed distribution: weighted data when present.
    pub fn distribution(&self) -> &Dataset {
        self.weighted.as_ref().unwrap_or(&self.data)
    }
}

/// One dataset with its transforms, in reference-repair order.
#[derive(Debug, Clone)]
pub struct DatasetStudy {
    pub spec: DatasetSpec,
    pub original: Dataset,
    pub transforms: Vec<(RepairConfig, Result<Transform, String>)>,
}

impl DatasetStudy {
    fn run(spec: DatasetSpec, index: u64, master_seed: u64) -> Result<Self> {
        let original = generate(&spec)?;
        let stream = derive_seed(master_seed, 100 + index);
        let repairs = RepairConfig::reference_set(derive_seed(master_seed, 200 + index));
        let transforms = repairs
            .into_par_iter()
            .enumerate()
            .map(|(j, cfg)| {
                let out = transform(&cfg, &original, derive_seed(stream, j as u64))
                    .map_err(|e| e.to_string());
                (cfg, out)
            })
            .collect();
        Ok(Self {
            spec,
            original,
            transforms,
        })
    }

    pub fn transformed(&self, label: &str) -> Option<&Dataset> {
        self.transforms
            .iter()
            .find(|(cfg, _)| cfg.label() == label)
            .and_then(|(_, t)| t.as_ref().ok())
            .map(|t| &t.data)
    }

    fn method_result(&self, out: &Result<Transform, String>) -> MethodResult {
        match out {
            Ok(t) => MethodResult {
                group_skew: metrics::group_skew(&t.data).ok(),
                distortion: metrics::distortion(&self.original, t.distribution()).ok(),
                spd: metrics::statistical_parity_difference(&t.data).ok(),
                di: metrics::disparate_impact_ratio(&t.data).ok(),
                error: None,
            },
            Err(e) => MethodResult {
                group_skew: None,
                distortion: None,
                spd: None,
                di: None,
                error: Some(e.clone()),
            },
        }
    }

    fn skew_row(&self, filter: impl Fn(&RepairConfig) -> bool) -> SkewRow {
        SkewRow {
            dataset: self.spec.name.clone(),
            original: metrics::group_skew(&self.original).ok(),
            methods: self
                .transforms
                .iter()
                .filter(|(cfg, _)| filter(cfg))
                .map(|(cfg, out)| (cfg.label(), self.method_result(out)))
                .collect(),
        }
    }

    /// Histogram range shared by the original and all transforms.
    pub fn shared_range(&self) -> (f64, f64) {
        let all = std::iter::once(&self.original).chain(
            self.transforms
                .iter()
                .filter_map(|(_, t)| t.as_ref().ok().map(|t| &t.data)),
        );
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for d in all {
            for r in d.records() {
                lo = lo.min(r.v);
                hi = hi.max(r.v);
            }
        }
        if !(lo < hi) {
            // Degenerate: every value identical.
            return (lo - 0.5, hi + 0.5);
        }
        (lo, hi)
    }

    /// `(transform slug, histograms per group)` for the original and each
    /// successful transform.
    pub fn histograms(&self, bins: usize) -> Result<Vec<(String, Vec<HistogramData>)>> {
        let range = self.shared_range();
        let groups: Vec<u8> = self.original.group_counts().keys().copied().collect();
        let mut out = Vec::new();
        let named = std::iter::once(("original".to_string(), &self.original)).chain(
            self.transforms
                .iter()
                .filter_map(|(cfg, t)| t.as_ref().ok().map(|t| (cfg.slug(), &t.data))),
        );
        for (slug, data) in named {
            let hs = groups
                .iter()
                .map(|&g| metrics::group_histogram(data, g, bins, range))
                .collect::<Result<Vec<_>>>()?;
            out.push((slug, hs));
        }
        Ok(out)
    }
}

fn transform(cfg: &RepairConfig, original: &Dataset, resample_seed: u64) -> Result<Transform> {
    if cfg.is_weighting() {
        let weighted = cfg.apply(original)?.data;
        let data = resample_by_weight(&weighted, resample_seed)?;
        Ok(Transform {
            data,
            weighted: Some(weighted),
        })
    } else {
        Ok(Transform {
            data: cfg.apply(original)?.data,
            weighted: None,
        })
    }
}

/// Everything the reproduction run computes, before it is written out.
#[derive(Debug, Clone)]
pub struct Reproduction {
    pub master_seed: u64,
    pub studies: Vec<DatasetStudy>,
}

impl Reproduction {
    pub fn table1(&self) -> Vec<DatasetSummary> {
        self.studies
            .iter()
            .map(|s| DatasetSummary::of(&s.spec.name, s.spec.seed, &s.original))
            .collect()
    }

    pub fn table2_dir(&self) -> Vec<SkewRow> {
        self.studies
            .iter()
            .map(|s| s.skew_row(|c| matches!(c, RepairConfig::Dir { .. })))
            .collect()
    }

    pub fn table3_eo(&self) -> Vec<SkewRow> {
        self.studies
            .iter()
            .map(|s| s.skew_row(RepairConfig::is_weighting))
            .collect()
    }

    pub fn table4_sp(&self) -> Vec<SkewRow> {
        self.studies
            .iter()
            .map(|s| s.skew_row(|c| matches!(c, RepairConfig::Lfr(_))))
            .collect()
    }

    /// Writes the tables, their CSV mirrors and the histogram tree.
    pub fn write(&self, out_dir: &Path, bins: usize) -> Result<()> {
        let table1 = self.table1();
        write_json(&out_dir.join("table1.json"), &table1)?;
        write_text(&out_dir.join("table1.csv"), &table1_csv(&table1))?;
        for (name, rows) in [
            ("table2_dir", self.table2_dir()),
            ("table3_eo", self.table3_eo()),
            ("table4_sp", self.table4_sp()),
        ] {
            write_json(&out_dir.join(format!("{name}.json")), &rows)?;
            write_text(&out_dir.join(format!("{name}.csv")), &skew_csv(&rows))?;
        }
        for study in &self.studies {
            for (slug, hists) in study.histograms(bins)? {
                for h in hists {
                    let path = out_dir
                        .join("hist")
                        .join(&study.spec.name)
                        .join(&slug)
                        .join(format!("{}.json", h.group_id));
                    write_json(&path, &h)?;
                }
            }
        }
        Ok(())
    }
}

fn table1_csv(rows: &[DatasetSummary]) -> String {
    let mut lines = Vec::new();
    for row in rows {
        for g in &row.groups {
            lines.push(vec![
                row.dataset.clone(),
                g.group_id.to_string(),
                g.size.to_string(),
                format!("{:?}", g.mean),
                format!("{:?}", g.std),
                format!("{:?}", g.p_favorable),
                fmt_opt(row.spd),
                fmt_opt(row.di),
                fmt_opt(row.group_skew),
            ]);
        }
    }
    csv_table(
        &[
            "dataset",
            "group",
            "size",
            "mean",
            "std",
            "p_favorable",
            "spd",
            "di",
            "group_skew",
        ],
        &lines,
    )
}

fn skew_csv(rows: &[SkewRow]) -> String {
    let methods: Vec<String> = rows
        .first()
        .map(|r| r.methods.keys().cloned().collect())
        .unwrap_or_default();
    let mut header = vec!["dataset".to_string(), "original".to_string()];
    for m in &methods {
        header.push(m.clone());
        header.push(format!("{m} distortion"));
    }
    let lines: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut line = vec![r.dataset.clone(), fmt_opt(r.original)];
            for m in &methods {
                let res = r.methods.get(m);
                line.push(fmt_opt(res.and_then(|x| x.group_skew)));
                line.push(fmt_opt(res.and_then(|x| x.distortion)));
            }
            line
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_table(&header, &lines)
}

/// Generates D1–D3 from `master_seed` and applies every reference repair.
pub fn run_reproduction(master_seed: u64) -> Result<Reproduction> {
    let studies = DatasetSpec::reference_set(master_seed)
        .into_par_iter()
        .enumerate()
        .map(|(i, spec)| DatasetStudy::run(spec, i as u64, master_seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(Reproduction {
        master_seed,
        studies,
    })
}

/// Runs the reproduction and writes its report tree under `out_dir`.
pub fn reproduce_paper(master_seed: u64, out_dir: &Path) -> Result<Reproduction> {
    let repro = run_reproduction(master_seed)?;
    repro.write(out_dir, DEFAULT_BINS)?;
    Ok(repro)
}
