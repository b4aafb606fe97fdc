//! Dataset model, synthetic generation, stratified splitting, weighted
//! resampling and the `g,v,y,w` CSV format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub const CSV_HEADER: &str = "g,v,y,w";

/// Generation parameters for one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub group_id: u8,
    pub size: usize,
    pub mean: f64,
    pub std: f64,
    pub p_favorable: f64,
}

impl GroupSpec {
    pub fn new(group_id: u8, size: usize, mean: f64, std: f64, p_favorable: f64) -> Self {
        Self {
            group_id,
            size,
            mean,
            std,
            p_favorable,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.group_id > 1 {
            return Err(Error::InvalidSpec(format!(
                "group id {} is not binary",
                self.group_id
            )));
        }
        if self.size == 0 {
            return Err(Error::InvalidSpec(format!(
                "group {} has size 0",
                self.group_id
            )));
        }
        if !(self.std > 0.0) || !self.std.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "group {} has non-positive std {}",
                self.group_id, self.std
            )));
        }
        if !self.mean.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "group {} has non-finite mean",
                self.group_id
            )));
        }
        if !(0.0..=1.0).contains(&self.p_favorable) {
            return Err(Error::InvalidSpec(format!(
                "group {} has p_favorable {} outside [0, 1]",
                self.group_id, self.p_favorable
            )));
        }
        Ok(())
    }
}

/// A named two-group generation recipe with its seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    pub seed: u64,
    pub groups: Vec<GroupSpec>,
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.groups.len() != 2 {
            return Err(Error::InvalidSpec(format!(
                "expected exactly two groups, got {}",
                self.groups.len()
            )));
        }
        for group in &self.groups {
            group.validate()?;
        }
        if self.groups[0].group_id == self.groups[1].group_id {
            return Err(Error::InvalidSpec("group ids must be distinct".into()));
        }
        Ok(())
    }

    pub fn total_size(&self) -> usize {
        self.groups.iter().map(|g| g.size).sum()
    }

    /// D1: equal group sizes, unequal base rates (0.5 vs 0.7).
    pub fn d1(seed: u64) -> Self {
        Self {
            name: "D1".into(),
            seed,
            groups: vec![
                GroupSpec::new(1, 10_000, 5.5, 0.6, 0.7),
                GroupSpec::new(0, 10_000, 6.0, 0.4, 0.5),
            ],
        }
    }

    /// D2: imbalanced group sizes and strongly unequal base rates (0.2 vs 0.8).
    pub fn d2(seed: u64) -> Self {
        Self {
            name: "D2".into(),
            seed,
            groups: vec![
                GroupSpec::new(1, 20_000, 5.5, 0.3, 0.8),
                GroupSpec::new(0, 9_000, 6.0, 0.6, 0.2),
            ],
        }
    }

    /// D3: balanced sizes and equal base rates; only V differs between groups.
    pub fn d3(seed: u64) -> Self {
        Self {
            name: "D3".into(),
            seed,
            groups: vec![
                GroupSpec::new(1, 10_000, 5.5, 0.6, 0.5),
                GroupSpec::new(0, 10_000, 6.0, 0.3, 0.5),
            ],
        }
    }

    /// D1–D3, each seeded from `master_seed` by stream index.
    pub fn reference_set(master_seed: u64) -> Vec<Self> {
        vec![
            Self::d1(rng::derive_seed(master_seed, 1)),
            Self::d2(rng::derive_seed(master_seed, 2)),
            Self::d3(rng::derive_seed(master_seed, 3)),
        ]
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: Self = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        spec.validate()?;
        Ok(spec)
    }
}

/// One observation: group, feature value, outcome and weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub g: u8,
    pub v: f64,
    pub y: u8,
    pub w: f64,
}

impl Record {
    pub fn new(g: u8, v: f64, y: u8) -> Self {
        Self { g, v, y, w: 1.0 }
    }

    pub fn weighted(g: u8, v: f64, y: u8, w: f64) -> Self {
        Self { g, v, y, w }
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.g > 1 {
            return Err(format!("group id {} is not binary", self.g));
        }
        if self.y > 1 {
            return Err(format!("outcome {} is not binary", self.y));
        }
        if !self.v.is_finite() {
            return Err(format!("feature value {} is not finite", self.v));
        }
        if !(self.w >= 0.0) || !self.w.is_finite() {
            return Err(format!("weight {} is negative or not finite", self.w));
        }
        Ok(())
    }
}

/// An ordered collection of records plus a free-text provenance tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<Record>,
    provenance: String,
}

impl Dataset {
    pub fn new(records: Vec<Record>, provenance: impl Into<String>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            r.check()
                .map_err(|m| Error::InvalidArgument(format!("record {i}: {m}")))?;
        }
        Ok(Self {
            records,
            provenance: provenance.into(),
        })
    }

    /// Builds a unit-weight dataset from `(g, v, y)` triples.
    pub fn from_triples(rows: &[(u8, f64, u8)], provenance: impl Into<String>) -> Result<Self> {
        Self::new(
            rows.iter().map(|&(g, v, y)| Record::new(g, v, y)).collect(),
            provenance,
        )
    }

    pub(crate) fn from_records_unchecked(records: Vec<Record>, provenance: String) -> Self {
        Self {
            records,
            provenance,
        }
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn into_records(self) -> Vec<Record> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.v).collect()
    }

    pub fn outcomes(&self) -> Vec<u8> {
        self.records.iter().map(|r| r.y).collect()
    }

    pub fn groups(&self) -> Vec<u8> {
        self.records.iter().map(|r| r.g).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.w).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.records.iter().map(|r| r.w).sum()
    }

    /// Feature values of one group, in record order.
    pub fn group_values(&self, g: u8) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.g == g)
            .map(|r| r.v)
            .collect()
    }

    /// Record counts per group id, ascending by id.
    pub fn group_counts(&self) -> BTreeMap<u8, usize> {
        let mut counts = BTreeMap::new();
        for r in &self.records {
            *counts.entry(r.g).or_insert(0) += 1;
        }
        counts
    }

    /// Record counts per `(g, y)` cell, as `counts[g][y]`.
    pub fn cell_counts(&self) -> [[usize; 2]; 2] {
        let mut counts = [[0usize; 2]; 2];
        for r in &self.records {
            counts[r.g as usize][r.y as usize] += 1;
        }
        counts
    }

    /// Weight totals per `(g, y)` cell, as `totals[g][y]`.
    pub fn cell_weights(&self) -> [[f64; 2]; 2] {
        let mut totals = [[0.0f64; 2]; 2];
        for r in &self.records {
            totals[r.g as usize][r.y as usize] += r.w;
        }
        totals
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(24 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            // `{:?}` prints the shortest representation that round-trips exactly.
            let _ = writeln!(out, "{},{:?},{},{:?}", r.g, r.v, r.y, r.w);
        }
        out
    }

    pub fn from_csv_str(text: &str, provenance: impl Into<String>) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim_end_matches('\r') == CSV_HEADER => {}
            Some((_, header)) => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header `{CSV_HEADER}`, found `{header}`"),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    message: "missing header".into(),
                })
            }
        }
        let mut records = Vec::new();
        for (idx, raw) in lines {
            let line = idx + 1;
            let row = raw.trim_end_matches('\r');
            if row.is_empty() {
                continue;
            }
            records.push(parse_row(row).map_err(|message| Error::Parse { line, message })?);
        }
        Ok(Self::from_records_unchecked(records, provenance.into()))
    }
}

fn parse_row(row: &str) -> std::result::Result<Record, String> {
    let fields: Vec<&str> = row.split(',').collect();
    if fields.len() != 4 {
        return Err(format!("expected 4 fields, found {}", fields.len()));
    }
    let binary = |name: &str, s: &str| match s.trim() {
        "0" => Ok(0u8),
        "1" => Ok(1u8),
        other => Err(format!("{name} must be 0 or 1, found `{other}`")),
    };
    let real = |name: &str, s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("{name} is not a number: `{s}`"))
    };
    let record = Record {
        g: binary("g", fields[0])?,
        v: real("v", fields[1])?,
        y: binary("y", fields[2])?,
        w: real("w", fields[3])?,
    };
    record.check()?;
    Ok(record)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let provenance = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Dataset::from_csv_str(&text, provenance)
}

/// Writes `data` as CSV, creating missing parent directories.
pub fn write_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, data.to_csv_string()).map_err(|e| Error::io(path, e))
}

/// Draws a dataset from `spec`: per group, `V ~ Normal(mean, std)` and
/// `Y ~ Bernoulli(p_favorable)` independently of `V`.
///
/// Groups are emitted in the order they appear in the spec.
pub fn generate(spec: &DatasetSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = rng::seeded(spec.seed);
    let mut records = Vec::with_capacity(spec.total_size());
    for group in &spec.groups {
        for _ in 0..group.size {
            let v = group.mean + group.std * rng.sample::<f64, _>(StandardNormal);
            let y = u8::from(rng.gen::<f64>() < group.p_favorable);
            records.push(Record::new(group.group_id, v, y));
        }
    }
    Ok(Dataset::from_records_unchecked(
        records,
        format!("{}-original", spec.name),
    ))
}

/// Train/test partition of one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
}

/// Stratified split by `(g, y)` cell.
///
/// Each cell sends `round(size * test_fraction)` records to the test side,
/// capped so that at least one record of every cell stays in training.
/// Both partitions keep the source record order.
pub fn split(data: &Dataset, test_fraction: f64, seed: u64) -> Result<SplitPair> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "test_fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let mut cells: [Vec<usize>; 4] = Default::default();
    for (i, r) in data.records.iter().enumerate() {
        cells[(r.g as usize) * 2 + r.y as usize].push(i);
    }
    let mut rng = rng::seeded(seed);
    let mut in_test = vec![false; data.len()];
    for cell in cells.iter_mut() {
        if cell.is_empty() {
            continue;
        }
        cell.shuffle(&mut rng);
        let wanted = (cell.len() as f64 * test_fraction).round() as usize;
        let take = wanted.min(cell.len() - 1);
        for &i in &cell[..take] {
            in_test[i] = true;
        }
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (r, &t) in data.records.iter().zip(&in_test) {
        if t {
            test.push(*r);
        } else {
            train.push(*r);
        }
    }
    Ok(SplitPair {
        train: Dataset::from_records_unchecked(train, format!("{}-train", data.provenance)),
        test: Dataset::from_records_unchecked(test, format!("{}-test", data.provenance)),
    })
}

/// Bootstrap of `data` with selection probability proportional to weight.
/// The output has the input's size and unit weights.
pub fn resample_by_weight(data: &Dataset, seed: u64) -> Result<Dataset> {
    let mut cumulative = Vec::with_capacity(data.len());
    let mut total = 0.0;
    for r in &data.records {
        total += r.w;
        cumulative.push(total);
    }
    if !(total > 0.0) {
        return Err(Error::DegenerateWeights(
            "total weight must be positive to resample".into(),
        ));
    }
    let mut rng = rng::seeded(seed);
    let records = (0..data.len())
        .map(|_| {
            let target = rng.gen::<f64>() * total;
            // First index whose cumulative weight exceeds the target; zero-weight
            // records share their predecessor's cumulative value and are never hit.
            let idx = cumulative
                .partition_point(|&c| c <= target)
                .min(data.len() - 1);
            Record {
                w: 1.0,
                ..data.records[idx]
            }
        })
        .collect();
    Ok(Dataset::from_records_unchecked(
        records,
        format!("{}-resampled", data.provenance),
    ))
}
