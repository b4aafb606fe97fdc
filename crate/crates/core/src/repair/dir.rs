//! Disparate impact removal by quantile repair.
//!
//! Every value is mapped to its mid-rank quantile within its own group; the
//! fully repaired value is the median, across groups, of each group's quantile
//! function at that level. A repair level `lambda` interpolates linearly
//! between the original value and the fully repaired one, so within-group
//! order is preserved for every `lambda`.

use std::collections::BTreeMap;

use crate::dataset::{Dataset, Record};
use crate::error::{Error, Result};

/// Sorted values of one group with quantile lookup.
struct GroupQuantiles {
    sorted: Vec<f64>,
}

impl GroupQuantiles {
    fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { sorted: values }
    }

    /// Quantile at level `q`, with order statistic `i` placed at `(i + 0.5) / n`
    /// and linear interpolation between neighbours.
    fn quantile(&self, q: f64) -> f64 {
        let n = self.sorted.len();
        let pos = (q * n as f64 - 0.5).clamp(0.0, (n - 1) as f64);
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(n - 1);
        let frac = pos - lo as f64;
        if frac == 0.0 {
            self.sorted[lo]
        } else {
            self.sorted[lo] * (1.0 - frac) + self.sorted[hi] * frac
        }
    }
}

/// Mid-rank quantile level of each value in `values`, `(rank + 0.5) / n`,
/// where tied values share their average rank.
fn mid_rank_levels(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut levels = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let avg_rank = (start + end - 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            levels[idx] = (avg_rank + 0.5) / n as f64;
        }
        start = end;
    }
    levels
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Repairs `V` towards the cross-group median distribution at level `lambda`.
pub fn dir_repair(data: &Dataset, lambda: f64) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!(
            "repair level must lie in [0, 1], got {lambda}"
        )));
    }
    let mut members: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
    for (i, r) in data.records().iter().enumerate() {
        members.entry(r.g).or_default().push(i);
    }
    if members.len() < 2 {
        return Err(Error::UndefinedRepair(format!(
            "quantile repair needs two nonempty groups, found {}",
            members.len()
        )));
    }
    let records = data.records();
    let quantiles: Vec<GroupQuantiles> = members
        .values()
        .map(|idx| GroupQuantiles::new(idx.iter().map(|&i| records[i].v).collect()))
        .collect();

    let mut repaired: Vec<Record> = records.to_vec();
    let mut at_level = vec![0.0; quantiles.len()];
    for idx in members.values() {
        let values: Vec<f64> = idx.iter().map(|&i| records[i].v).collect();
        for (&i, q) in idx.iter().zip(mid_rank_levels(&values)) {
            for (slot, gq) in at_level.iter_mut().zip(&quantiles) {
                *slot = gq.quantile(q);
            }
            let target = median(&mut at_level);
            let x = records[i].v;
            repaired[i].v = (1.0 - lambda) * x + lambda * target;
        }
    }
    Ok(Dataset::from_records_unchecked(
        repaired,
        format!("{}-DIR-{lambda:?}", data.provenance()),
    ))
}
