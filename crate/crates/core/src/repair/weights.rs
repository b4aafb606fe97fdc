//! Cell-weighting repairs: reweighing and the two FairBalance variants.
//!
//! These leave `g`, `v` and `y` untouched and multiply a per-`(g, y)` factor
//! into each record's weight.

use crate::dataset::{Dataset, Record};
use crate::error::{Error, Result};

fn scale_cells(data: &Dataset, factor: [[f64; 2]; 2], tag: &str) -> Dataset {
    let records: Vec<Record> = data
        .records()
        .iter()
        .map(|r| Record {
            w: r.w * factor[r.g as usize][r.y as usize],
            ..*r
        })
        .collect();
    Dataset::from_records_unchecked(records, format!("{}-{tag}", data.provenance()))
}

/// Reweighing: cell `(g, y)` gets `n_g * n_y / (n * n_gy)`, which makes `G`
/// and `Y` independent under the weighted measure.
pub fn reweigh(data: &Dataset) -> Result<Dataset> {
    if data.is_empty() {
        return Err(Error::UndefinedRepair(
            "cannot reweigh an empty dataset".into(),
        ));
    }
    let cells = data.cell_counts();
    let n = data.len() as f64;
    let n_g = [
        (cells[0][0] + cells[0][1]) as f64,
        (cells[1][0] + cells[1][1]) as f64,
    ];
    let n_y = [
        (cells[0][0] + cells[1][0]) as f64,
        (cells[0][1] + cells[1][1]) as f64,
    ];
    let mut factor = [[1.0; 2]; 2];
    for g in 0..2 {
        for y in 0..2 {
            if cells[g][y] > 0 {
                factor[g][y] = n_g[g] * n_y[y] / (n * cells[g][y] as f64);
            }
        }
    }
    Ok(scale_cells(data, factor, "reweighed"))
}

/// FairBalance. With `variant = false`, cell `(g, y)` gets `n_g / n_gy` so both
/// classes carry equal weight inside each group. With `variant = true`, it gets
/// `1 / n_gy` so every cell carries equal total weight.
pub fn fair_balance(data: &Dataset, variant: bool) -> Result<Dataset> {
    if data.is_empty() {
        return Err(Error::UndefinedRepair(
            "cannot balance an empty dataset".into(),
        ));
    }
    let cells = data.cell_counts();
    let mut factor = [[1.0; 2]; 2];
    for g in 0..2 {
        let n_g = cells[g][0] + cells[g][1];
        if n_g == 0 {
            continue;
        }
        for y in 0..2 {
            if cells[g][y] == 0 {
                return Err(Error::UndefinedRepair(format!(
                    "cell (g={g}, y={y}) is empty; FairBalance needs both outcomes in every group"
                )));
            }
            let numerator = if variant { 1.0 } else { n_g as f64 };
            factor[g][y] = numerator / cells[g][y] as f64;
        }
    }
    let tag = if variant {
        "fairbalance-variant"
    } else {
        "fairbalance"
    };
    Ok(scale_cells(data, factor, tag))
}
