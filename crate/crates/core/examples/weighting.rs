//! Reweighing and FairBalance: weights per (group, outcome) cell, the
//! weighted favorable rates they produce, and a resampled copy.

use fairlab::dataset::{generate, resample_by_weight, DatasetSpec};
use fairlab::metrics::{
    distortion, group_skew, statistical_parity_difference, weighted_favorable_rates,
    weighted_statistical_parity_difference,
};
use fairlab::repair::{fair_balance, reweigh};
use fairlab::Dataset;

fn print_cells(label: &str, data: &Dataset) -> fairlab::Result<()> {
    let mut cells = Vec::new();
    for g in [0u8, 1] {
        for y in [0u8, 1] {
            if let Some(r) = data.records().iter().find(|r| r.g == g && r.y == y) {
                cells.push(format!("w(g={g},y={y}) = {:.4e}", r.w));
            }
        }
    }
    let (r0, r1) = weighted_favorable_rates(data)?;
    println!("  {label:<20} {}", cells.join(", "));
    println!(
        "  {:<20} weighted P(Y=1|G=0) {r0:.4}, P(Y=1|G=1) {r1:.4}",
        ""
    );
    Ok(())
}

fn main() -> fairlab::Result<()> {
    let data = generate(&DatasetSpec::d2(7))?;
    println!("D2: SPD {:+.4}", statistical_parity_difference(&data)?);

    let reweighed = reweigh(&data)?;
    print_cells("Reweighing", &reweighed)?;
    println!(
        "  {:<20} weighted SPD {:.1e}",
        "",
        weighted_statistical_parity_difference(&reweighed)?
    );
    print_cells("FairBalance", &fair_balance(&data, false)?)?;
    print_cells("FairBalanceVariant", &fair_balance(&data, true)?)?;

    // Distortion is measured on the weighted distribution itself; weighted
    // resampling turns weights into data for skew and histograms.
    let weighted = fair_balance(&data, false)?;
    let resampled = resample_by_weight(&weighted, 1)?;
    println!(
        "FairBalance distortion {:.4}",
        distortion(&data, &weighted)?
    );
    println!(
        "FairBalance resampled: SPD {:+.4}, GS {:.4} (original {:.4})",
        statistical_parity_difference(&resampled)?,
        group_skew(&resampled)?,
        group_skew(&data)?
    );
    Ok(())
}
