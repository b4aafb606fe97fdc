//! Computes every dataset metric on a six-record toy set whose values can be
//! checked by hand, then on a generated dataset.

use fairlab::dataset::{generate, Dataset, DatasetSpec};
use fairlab::metrics::{self, MetricsReport};

fn main() -> fairlab::Result<()> {
    // Group 1 holds V = 1, 2, 3 with two favorable outcomes; group 0 holds
    // V = 5, 6, 7 with one.
    let s = Dataset::from_triples(
        &[
            (1, 1.0, 1),
            (1, 2.0, 1),
            (1, 3.0, 0),
            (0, 5.0, 1),
            (0, 6.0, 0),
            (0, 7.0, 0),
        ],
        "S",
    )?;
    println!("group skew   {}", metrics::group_skew(&s)?);
    println!(
        "SPD          {}",
        metrics::statistical_parity_difference(&s)?
    );
    println!("DI           {}", metrics::disparate_impact_ratio(&s)?);
    println!("phi          {}", metrics::phi_coefficient(&s)?);
    println!(
        "W1(g0, g1)   {}",
        metrics::wasserstein_1d(&s.group_values(0), &s.group_values(1))?
    );

    // Predictions add accuracy and the equalized-odds gap.
    let pred = [1, 1, 1, 0, 0, 0];
    let report = MetricsReport::for_dataset(&s).with_predictions(&s, &pred);
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );

    let d1 = generate(&DatasetSpec::d1(7))?;
    let report = MetricsReport::for_dataset(&d1);
    println!(
        "D1: {}",
        serde_json::to_string(&report).expect("report serializes")
    );
    Ok(())
}
