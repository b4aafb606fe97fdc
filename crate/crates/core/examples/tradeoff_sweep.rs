//! Trains on repaired data and tests on untouched data for every reference
//! repair on D1 to D3, printing the accuracy/fairness trade-off per row.
//!
//! ```text
//! cargo run --release --example tradeoff_sweep -- [out_dir]
//! ```

use std::path::PathBuf;

use fairlab::harness::{run_tradeoff_sweep, ExperimentConfig};
use fairlab::rng::derive_seed;
use fairlab::RepairConfig;

fn main() -> fairlab::Result<()> {
    let out_dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "target/fairlab-sweep".into()),
    );
    let cfg = ExperimentConfig::new(RepairConfig::reference_set(derive_seed(42, 200)), 42);
    let rows = run_tradeoff_sweep(&cfg, &out_dir)?;

    println!(
        "{:<4} {:<20} {:>7} {:>9} {:>9} {:>9} {:>9}",
        "data", "repair", "phi", "acc orig", "acc rep", "acc cur", "|SPD| rep"
    );
    for r in &rows {
        if let Some(e) = &r.error {
            println!("{:<4} {:<20} failed: {e}", r.dataset, r.repair);
            continue;
        }
        let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
        println!(
            "{:<4} {:<20} {:>7} {:>9} {:>9} {:>9} {:>9}",
            r.dataset,
            r.repair,
            f(r.phi_original),
            f(r.accuracy_original_model),
            f(r.accuracy_on_original_test),
            f(r.accuracy_on_transformed_test),
            f(r.prediction_spd.map(f64::abs))
        );
    }
    println!("reports written to {}", out_dir.display());
    Ok(())
}
