//! Generates the three reference datasets and writes them as CSV.
//!
//! ```text
//! cargo run --example generate_datasets -- [out_dir] [master_seed]
//! ```

use std::path::PathBuf;

use fairlab::dataset::{generate, write_csv, DatasetSpec};
use fairlab::metrics::{disparate_impact_ratio, statistical_parity_difference};

fn main() -> fairlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let out_dir = PathBuf::from(
        args.next()
            .unwrap_or_else(|| "target/fairlab-datasets".into()),
    );
    let master_seed: u64 = args
        .next()
        .map_or(42, |s| s.parse().expect("seed must be an integer"));

    for spec in DatasetSpec::reference_set(master_seed) {
        let data = generate(&spec)?;
        let path = out_dir.join(format!("{}.csv", spec.name));
        write_csv(&data, &path)?;
        println!(
            "{}: {} rows, SPD {:+.4}, DI {:.4} -> {}",
            spec.name,
            data.len(),
            statistical_parity_difference(&data)?,
            disparate_impact_ratio(&data)?,
            path.display()
        );
    }
    Ok(())
}
