//! Quantile repair at increasing strength: group skew falls monotonically while
//! the distortion of each group's distribution grows.

use fairlab::dataset::{generate, DatasetSpec};
use fairlab::metrics::{distortion, group_skew};
use fairlab::repair::dir_repair;

fn main() -> fairlab::Result<()> {
    for spec in DatasetSpec::reference_set(42) {
        let data = generate(&spec)?;
        println!("{}", spec.name);
        for lambda in [0.0, 0.3, 0.5, 0.8, 1.0] {
            let repaired = dir_repair(&data, lambda)?;
            println!(
                "  lambda {lambda:.1}: GS {:.3e}, distortion {:.4}",
                group_skew(&repaired)?,
                distortion(&data, &repaired)?
            );
        }
    }
    Ok(())
}
