//! Per-group histograms of D2 before and after full quantile repair, drawn as
//! text bars on a shared range.

use fairlab::dataset::{generate, DatasetSpec};
use fairlab::metrics::group_histogram;
use fairlab::repair::dir_repair;
use fairlab::Dataset;

fn draw(label: &str, data: &Dataset, range: (f64, f64)) -> fairlab::Result<()> {
    println!("{label}");
    for g in [0u8, 1] {
        let h = group_histogram(data, g, 16, range)?;
        let peak = h.counts.iter().copied().max().unwrap_or(1).max(1);
        println!("  group {g}");
        for (i, count) in h.counts.iter().enumerate() {
            let bar = "#".repeat((40 * count / peak) as usize);
            println!("  {:>6.2} {bar}", h.bin_edges[i]);
        }
    }
    Ok(())
}

fn main() -> fairlab::Result<()> {
    let data = generate(&DatasetSpec::d2(7))?;
    let repaired = dir_repair(&data, 1.0)?;
    let values = data.values();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    draw("original", &data, (lo, hi))?;
    draw("DIR(1.0)", &repaired, (lo, hi))?;
    Ok(())
}
