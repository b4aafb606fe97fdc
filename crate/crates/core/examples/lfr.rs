//! Learns fair prototype representations on D1 and reports how the objective
//! and the parity of the transformed data change.

use fairlab::dataset::{generate, DatasetSpec};
use fairlab::metrics::{group_skew, statistical_parity_difference};
use fairlab::repair::{lfr_fit, lfr_transform};
use fairlab::LfrParams;

fn main() -> fairlab::Result<()> {
    let data = generate(&DatasetSpec::d1(7))?;
    let params = LfrParams {
        seed: 3,
        ..LfrParams::default()
    };
    let model = lfr_fit(&data, &params)?;
    let (first, last) = (model.initial_loss, model.final_loss);
    println!("loss        initial      final");
    println!("total       {:<12.5} {:.5}", first.total, last.total);
    println!(
        "L_x         {:<12.5} {:.5}",
        first.reconstruction, last.reconstruction
    );
    println!(
        "L_y         {:<12.5} {:.5}",
        first.prediction, last.prediction
    );
    println!("L_z         {:<12.5} {:.5}", first.parity, last.parity);
    for (v, w) in model.prototypes.iter().zip(&model.prototype_labels) {
        println!("prototype v = {v:.4}, label = {w:.4}");
    }

    let transformed = lfr_transform(&model, &data, params.threshold)?;
    println!(
        "SPD {:+.4} -> {:+.4}, GS {:.4} -> {:.3e}",
        statistical_parity_difference(&data)?,
        statistical_parity_difference(&transformed)?,
        group_skew(&data)?,
        group_skew(&transformed)?
    );
    Ok(())
}
