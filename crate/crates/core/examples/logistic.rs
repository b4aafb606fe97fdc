//! Fits the one-feature logistic classifier on a split of D2, with and without
//! reweighing, and scores both on the untouched test partition.

use fairlab::dataset::{generate, split, DatasetSpec};
use fairlab::metrics::{accuracy, equalized_odds_gap, prediction_parity_difference};
use fairlab::model::{fit_logistic, predict, FitConfig};
use fairlab::repair::reweigh;

fn main() -> fairlab::Result<()> {
    let data = generate(&DatasetSpec::d2(7))?;
    let parts = split(&data, 0.2, 11)?;
    let cfg = FitConfig::default();
    let truth = parts.test.outcomes();
    let groups = parts.test.groups();

    for (label, train) in [
        ("original", parts.train.clone()),
        ("reweighed", reweigh(&parts.train)?),
    ] {
        let model = fit_logistic(&train, &cfg)?;
        let pred = predict(&model, &parts.test, 0.5)?;
        println!(
            "{label:<10} bias {:+.3} coef_v {:+.3}: accuracy {:.4}, prediction SPD {:+.4}, EO gap {:.4}",
            model.bias,
            model.coef_v,
            accuracy(&truth, &pred)?,
            prediction_parity_difference(&pred, &groups)?,
            equalized_odds_gap(&truth, &pred, &groups)?
        );
    }
    Ok(())
}
