//! Weighted binary logistic regression on `V` (optionally `G`), trained by
//! full-batch gradient descent from zero.
//!
//! The loss is the weight-normalized negative log-likelihood plus an L2
//! penalty on the coefficients (not the bias):
//!
//! ```text
//! loss = (1 / W) * sum_n w_n * nll_n + l2 * (coef_v^2 + coef_g^2)
//! ```
//!
//! Normalizing by the total weight `W` makes the trajectory invariant to a
//! common rescaling of the weights.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub include_g: bool,
    pub steps: usize,
    pub step_size: f64,
    pub l2: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            include_g: false,
            steps: 5000,
            step_size: 0.1,
            l2: 1e-6,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "step_size must be positive, got {}",
                self.step_size
            )));
        }
        if !(self.l2 >= 0.0) || !self.l2.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "l2 must be nonnegative, got {}",
                self.l2
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub bias: f64,
    pub coef_v: f64,
    pub coef_g: Option<f64>,
    pub config: FitConfig,
}

impl LogisticModel {
    pub fn new(bias: f64, coef_v: f64, coef_g: Option<f64>) -> Self {
        Self {
            bias,
            coef_v,
            coef_g,
            config: FitConfig {
                include_g: coef_g.is_some(),
                ..FitConfig::default()
            },
        }
    }

    pub fn logit(&self, v: f64, g: u8) -> f64 {
        self.bias + self.coef_v * v + self.coef_g.map_or(0.0, |c| c * g as f64)
    }

    pub fn probability(&self, v: f64, g: u8) -> f64 {
        sigmoid(self.logit(v, g))
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Parameter vector `[bias, coef_v, coef_g]`; `coef_g` stays 0 when unused.
type Params = [f64; 3];

struct Problem<'a> {
    data: &'a Dataset,
    total_weight: f64,
    include_g: bool,
    l2: f64,
}

impl<'a> Problem<'a> {
    fn new(data: &'a Dataset, include_g: bool, l2: f64) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidArgument("training set is empty".into()));
        }
        if include_g && data.group_counts().len() < 2 {
            return Err(Error::InvalidArgument(
                "include_g needs both groups in the training set".into(),
            ));
        }
        let total_weight = data.total_weight();
        if !(total_weight > 0.0) {
            return Err(Error::DegenerateWeights(
                "training weights sum to zero".into(),
            ));
        }
        Ok(Self {
            data,
            total_weight,
            include_g,
            l2,
        })
    }

    fn loss_and_gradient(&self, p: &Params) -> (f64, Params) {
        let mut nll = 0.0;
        let mut grad = [0.0; 3];
        for r in self.data.records() {
            let g = if self.include_g { r.g as f64 } else { 0.0 };
            let z = p[0] + p[1] * r.v + p[2] * g;
            let y = r.y as f64;
            nll += r.w * (softplus(z) - y * z);
            let residual = r.w * (sigmoid(z) - y);
            grad[0] += residual;
            grad[1] += residual * r.v;
            grad[2] += residual * g;
        }
        let scale = 1.0 / self.total_weight;
        let loss = nll * scale + self.l2 * (p[1] * p[1] + p[2] * p[2]);
        grad[0] *= scale;
        grad[1] = grad[1] * scale + 2.0 * self.l2 * p[1];
        grad[2] = grad[2] * scale + 2.0 * self.l2 * p[2];
        (loss, grad)
    }

    fn model(&self, p: &Params, cfg: &FitConfig) -> LogisticModel {
        LogisticModel {
            bias: p[0],
            coef_v: p[1],
            coef_g: self.include_g.then_some(p[2]),
            config: cfg.clone(),
        }
    }
}

fn params_of(model: &LogisticModel) -> Params {
    [model.bias, model.coef_v, model.coef_g.unwrap_or(0.0)]
}

/// Training objective of `model` on `data` (its `config` supplies `l2`).
pub fn logistic_loss(model: &LogisticModel, data: &Dataset) -> Result<f64> {
    let problem = Problem::new(data, model.coef_g.is_some(), model.config.l2)?;
    Ok(problem.loss_and_gradient(&params_of(model)).0)
}

/// Gradient of [`logistic_loss`] as `[d_bias, d_coef_v, d_coef_g]`.
pub fn logistic_gradient(model: &LogisticModel, data: &Dataset) -> Result<[f64; 3]> {
    let problem = Problem::new(data, model.coef_g.is_some(), model.config.l2)?;
    Ok(problem.loss_and_gradient(&params_of(model)).1)
}

/// Fits the model and returns it with the loss before every step.
pub fn fit_logistic_traced(train: &Dataset, cfg: &FitConfig) -> Result<(LogisticModel, Vec<f64>)> {
    cfg.validate()?;
    let problem = Problem::new(train, cfg.include_g, cfg.l2)?;
    let mut params: Params = [0.0; 3];
    let mut trace = Vec::with_capacity(cfg.steps);
    for iteration in 0..cfg.steps {
        let (loss, grad) = problem.loss_and_gradient(&params);
        if !loss.is_finite() {
            return Err(Error::Divergence { iteration, loss });
        }
        trace.push(loss);
        for (p, g) in params.iter_mut().zip(grad) {
            *p -= cfg.step_size * g;
        }
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::Divergence {
            iteration: cfg.steps,
            loss: f64::NAN,
        });
    }
    Ok((problem.model(&params, cfg), trace))
}

pub fn fit_logistic(train: &Dataset, cfg: &FitConfig) -> Result<LogisticModel> {
    fit_logistic_traced(train, cfg).map(|(model, _)| model)
}

/// `1` where the predicted probability reaches `threshold`, in record order.
pub fn predict(model: &LogisticModel, data: &Dataset, threshold: f64) -> Result<Vec<u8>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    Ok(data
        .records()
        .iter()
        .map(|r| u8::from(model.probability(r.v, r.g) >= threshold))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Record;

    fn separable() -> Dataset {
        let rows: Vec<(u8, f64, u8)> = [1.0, 2.0, 3.0, 4.0, 4.5, 5.5, 6.0, 7.0, 8.0, 9.0]
            .iter()
            .enumerate()
            .map(|(i, &v)| ((i % 2) as u8, v, u8::from(v > 5.0)))
            .collect();
        Dataset::from_triples(&rows, "sep").unwrap()
    }

    #[test]
    fn zero_model_predicts_one() {
        let m = LogisticModel::new(0.0, 0.0, None);
        assert_eq!(predict(&m, &separable(), 0.5).unwrap(), vec![1; 10]);
    }

    #[test]
    fn very_negative_bias_predicts_zero() {
        let m = LogisticModel::new(-100.0, 0.0, None);
        assert_eq!(predict(&m, &separable(), 0.5).unwrap(), vec![0; 10]);
    }

    #[test]
    fn hand_model() {
        let m = LogisticModel::new(0.0, 1.0, None);
        let d = Dataset::from_triples(&[(0, -1.0, 0), (0, 1.0, 1)], "h").unwrap();
        assert_eq!(predict(&m, &d, 0.5).unwrap(), vec![0, 1]);
        assert!(predict(&m, &d, 1.0).is_err());
        assert!(predict(&m, &d, 0.0).is_err());
    }

    #[test]
    fn separable_training_accuracy() {
        let cfg = FitConfig {
            l2: 1e-4,
            ..FitConfig::default()
        };
        let d = separable();
        let m = fit_logistic(&d, &cfg).unwrap();
        let pred = predict(&m, &d, 0.5).unwrap();
        assert_eq!(pred, d.outcomes());
    }

    #[test]
    fn single_class_predicts_that_class() {
        for class in [0u8, 1] {
            let rows: Vec<(u8, f64, u8)> = (0..8)
                .map(|i| ((i % 2) as u8, 4.0 + i as f64 * 0.3, class))
                .collect();
            let d = Dataset::from_triples(&rows, "one").unwrap();
            let m = fit_logistic(&d, &FitConfig::default()).unwrap();
            assert!(predict(&m, &d, 0.5).unwrap().iter().all(|&p| p == class));
        }
    }

    #[test]
    fn weight_scaling_leaves_fit_unchanged() {
        let d = separable();
        let scaled = Dataset::new(
            d.records()
                .iter()
                .map(|r| Record { w: r.w * 7.5, ..*r })
                .collect(),
            "scaled",
        )
        .unwrap();
        let cfg = FitConfig {
            steps: 500,
            ..FitConfig::default()
        };
        let a = fit_logistic(&d, &cfg).unwrap();
        let b = fit_logistic(&scaled, &cfg).unwrap();
        assert!((a.bias - b.bias).abs() < 1e-9);
        assert!((a.coef_v - b.coef_v).abs() < 1e-9);
    }

    #[test]
    fn loss_decreases_monotonically() {
        let cfg = FitConfig {
            steps: 300,
            step_size: 0.01,
            include_g: true,
            ..FitConfig::default()
        };
        let (_, trace) = fit_logistic_traced(&separable(), &cfg).unwrap();
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn errors() {
        let empty = Dataset::from_triples(&[], "e").unwrap();
        assert!(matches!(
            fit_logistic(&empty, &FitConfig::default()),
            Err(Error::InvalidArgument(_))
        ));
        let one_group = Dataset::from_triples(&[(1, 1.0, 1), (1, 2.0, 0)], "g").unwrap();
        let cfg = FitConfig {
            include_g: true,
            ..FitConfig::default()
        };
        assert!(fit_logistic(&one_group, &cfg).is_err());
        let cfg = FitConfig {
            step_size: 1e6,
            steps: 50,
            l2: 1e6,
            ..FitConfig::default()
        };
        assert!(matches!(
            fit_logistic(&separable(), &cfg),
            Err(Error::Divergence { .. })
        ));
    }

    #[test]
    fn model_json_shape() {
        let m = LogisticModel::new(0.5, -1.0, None);
        let v = serde_json::to_value(&m).unwrap();
        assert!(v["coef_g"].is_null());
        assert_eq!(v["bias"], 0.5);
        assert!(v["config"].is_object());
    }
}
