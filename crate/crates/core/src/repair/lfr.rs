//! Prototype-based fair representation learning for a single feature.
//!
//! Each value `x_n` is soft-assigned to `k` prototypes `v_k` through
//! `M_nk = softmax_k(-(x_n - v_k)^2)`. The representation reconstructs
//! `x_hat_n = sum_k M_nk v_k` and predicts `y_hat_n = sum_k M_nk w_k` from
//! per-prototype labels `w_k`. Training minimizes
//!
//! ```text
//! L = a_x * L_x + a_y * L_y + a_z * L_z
//! L_x = mean_n (x_n - x_hat_n)^2
//! L_y = mean_n -[y_n ln y_hat_n + (1 - y_n) ln(1 - y_hat_n)]
//! L_z = sum_k | mean_{g=1} M_nk - mean_{g=0} M_nk |
//! ```
//!
//! by full-batch gradient descent, with labels projected back onto `[0, 1]`
//! after each step and `y_hat` clamped to `[EPS, 1 - EPS]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Record};
use crate::error::{Error, Result};
use crate::rng;

/// Clamp applied to predicted labels before taking logarithms.
pub const EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LfrParams {
    pub k: usize,
    pub a_x: f64,
    pub a_y: f64,
    pub a_z: f64,
    pub steps: usize,
    pub step_size: f64,
    pub seed: u64,
    pub threshold: f64,
}

impl Default for LfrParams {
    fn default() -> Self {
        Self {
            k: 5,
            a_x: 0.01,
            a_y: 1.0,
            a_z: 50.0,
            steps: 2000,
            step_size: 0.01,
            seed: 0,
            threshold: 0.5,
        }
    }
}

impl LfrParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        for (name, a) in [("a_x", self.a_x), ("a_y", self.a_y), ("a_z", self.a_z)] {
            if !(a >= 0.0) || !a.is_finite() {
                return bad(format!(
                    "{name} must be a nonnegative finite number, got {a}"
                ));
            }
        }
        if self.steps == 0 {
            return bad("steps must be at least 1".into());
        }
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return bad(format!(
                "step_size must be positive, got {}",
                self.step_size
            ));
        }
        check_threshold(self.threshold)
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "threshold must lie in (0, 1), got {t}"
        )))
    }
}

/// Objective value split into its parts (unweighted) and the weighted total.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LfrLoss {
    pub total: f64,
    pub reconstruction: f64,
    pub prediction: f64,
    pub parity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfrModel {
    pub prototypes: Vec<f64>,
    pub prototype_labels: Vec<f64>,
    pub params: LfrParams,
    pub initial_loss: LfrLoss,
    pub final_loss: LfrLoss,
    /// Loss before each step followed by the loss after the last step.
    #[serde(skip)]
    pub trace: Vec<LfrLoss>,
}

impl LfrModel {
    /// A model with given parameters and no training history.
    pub fn from_parts(prototypes: Vec<f64>, prototype_labels: Vec<f64>) -> Result<Self> {
        if prototypes.is_empty() || prototypes.len() != prototype_labels.len() {
            return Err(Error::InvalidArgument(
                "prototypes and labels must be nonempty and of equal length".into(),
            ));
        }
        if prototype_labels.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::InvalidArgument(
                "prototype labels must lie in [0, 1]".into(),
            ));
        }
        let params = LfrParams {
            k: prototypes.len(),
            ..LfrParams::default()
        };
        Ok(Self {
            prototypes,
            prototype_labels,
            params,
            initial_loss: LfrLoss::default(),
            final_loss: LfrLoss::default(),
            trace: Vec::new(),
        })
    }

    pub fn k(&self) -> usize {
        self.prototypes.len()
    }
}

/// Writes `softmax_k(-(x - v_k)^2)` into `out`.
fn assign(x: f64, prototypes: &[f64], out: &mut [f64]) {
    let mut max = f64::NEG_INFINITY;
    for (o, v) in out.iter_mut().zip(prototypes) {
        *o = -(x - v) * (x - v);
        max = max.max(*o);
    }
    let mut sum = 0.0;
    for o in out.iter_mut() {
        *o = (*o - max).exp();
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Borrowed view of the training columns.
struct Columns {
    x: Vec<f64>,
    y: Vec<f64>,
    g: Vec<u8>,
    group_sizes: [f64; 2],
    /// `+1/N1` for group 1, `-1/N0` for group 0: the parity contrast per record.
    contrast: Vec<f64>,
}

impl Columns {
    fn new(data: &Dataset) -> Result<Self> {
        let counts = data.group_counts();
        let n1 = counts.get(&1).copied().unwrap_or(0);
        let n0 = counts.get(&0).copied().unwrap_or(0);
        if n1 == 0 || n0 == 0 {
            return Err(Error::UndefinedRepair(
                "representation learning needs both groups present".into(),
            ));
        }
        let records = data.records();
        Ok(Self {
            x: records.iter().map(|r| r.v).collect(),
            y: records.iter().map(|r| r.y as f64).collect(),
            g: records.iter().map(|r| r.g).collect(),
            group_sizes: [n0 as f64, n1 as f64],
            contrast: records
                .iter()
                .map(|r| {
                    if r.g == 1 {
                        1.0 / n1 as f64
                    } else {
                        -1.0 / n0 as f64
                    }
                })
                .collect(),
        })
    }

    fn len(&self) -> usize {
        self.x.len()
    }
}

/// Workspace for repeated objective evaluations.
struct Objective<'a> {
    cols: &'a Columns,
    params: &'a LfrParams,
    assignments: Vec<f64>,
}

impl<'a> Objective<'a> {
    fn new(cols: &'a Columns, params: &'a LfrParams, k: usize) -> Self {
        Self {
            cols,
            params,
            assignments: vec![0.0; cols.len() * k],
        }
    }

    /// Loss at `(prototypes, labels)`; fills `grad_v`/`grad_w` when given.
    fn evaluate(
        &mut self,
        prototypes: &[f64],
        labels: &[f64],
        grad: Option<(&mut [f64], &mut [f64])>,
    ) -> LfrLoss {
        let k = prototypes.len();
        let n = self.cols.len();
        let inv_n = 1.0 / n as f64;
        // Per-group assignment sums, as `group_mass[g * k + j]`.
        let mut group_mass = vec![0.0; 2 * k];
        let mut lx = 0.0;
        let mut ly = 0.0;
        for i in 0..n {
            let m = &mut self.assignments[i * k..(i + 1) * k];
            assign(self.cols.x[i], prototypes, m);
            let x_hat = dot(m, prototypes);
            let y_hat = dot(m, labels).clamp(EPS, 1.0 - EPS);
            let y = self.cols.y[i];
            lx += (self.cols.x[i] - x_hat).powi(2);
            ly -= y * y_hat.ln() + (1.0 - y) * (1.0 - y_hat).ln();
            let g = self.cols.g[i] as usize;
            for (s, mk) in group_mass[g * k..(g + 1) * k].iter_mut().zip(m.iter()) {
                *s += mk;
            }
        }
        let [n0, n1] = self.cols.group_sizes;
        let parity_diff: Vec<f64> = (0..k)
            .map(|j| group_mass[k + j] / n1 - group_mass[j] / n0)
            .collect();
        lx *= inv_n;
        ly *= inv_n;
        let lz: f64 = parity_diff.iter().map(|d| d.abs()).sum();
        let p = self.params;
        let loss = LfrLoss {
            total: p.a_x * lx + p.a_y * ly + p.a_z * lz,
            reconstruction: lx,
            prediction: ly,
            parity: lz,
        };

        if let Some((grad_v, grad_w)) = grad {
            grad_v.iter_mut().for_each(|g| *g = 0.0);
            grad_w.iter_mut().for_each(|g| *g = 0.0);
            let signs: Vec<f64> = parity_diff
                .iter()
                .map(|d| {
                    if *d > 0.0 {
                        1.0
                    } else if *d < 0.0 {
                        -1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            for i in 0..n {
                let m = &self.assignments[i * k..(i + 1) * k];
                let x = self.cols.x[i];
                let y = self.cols.y[i];
                let x_hat = dot(m, prototypes);
                let y_raw = dot(m, labels);
                let e_x = -2.0 * (x - x_hat) * inv_n * p.a_x;
                let e_y = if (EPS..=1.0 - EPS).contains(&y_raw) {
                    -(y / y_raw - (1.0 - y) / (1.0 - y_raw)) * inv_n * p.a_y
                } else {
                    0.0
                };
                let e_z = self.cols.contrast[i] * p.a_z;
                let mean_sign = dot(m, &signs);
                for j in 0..k {
                    // d(-(x - v_j)^2)/dv_j
                    let s = 2.0 * (x - prototypes[j]);
                    let ms = m[j] * s;
                    grad_v[j] += e_x * (m[j] + ms * (prototypes[j] - x_hat))
                        + e_y * ms * (labels[j] - y_raw)
                        + e_z * ms * (signs[j] - mean_sign);
                    grad_w[j] += e_y * m[j];
                }
            }
        }
        loss
    }
}

/// Objective value of `(prototypes, labels)` on `data`.
pub fn lfr_loss(
    data: &Dataset,
    prototypes: &[f64],
    labels: &[f64],
    params: &LfrParams,
) -> Result<LfrLoss> {
    check_parameters(prototypes, labels)?;
    let cols = Columns::new(data)?;
    Ok(Objective::new(&cols, params, prototypes.len()).evaluate(prototypes, labels, None))
}

/// Analytic gradient of the objective with respect to prototypes and labels.
pub fn lfr_gradient(
    data: &Dataset,
    prototypes: &[f64],
    labels: &[f64],
    params: &LfrParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_parameters(prototypes, labels)?;
    let cols = Columns::new(data)?;
    let k = prototypes.len();
    let (mut gv, mut gw) = (vec![0.0; k], vec![0.0; k]);
    Objective::new(&cols, params, k).evaluate(prototypes, labels, Some((&mut gv, &mut gw)));
    Ok((gv, gw))
}

fn check_parameters(prototypes: &[f64], labels: &[f64]) -> Result<()> {
    if prototypes.is_empty() || prototypes.len() != labels.len() {
        return Err(Error::InvalidArgument(
            "prototypes and labels must be nonempty and of equal length".into(),
        ));
    }
    Ok(())
}

/// Trains prototypes and labels on `data`.
///
/// Prototypes start uniformly between the smallest and largest `V`, labels at
/// 0.5.
pub fn lfr_fit(data: &Dataset, params: &LfrParams) -> Result<LfrModel> {
    params.validate()?;
    let cols = Columns::new(data)?;
    let (lo, hi) = cols
        .x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let mut rng = rng::seeded(params.seed);
    let k = params.k;
    let mut prototypes: Vec<f64> = (0..k).map(|_| lo + (hi - lo) * rng.gen::<f64>()).collect();
    let mut labels = vec![0.5; k];
    let (mut gv, mut gw) = (vec![0.0; k], vec![0.0; k]);
    let mut objective = Objective::new(&cols, params, k);
    let mut trace = Vec::with_capacity(params.steps + 1);

    for iteration in 0..params.steps {
        let loss = objective.evaluate(&prototypes, &labels, Some((&mut gv, &mut gw)));
        if !loss.total.is_finite() {
            return Err(Error::Divergence {
                iteration,
                loss: loss.total,
            });
        }
        trace.push(loss);
        for (v, g) in prototypes.iter_mut().zip(&gv) {
            *v -= params.step_size * g;
        }
        for (w, g) in labels.iter_mut().zip(&gw) {
            *w = (*w - params.step_size * g).clamp(0.0, 1.0);
        }
    }
    let last = objective.evaluate(&prototypes, &labels, None);
    if !last.total.is_finite() || prototypes.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence {
            iteration: params.steps,
            loss: last.total,
        });
    }
    trace.push(last);

    Ok(LfrModel {
        prototypes,
        prototype_labels: labels,
        params: params.clone(),
        initial_loss: trace[0],
        final_loss: last,
        trace,
    })
}

/// Replaces each record's `v` with its reconstruction and `y` with the
/// thresholded prediction; `g` and `w` are kept.
pub fn lfr_transform(model: &LfrModel, data: &Dataset, threshold: f64) -> Result<Dataset> {
    check_threshold(threshold)?;
    check_parameters(&model.prototypes, &model.prototype_labels)?;
    let mut m = vec![0.0; model.k()];
    let records: Vec<Record> = data
        .records()
        .iter()
        .map(|r| {
            assign(r.v, &model.prototypes, &mut m);
            let x_hat = dot(&m, &model.prototypes);
            let y_hat = dot(&m, &model.prototype_labels).clamp(EPS, 1.0 - EPS);
            Record {
                v: x_hat,
                y: u8::from(y_hat >= threshold),
                ..*r
            }
        })
        .collect();
    Ok(Dataset::from_records_unchecked(
        records,
        format!("{}-LFR", data.provenance()),
    ))
}
