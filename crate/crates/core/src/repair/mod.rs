//! Pre-processing repairs and their JSON-configurable front door.

mod dir;
mod lfr;
mod weights;

pub use dir::dir_repair;
pub use lfr::{
    lfr_fit, lfr_gradient, lfr_loss, lfr_transform, LfrLoss, LfrModel, LfrParams, EPS as LFR_EPS,
};
pub use weights::{fair_balance, reweigh};

use serde::{Deserialize, Serialize};

use crate::dataset::{resample_by_weight, Dataset};
use crate::error::{Error, Result};

/// A repair method and its parameters.
///
/// Serialized as `{"method":"dir","lambda":0.5}`, `{"method":"reweigh"}`,
/// `{"method":"fairbalance","variant":true}` or `{"method":"lfr","k":5,...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum RepairConfig {
    Dir {
        lambda: f64,
    },
    Reweigh,
    #[serde(rename = "fairbalance")]
    FairBalance {
        #[serde(default)]
        variant: bool,
    },
    Lfr(LfrParams),
}

/// Output of applying a repair to one dataset.
#[derive(Debug, Clone)]
pub struct Repaired {
    pub data: Dataset,
    /// Present for representation learning, so the same mapping can be applied
    /// to other partitions.
    pub model: Option<LfrModel>,
}

impl RepairConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            RepairConfig::Dir { lambda } if !(0.0..=1.0).contains(lambda) => Err(
                Error::InvalidArgument(format!("repair level must lie in [0, 1], got {lambda}")),
            ),
            RepairConfig::Lfr(p) => p.validate(),
            _ => Ok(()),
        }
    }

    /// Human-readable name, e.g. `DIR(0.3)` or `FairBalanceVariant`.
    pub fn label(&self) -> String {
        match self {
            RepairConfig::Dir { lambda } => format!("DIR({lambda:?})"),
            RepairConfig::Reweigh => "Reweighing".into(),
            RepairConfig::FairBalance { variant: false } => "FairBalance".into(),
            RepairConfig::FairBalance { variant: true } => "FairBalanceVariant".into(),
            RepairConfig::Lfr(_) => "LFR".into(),
        }
    }

    /// Path-safe identifier, e.g. `dir_0.3` or `fairbalance_variant`.
    pub fn slug(&self) -> String {
        match self {
            RepairConfig::Dir { lambda } => format!("dir_{lambda:?}"),
            RepairConfig::Reweigh => "reweigh".into(),
            RepairConfig::FairBalance { variant: false } => "fairbalance".into(),
            RepairConfig::FairBalance { variant: true } => "fairbalance_variant".into(),
            RepairConfig::Lfr(_) => "lfr".into(),
        }
    }

    /// True for methods that only change weights.
    pub fn is_weighting(&self) -> bool {
        matches!(
            self,
            RepairConfig::Reweigh | RepairConfig::FairBalance { .. }
        )
    }

    /// Applies the repair. Weighting methods return weighted data; LFR fits on
    /// `data` and returns its transform together with the fitted model.
    pub fn apply(&self, data: &Dataset) -> Result<Repaired> {
        self.validate()?;
        let (data, model) = match self {
            RepairConfig::Dir { lambda } => (dir_repair(data, *lambda)?, None),
            RepairConfig::Reweigh => (reweigh(data)?, None),
            RepairConfig::FairBalance { variant } => (fair_balance(data, *variant)?, None),
            RepairConfig::Lfr(params) => {
                let model = lfr_fit(data, params)?;
                (lfr_transform(&model, data, params.threshold)?, Some(model))
            }
        };
        Ok(Repaired { data, model })
    }

    /// Applies the repair and turns weights into data by weighted resampling.
    pub fn materialize(&self, data: &Dataset, resample_seed: u64) -> Result<Repaired> {
        let mut repaired = self.apply(data)?;
        if self.is_weighting() {
            repaired.data = resample_by_weight(&repaired.data, resample_seed)?;
        }
        Ok(repaired)
    }

    /// The three DIR levels, the three weighting methods and LFR with defaults.
    pub fn reference_set(lfr_seed: u64) -> Vec<Self> {
        vec![
            RepairConfig::Dir { lambda: 0.3 },
            RepairConfig::Dir { lambda: 0.5 },
            RepairConfig::Dir { lambda: 1.0 },
            RepairConfig::Reweigh,
            RepairConfig::FairBalance { variant: false },
            RepairConfig::FairBalance { variant: true },
            RepairConfig::Lfr(LfrParams {
                seed: lfr_seed,
                ..LfrParams::default()
            }),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let cases = [
            (
                r#"{"method":"dir","lambda":0.5}"#,
                RepairConfig::Dir { lambda: 0.5 },
            ),
            (r#"{"method":"reweigh"}"#, RepairConfig::Reweigh),
            (
                r#"{"method":"fairbalance","variant":true}"#,
                RepairConfig::FairBalance { variant: true },
            ),
            (
                r#"{"method":"fairbalance"}"#,
                RepairConfig::FairBalance { variant: false },
            ),
        ];
        for (json, want) in cases {
            let got: RepairConfig = serde_json::from_str(json).unwrap();
            assert_eq!(got, want);
        }
        let lfr: RepairConfig = serde_json::from_str(r#"{"method":"lfr","k":3}"#).unwrap();
        match &lfr {
            RepairConfig::Lfr(p) => assert_eq!(p.k, 3),
            other => panic!("{other:?}"),
        }
        let back = serde_json::to_value(&lfr).unwrap();
        assert_eq!(back["method"], "lfr");
        assert_eq!(back["k"], 3);
        let dir = serde_json::to_string(&RepairConfig::Dir { lambda: 1.0 }).unwrap();
        assert_eq!(dir, r#"{"method":"dir","lambda":1.0}"#);
    }

    #[test]
    fn unknown_method_rejected() {
        assert!(serde_json::from_str::<RepairConfig>(r#"{"method":"massage"}"#).is_err());
    }

    #[test]
    fn labels_and_slugs() {
        let labels: Vec<String> = RepairConfig::reference_set(0)
            .iter()
            .map(RepairConfig::label)
            .collect();
        assert_eq!(
            labels,
            [
                "DIR(0.3)",
                "DIR(0.5)",
                "DIR(1.0)",
                "Reweighing",
                "FairBalance",
                "FairBalanceVariant",
                "LFR"
            ]
        );
        assert_eq!(RepairConfig::Dir { lambda: 0.5 }.slug(), "dir_0.5");
    }
}
