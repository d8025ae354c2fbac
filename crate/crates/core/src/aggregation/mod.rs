//! Aggregation rules: map the shared models a client received to its
//! post-aggregation local model.
//!
//! | Rule | Kind |
//! |------|------|
//! | [`agg_fedavg`] | coordinate-wise mean |
//! | [`agg_median`] | coordinate-wise median |
//! | [`agg_trimmed_mean`] | coordinate-wise mean after dropping `c` extremes per side |
//! | [`agg_krum`] | selects one input |
//! | [`agg_fltrust`] | trust-weighted, norm-rescaled average |
//! | [`agg_flame`] | majority-cluster admission, norm clipping, average |

mod coordinate;
mod flame;
mod fltrust;
mod krum;

pub use coordinate::{agg_fedavg, agg_median, agg_trimmed_mean, median_of_sorted};
pub use flame::{agg_flame, flame_admitted};
pub use fltrust::agg_fltrust;
pub use krum::{agg_krum, krum_select};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::ModelVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AggregationRule {
    #[serde(rename = "fedavg")]
    FedAvg,
    Median,
    /// Drops the `c` largest and `c` smallest values per coordinate.
    TrimmedMean {
        c: usize,
    },
    /// `f` is the assumed attacker count; scores use the closest `count - f - 2` neighbors.
    Krum {
        f: usize,
    },
    #[serde(rename = "fltrust")]
    FlTrust,
    Flame {
        clip: bool,
    },
}

impl AggregationRule {
    pub fn name(&self) -> &'static str {
        match self {
            AggregationRule::FedAvg => "fedavg",
            AggregationRule::Median => "median",
            AggregationRule::TrimmedMean { .. } => "trimmed_mean",
            AggregationRule::Krum { .. } => "krum",
            AggregationRule::FlTrust => "fltrust",
            AggregationRule::Flame { .. } => "flame",
        }
    }

    /// Aggregates `models`. `receiver_pre_agg` is the receiving client's own
    /// pre-aggregation model, used as the reference by FLTrust.
    pub fn aggregate(&self, models: &[ModelVector], receiver_pre_agg: &ModelVector) -> Result<ModelVector> {
        match *self {
            AggregationRule::FedAvg => agg_fedavg(models),
            AggregationRule::Median => agg_median(models),
            AggregationRule::TrimmedMean { c } => agg_trimmed_mean(models, c),
            AggregationRule::Krum { f } => agg_krum(models, f),
            AggregationRule::FlTrust => agg_fltrust(models, receiver_pre_agg),
            AggregationRule::Flame { clip } => agg_flame(models, clip),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_serde_shape() {
        let json = serde_json::to_string(&AggregationRule::TrimmedMean { c: 6 }).unwrap();
        assert_eq!(json, r#"{"kind":"trimmed_mean","c":6}"#);
        let rule: AggregationRule = serde_json::from_str(r#"{"kind":"fedavg"}"#).unwrap();
        assert_eq!(rule, AggregationRule::FedAvg);
    }
}
