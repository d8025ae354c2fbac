//! Selfish-client attack: per-coordinate optimal targets and the crafted
//! shares that realize them under each aggregation rule.
//!
//! For a non-selfish receiver `i` and coordinate `k` the selfish clients know
//! `w` (the receiver's pre-aggregation value), the benign shares `q`, and
//! hence `w_tilde = Agg(q)`. They pick the target `w*` minimizing
//! `(x - w)^2 - lambda (x - w_tilde)^2` over the range the rule allows
//! ([`solve_optimal_coordinate`]) and then craft `m` values that make the
//! rule output exactly `w*`.

mod detector;
mod fedavg;
mod flame;
mod median;
mod solver;
mod trimmed;

pub use detector::AttackStartDetector;
pub use fedavg::{craft_fedavg, fedavg_bounds};
pub use flame::craft_flame_attack;
pub use median::{craft_median, median_bounds, median_branch, MedianBranch};
pub use solver::{attack_objective, solve_optimal_coordinate, CoordinateBounds, LAMBDA_ONE_TOLERANCE};
pub use trimmed::{craft_trimmed_mean, craft_trimmed_mean_with_case, trim_bounds, trim_case, TrimCase};

use serde::{Deserialize, Serialize};

use crate::aggregation::{agg_fedavg, agg_median, agg_trimmed_mean, AggregationRule};
use crate::error::{Error, Result};
use crate::model::{check_dims, ModelVector};

/// The `m` shares selfish clients `n..n+m` send to one non-selfish receiver,
/// in sender order.
#[derive(Clone, Debug, PartialEq)]
pub struct CraftedShares(Vec<ModelVector>);

impl CraftedShares {
    pub fn new(shares: Vec<ModelVector>) -> Self {
        Self(shares)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Share of the `offset`-th selfish client (sender `n + offset`).
    pub fn get(&self, offset: usize) -> &ModelVector {
        &self.0[offset]
    }

    pub fn as_slice(&self) -> &[ModelVector] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<ModelVector> {
        self.0
    }

    /// Builds shares from per-coordinate columns: `columns[k][j]` is coordinate
    /// `k` of share `j`.
    fn from_columns(columns: &[Vec<f64>], m: usize) -> Result<Self> {
        let shares = (0..m)
            .map(|j| ModelVector::new(columns.iter().map(|col| col[j]).collect()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self(shares))
    }
}

/// Attack hyper-parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackPlan {
    /// Weight of the competitive-advantage term.
    pub lambda: f64,
    /// Offset used for values pushed beyond the benign extremes.
    pub b: f64,
    /// Attack-start threshold.
    pub epsilon: f64,
    /// Attack-start loss window, in rounds.
    pub interval: usize,
    pub flame_alpha: f64,
    pub flame_beta: f64,
}

impl AttackPlan {
    /// Defaults for attacking `rule`: `lambda` is 0 for FedAvg (and the rules
    /// attacked through FedAvg crafting), 0.5 for Median, 1.0 for Trimmed-mean.
    pub fn for_rule(rule: &AggregationRule) -> Self {
        let lambda = match rule {
            AggregationRule::Median | AggregationRule::Flame { .. } => 0.5,
            AggregationRule::TrimmedMean { .. } => 1.0,
            AggregationRule::FedAvg | AggregationRule::Krum { .. } | AggregationRule::FlTrust => 0.0,
        };
        Self {
            lambda,
            b: 1.0,
            epsilon: 0.1,
            interval: 50,
            flame_alpha: 5.0,
            flame_beta: 0.01,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return fail(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if !(self.b > 0.0) || !self.b.is_finite() {
            return fail(format!("b must be > 0, got {}", self.b));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return fail(format!("epsilon must be in (0, 1], got {}", self.epsilon));
        }
        if self.interval == 0 {
            return fail("interval must be >= 1".into());
        }
        if !(self.flame_alpha > 0.0) || !(self.flame_beta > 0.0) {
            return fail("flame alpha and beta must be > 0".into());
        }
        Ok(())
    }

    pub fn detector(&self) -> Result<AttackStartDetector> {
        AttackStartDetector::new(self.epsilon, self.interval)
    }
}

/// Per-coordinate crafting strategy for a target rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CoordinateStrategy {
    Mean,
    Median,
    Trimmed,
}

/// Crafts the shares sent to one non-selfish receiver.
///
/// `benign_shares` are the `n` non-selfish shares the receiver aggregates
/// (its own included). FedAvg, Median and Trimmed-mean are attacked
/// optimally per coordinate; Krum and FLTrust receive the FedAvg-crafted
/// shares; FLAME receives [`craft_flame_attack`].
pub fn craft_shared_model(
    rule: &AggregationRule,
    receiver_pre_agg: &ModelVector,
    benign_shares: &[ModelVector],
    m: usize,
    plan: &AttackPlan,
) -> Result<CraftedShares> {
    plan.validate()?;
    let dim = check_dims(benign_shares)?;
    if receiver_pre_agg.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: receiver_pre_agg.dim(),
        });
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }

    let (strategy, counterfactual) = match *rule {
        AggregationRule::Flame { .. } => {
            return craft_flame_attack(receiver_pre_agg, benign_shares, m, plan.flame_alpha, plan.flame_beta)
        }
        AggregationRule::FedAvg | AggregationRule::Krum { .. } | AggregationRule::FlTrust => {
            (CoordinateStrategy::Mean, agg_fedavg(benign_shares)?)
        }
        AggregationRule::Median => (CoordinateStrategy::Median, agg_median(benign_shares)?),
        AggregationRule::TrimmedMean { c } => {
            if c != m {
                return Err(Error::TrimCountMismatch { c, m });
            }
            (CoordinateStrategy::Trimmed, agg_trimmed_mean(benign_shares, m)?)
        }
    };

    let mut q = Vec::with_capacity(benign_shares.len());
    let mut columns = Vec::with_capacity(dim);
    for k in 0..dim {
        q.clear();
        q.extend(benign_shares.iter().map(|share| share[k]));
        let w = receiver_pre_agg[k];
        let w_tilde = counterfactual[k];
        let column = match strategy {
            CoordinateStrategy::Mean => {
                let bounds = fedavg_bounds(&q)?;
                let target = solve_optimal_coordinate(w, w_tilde, bounds, plan.lambda)?;
                craft_fedavg(&q, target, m)?
            }
            CoordinateStrategy::Median => {
                q.sort_by(|a, b| b.total_cmp(a));
                let bounds = median_bounds(&q, m)?;
                let target = solve_optimal_coordinate(w, w_tilde, bounds, plan.lambda)?;
                craft_median(&q, target, m, plan.b)?
            }
            CoordinateStrategy::Trimmed => {
                q.sort_by(|a, b| b.total_cmp(a));
                let bounds = trim_bounds(&q, m)?;
                let target = solve_optimal_coordinate(w, w_tilde, bounds, plan.lambda)?;
                craft_trimmed_mean(&q, target, m, plan.b)?
            }
        };
        columns.push(column);
    }
    CraftedShares::from_columns(&columns, m)
}
