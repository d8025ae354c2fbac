//! Comparison attacks and run modes: GaussianAttack, TrimAttack,
//! Independent training, and Two Coalitions.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::attack::CraftedShares;
use crate::error::{Error, Result};
use crate::exchange::RoundExchange;
use crate::model::{check_dims, ModelVector};
use crate::rng::Rng;
use crate::roles::RoleConfig;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaselineKind {
    /// Directed deviation beyond the benign range; offsets are fractions of
    /// the benign extreme, sampled in `[delta_lo, delta_hi]`.
    TrimAttack {
        #[serde(default = "default_delta_lo")]
        delta_lo: f64,
        #[serde(default = "default_delta_hi")]
        delta_hi: f64,
    },
    GaussianAttack {
        #[serde(default = "default_sigma")]
        sigma: f64,
    },
    /// Every client trains alone.
    Independent,
    /// Selfish and non-selfish clients run separate FedAvg federations.
    TwoCoalitions,
}

fn default_delta_lo() -> f64 {
    0.5
}

fn default_delta_hi() -> f64 {
    2.0
}

fn default_sigma() -> f64 {
    200.0
}

impl BaselineKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BaselineKind::TrimAttack { delta_lo, delta_hi } => {
                if !(delta_lo > 0.0 && delta_lo <= delta_hi && delta_hi.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "trim attack needs 0 < delta_lo <= delta_hi, got {delta_lo} and {delta_hi}"
                    )));
                }
            }
            BaselineKind::GaussianAttack { sigma } => {
                if !(sigma > 0.0) || !sigma.is_finite() {
                    return Err(Error::InvalidParameter(format!("sigma must be > 0, got {sigma}")));
                }
            }
            BaselineKind::Independent | BaselineKind::TwoCoalitions => {}
        }
        Ok(())
    }

    /// Whether selfish clients replace their shares to non-selfish clients.
    pub fn crafts_shares(&self) -> bool {
        matches!(
            self,
            BaselineKind::TrimAttack { .. } | BaselineKind::GaussianAttack { .. }
        )
    }
}

/// `m` shares with every coordinate drawn from `Normal(0, sigma^2)`.
pub fn craft_gaussian(dim: usize, m: usize, sigma: f64, rng: &mut Rng) -> Result<CraftedShares> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dim must be >= 1".into()));
    }
    BaselineKind::GaussianAttack { sigma }.validate()?;
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let shares = (0..m)
        .map(|_| ModelVector::new((0..dim).map(|_| normal.sample(rng)).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(CraftedShares::new(shares))
}

/// Directed-deviation shares.
///
/// Per coordinate, `s = sign(mean(benign) - prev_aggregate)`. When the benign
/// models move up (`s > 0`) each crafted value is drawn from
/// `[q_min - delta_hi |q_min|, q_min - delta_lo |q_min|]`; otherwise from
/// `[q_max + delta_lo |q_max|, q_max + delta_hi |q_max|]`. A zero extreme is
/// offset by exactly `delta_lo`.
pub fn craft_trim_attack(
    benign_shares: &[ModelVector],
    prev_aggregate: &ModelVector,
    m: usize,
    delta_lo: f64,
    delta_hi: f64,
    rng: &mut Rng,
) -> Result<CraftedShares> {
    BaselineKind::TrimAttack { delta_lo, delta_hi }.validate()?;
    let dim = check_dims(benign_shares)?;
    if prev_aggregate.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: prev_aggregate.dim(),
        });
    }
    let count = benign_shares.len() as f64;
    let mut columns = vec![vec![0.0; dim]; m];
    for k in 0..dim {
        let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for share in benign_shares {
            lo = lo.min(share[k]);
            hi = hi.max(share[k]);
            sum += share[k];
        }
        let rising = sum / count - prev_aggregate[k] > 0.0;
        for share in columns.iter_mut() {
            share[k] = if rising {
                if lo == 0.0 {
                    -delta_lo
                } else {
                    lo - rng.random_range(delta_lo..=delta_hi) * lo.abs()
                }
            } else if hi == 0.0 {
                delta_lo
            } else {
                hi + rng.random_range(delta_lo..=delta_hi) * hi.abs()
            };
        }
    }
    let shares = columns.into_iter().map(ModelVector::new).collect::<Result<Vec<_>>>()?;
    Ok(CraftedShares::new(shares))
}

fn same_coalition(roles: &RoleConfig, a: crate::ClientId, b: crate::ClientId) -> bool {
    roles.is_selfish(a) == roles.is_selfish(b)
}

/// Restricts who hears whom for the run modes. Attacks leave the exchange untouched.
pub fn run_mode_filter(mode: &BaselineKind, roles: &RoleConfig, mut exchange: RoundExchange) -> RoundExchange {
    match mode {
        BaselineKind::Independent => exchange.retain(|_, _| false),
        BaselineKind::TwoCoalitions => exchange.retain(|s, r| same_coalition(roles, s, r)),
        BaselineKind::TrimAttack { .. } | BaselineKind::GaussianAttack { .. } => {}
    }
    exchange
}
