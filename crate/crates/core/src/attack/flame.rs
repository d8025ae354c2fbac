use crate::error::{Error, Result};
use crate::model::{check_dims, ModelVector};

use super::CraftedShares;

/// Crafted shares tailored to FLAME: every selfish share equals
/// `(sum(selected) + alpha * w_i - beta * sum(benign)) / (k + alpha - beta * n)`
/// where `selected` are the `k = floor((n - m) / 2)` benign shares closest in
/// cosine distance to the receiver's own model `w_i`.
pub fn craft_flame_attack(
    receiver_pre_agg: &ModelVector,
    benign_shares: &[ModelVector],
    m: usize,
    alpha: f64,
    beta: f64,
) -> Result<CraftedShares> {
    let dim = check_dims(benign_shares)?;
    if receiver_pre_agg.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: receiver_pre_agg.dim(),
        });
    }
    if !(alpha > 0.0) || !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha and beta must be > 0, got {alpha} and {beta}"
        )));
    }
    let n = benign_shares.len();
    if m == 0 || m >= n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= m < n, got m = {m}, n = {n}"
        )));
    }
    let k = (n - m) / 2;
    let denominator = k as f64 + alpha - beta * n as f64;
    if denominator.abs() < 1e-12 {
        return Err(Error::DegenerateDenominator(denominator));
    }

    let mut ranked: Vec<(f64, usize)> = benign_shares
        .iter()
        .enumerate()
        .map(|(h, share)| (share.cosine_distance(receiver_pre_agg), h))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut acc: Vec<f64> = receiver_pre_agg.as_slice().iter().map(|v| alpha * v).collect();
    for &(_, h) in &ranked[..k] {
        for (a, v) in acc.iter_mut().zip(benign_shares[h].as_slice()) {
            *a += v;
        }
    }
    for share in benign_shares {
        for (a, v) in acc.iter_mut().zip(share.as_slice()) {
            *a -= beta * v;
        }
    }
    let crafted = ModelVector::new(acc.into_iter().map(|a| a / denominator).collect())?;
    Ok(CraftedShares::new(vec![crafted; m]))
}
