//! Attacking coordinate-wise Trimmed-mean with trim count `c = m`.
//!
//! Crafted values split into Part I values placed beyond the benign extremes
//! (so the defender trims them) and Part II values placed inside the
//! surviving window and tuned so the trimmed mean lands on the target.

use crate::error::{Error, Result};

use super::median::check_descending;
use super::solver::CoordinateBounds;

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// `upper = mean(q[0..n-m])`, `lower = mean(q[m..n])`.
pub fn trim_bounds(q: &[f64], m: usize) -> Result<CoordinateBounds> {
    check_descending(q)?;
    let n = q.len();
    if n <= m {
        return Err(Error::TooFewValues { n, m });
    }
    CoordinateBounds::new(mean(&q[m..]), mean(&q[..n - m]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrimCase {
    /// Target at or below the benign trimmed mean: Part I goes below `q[n-1]`.
    Lower,
    /// Target above the benign trimmed mean: Part I goes above `q[0]`.
    Upper,
}

/// Benign-only trimmed mean `mean(q[m..n-m])`.
fn benign_trimmed_mean(q: &[f64], m: usize) -> Result<f64> {
    let n = q.len();
    if n <= 2 * m {
        return Err(Error::TooFewValues { n, m: 2 * m });
    }
    Ok(mean(&q[m..n - m]))
}

pub fn trim_case(q: &[f64], w_star: f64, m: usize) -> Result<TrimCase> {
    Ok(if w_star <= benign_trimmed_mean(q, m)? {
        TrimCase::Lower
    } else {
        TrimCase::Upper
    })
}

/// `m` values making the trimmed mean (`c = m`) of `q` plus them exactly `w_star`.
///
/// Output order is Part II values first, then Part I values.
pub fn craft_trimmed_mean(q: &[f64], w_star: f64, m: usize, b: f64) -> Result<Vec<f64>> {
    craft_trimmed_mean_with_case(q, w_star, m, b).map(|(values, _)| values)
}

pub fn craft_trimmed_mean_with_case(q: &[f64], w_star: f64, m: usize, b: f64) -> Result<(Vec<f64>, TrimCase)> {
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(format!("b must be > 0, got {b}")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    trim_bounds(q, m)?.check(w_star)?;
    let case = trim_case(q, w_star, m)?;
    let n = q.len();
    let kept = (n - m) as f64;
    let target_sum = kept * w_star;
    let scale = q.iter().fold(w_star.abs(), |acc, v| acc.max(v.abs())).max(1.0);
    let tol = 1e-12 * scale;

    let values = match case {
        TrimCase::Lower => {
            // largest r <= n with w* <= ((n - r) q[m-1] + sum q[m..r]) / (n - m)
            let r = (m..=n)
                .rev()
                .find(|&r| {
                    let rhs = ((n - r) as f64 * q[m - 1] + q[m..r].iter().sum::<f64>()) / kept;
                    w_star <= rhs + tol
                })
                .ok_or(Error::SearchFailure { value: w_star })?;
            let part_one = q[n - 1] - b;
            let part_two_count = n - r;
            let mut out = Vec::with_capacity(m);
            if part_two_count > 0 {
                let c_hat = (target_sum - q[m..r].iter().sum::<f64>()) / part_two_count as f64;
                out.extend(std::iter::repeat_n(c_hat, part_two_count));
            }
            out.extend(std::iter::repeat_n(part_one, m - part_two_count));
            out
        }
        TrimCase::Upper => {
            // smallest r >= -1 with w* >= ((r + 1) q[n-m] + sum q[r+1..n-m]) / (n - m);
            // `s = r + 1` is the number of Part II values
            let s = (0..=m)
                .find(|&s| {
                    let rhs = (s as f64 * q[n - m] + q[s..n - m].iter().sum::<f64>()) / kept;
                    w_star >= rhs - tol
                })
                .ok_or(Error::SearchFailure { value: w_star })?;
            let part_one = q[0] + b;
            let mut out = Vec::with_capacity(m);
            if s > 0 {
                let c_hat = (target_sum - q[s..n - m].iter().sum::<f64>()) / s as f64;
                out.extend(std::iter::repeat_n(c_hat, s));
            }
            out.extend(std::iter::repeat_n(part_one, m - s));
            out
        }
    };
    Ok((values, case))
}
