//! Attacking coordinate-wise Median.
//!
//! `q` is always the benign coordinates sorted in descending order.

use crate::error::{Error, Result};

use super::solver::CoordinateBounds;

pub(crate) fn check_descending(q: &[f64]) -> Result<()> {
    if q.windows(2).all(|w| w[0] >= w[1]) {
        Ok(())
    } else {
        Err(Error::NotSorted)
    }
}

/// Range of the median of `q` plus `m` arbitrary values: the median peaks
/// when all `m` sit above `q[0]` and bottoms out when all sit below `q[n-1]`.
pub fn median_bounds(q: &[f64], m: usize) -> Result<CoordinateBounds> {
    check_descending(q)?;
    let n = q.len();
    if n < m + 1 {
        return Err(Error::IndexOutOfRange { n, m });
    }
    let upper = (q[(n - m - 1) / 2] + q[(n - m) / 2]) / 2.0;
    let lower = (q[(n + m - 1) / 2] + q[(n + m) / 2]) / 2.0;
    CoordinateBounds::new(lower, upper)
}

/// Which crafting branch a target falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MedianBranch {
    /// `w_star > q[u]`: one value pairs with `q[u]`, the rest go above `q[0]`.
    Upper,
    /// `w_star < q[v]`: one value pairs with `q[v]`, the rest go below `q[n-1]`.
    Lower,
    /// All `m` values equal `w_star`.
    Plain,
}

pub fn median_branch(q: &[f64], w_star: f64, m: usize) -> MedianBranch {
    let n = q.len();
    let u = (n - m) / 2;
    let v = (n + m - 1) / 2;
    if w_star > q[u] {
        MedianBranch::Upper
    } else if w_star < q[v] {
        MedianBranch::Lower
    } else {
        MedianBranch::Plain
    }
}

/// `m` values that make the median of `q` plus them exactly `w_star`.
///
/// The first value is `2 w* - q[u]` / `2 w* - q[v]` / `w*` by branch, the
/// remaining `m - 1` are `q[0] + b` / `q[n-1] - b` / `w*`. The pairing
/// branches only arise when `n + m` is even.
pub fn craft_median(q: &[f64], w_star: f64, m: usize, b: f64) -> Result<Vec<f64>> {
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(format!("b must be > 0, got {b}")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    median_bounds(q, m)?.check(w_star)?;
    let n = q.len();
    let u = (n - m) / 2;
    let v = (n + m - 1) / 2;
    let (first, rest) = match median_branch(q, w_star, m) {
        MedianBranch::Upper => (2.0 * w_star - q[u], q[0] + b),
        MedianBranch::Lower => (2.0 * w_star - q[v], q[n - 1] - b),
        MedianBranch::Plain => (w_star, w_star),
    };
    let mut out = vec![rest; m];
    out[0] = first;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    // brute-force: median of q plus crafted values, by sorting
    fn median_with(q: &[f64], extra: &[f64]) -> f64 {
        let mut all: Vec<f64> = q.iter().chain(extra).copied().collect();
        all.sort_by(f64::total_cmp);
        let n = all.len();
        if n % 2 == 1 {
            all[n / 2]
        } else {
            (all[n / 2 - 1] + all[n / 2]) / 2.0
        }
    }

    #[test]
    fn bounds_match_extreme_appends() {
        let q = [4.0, 3.0, 2.0, 1.0];
        let bounds = median_bounds(&q, 2).unwrap();
        assert_eq!(bounds, CoordinateBounds { lower: 1.5, upper: 3.5 });
        assert_eq!(median_with(&q, &[100.0, 100.0]), 3.5);
        assert_eq!(median_with(&q, &[-100.0, -100.0]), 1.5);

        let q = [7.0, 6.0, 5.0, 4.0, 3.0, 2.0];
        assert_eq!(
            median_bounds(&q, 2).unwrap(),
            CoordinateBounds { lower: 3.5, upper: 5.5 }
        );

        for m in 1..=3 {
            assert_eq!(
                median_bounds(&[2.5; 4], m).unwrap(),
                CoordinateBounds { lower: 2.5, upper: 2.5 }
            );
        }
    }

    #[test]
    fn bounds_errors() {
        assert_eq!(median_bounds(&[1.0, 2.0], 1), Err(Error::NotSorted));
        assert_eq!(
            median_bounds(&[2.0, 1.0], 2),
            Err(Error::IndexOutOfRange { n: 2, m: 2 })
        );
    }

    #[test]
    fn exception_branch_pairs_with_q_u() {
        let q = [7.0, 6.0, 5.0, 4.0, 3.0, 2.0];
        let crafted = craft_median(&q, 5.25, 2, 1.0).unwrap();
        assert_eq!(crafted, vec![5.5, 8.0]);
        assert_eq!(median_with(&q, &crafted), 5.25);
    }

    #[test]
    fn plain_branch_repeats_target() {
        let q = [7.0, 6.0, 5.0, 4.0, 3.0, 2.0];
        let crafted = craft_median(&q, 4.5, 2, 1.0).unwrap();
        assert_eq!(crafted, vec![4.5, 4.5]);
        assert_eq!(median_with(&q, &crafted), 4.5);
        assert_eq!(craft_median(&[3.0; 5], 3.0, 1, 1.0).unwrap(), vec![3.0]);
    }

    #[test]
    fn lower_exception_branch() {
        let q = [7.0, 6.0, 5.0, 4.0, 3.0, 2.0];
        // v = 3, q[v] = 4; choose w* in [3.5, 4)
        let crafted = craft_median(&q, 3.75, 2, 1.0).unwrap();
        assert_eq!(crafted, vec![3.5, 1.0]);
        assert_eq!(median_with(&q, &crafted), 3.75);
    }

    #[test]
    fn out_of_bounds_target() {
        let q = [7.0, 6.0, 5.0, 4.0, 3.0, 2.0];
        assert!(matches!(craft_median(&q, 6.0, 2, 1.0), Err(Error::OutOfBounds { .. })));
        assert!(craft_median(&q, 4.5, 2, 0.0).is_err());
    }
}
