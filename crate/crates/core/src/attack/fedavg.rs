use crate::error::{Error, Result};

use super::solver::CoordinateBounds;

/// `[min(q), max(q)]` of the benign coordinates.
pub fn fedavg_bounds(q: &[f64]) -> Result<CoordinateBounds> {
    if q.is_empty() {
        return Err(Error::EmptyInput);
    }
    let lower = q.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    CoordinateBounds::new(lower, upper)
}

/// `m` values whose mean together with `q` is exactly `w_star`: one value
/// `(n + 1) * w_star - sum(q)`, the remaining `m - 1` equal to `w_star`.
pub fn craft_fedavg(q: &[f64], w_star: f64, m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    fedavg_bounds(q)?.check(w_star)?;
    let n = q.len() as f64;
    let sum: f64 = q.iter().sum();
    let mut out = vec![w_star; m];
    out[0] = (n + 1.0) * w_star - sum;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_with(q: &[f64], extra: &[f64]) -> f64 {
        let total: f64 = q.iter().chain(extra).sum();
        total / (q.len() + extra.len()) as f64
    }

    #[test]
    fn bounds_are_min_max() {
        assert_eq!(
            fedavg_bounds(&[1.0, 2.0, 3.0]).unwrap(),
            CoordinateBounds { lower: 1.0, upper: 3.0 }
        );
        assert_eq!(
            fedavg_bounds(&[5.0]).unwrap(),
            CoordinateBounds { lower: 5.0, upper: 5.0 }
        );
        assert_eq!(
            fedavg_bounds(&[-2.0, 7.0, 0.0]).unwrap(),
            CoordinateBounds {
                lower: -2.0,
                upper: 7.0
            }
        );
        assert_eq!(fedavg_bounds(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn crafted_mean_hits_target() {
        let q = [1.0, 2.0, 3.0];
        let crafted = craft_fedavg(&q, 2.0, 1).unwrap();
        assert_eq!(crafted, vec![2.0]);
        assert_eq!(mean_with(&q, &crafted), 2.0);

        let q = [1.0, 2.0, 3.0, 4.0];
        let crafted = craft_fedavg(&q, 2.0, 2).unwrap();
        assert_eq!(crafted, vec![0.0, 2.0]);
        assert_eq!(mean_with(&q, &crafted), 2.0);

        assert_eq!(craft_fedavg(&[4.0; 5], 4.0, 3).unwrap(), vec![4.0; 3]);
    }

    #[test]
    fn target_outside_range_rejected() {
        assert!(matches!(
            craft_fedavg(&[1.0, 2.0], 5.0, 1),
            Err(Error::OutOfBounds { .. })
        ));
    }
}
