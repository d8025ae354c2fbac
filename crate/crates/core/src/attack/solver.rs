use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Range the post-aggregation coordinate can be steered into.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateBounds {
    pub lower: f64,
    pub upper: f64,
}

impl CoordinateBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        let bounds = Self { lower, upper };
        bounds.validate()?;
        Ok(bounds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower > self.upper || self.lower.is_nan() || self.upper.is_nan() {
            return Err(Error::InvalidBounds {
                lower: self.lower,
                upper: self.upper,
            });
        }
        Ok(())
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub(crate) fn check(&self, value: f64) -> Result<()> {
        if self.contains(value) {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                value,
                lower: self.lower,
                upper: self.upper,
            })
        }
    }
}

/// `lambda` within this distance of 1 is treated as exactly 1.
pub const LAMBDA_ONE_TOLERANCE: f64 = 1e-9;

/// Per-coordinate objective `(x - w)^2 - lambda * (x - w_tilde)^2`.
pub fn attack_objective(x: f64, w: f64, w_tilde: f64, lambda: f64) -> f64 {
    (x - w).powi(2) - lambda * (x - w_tilde).powi(2)
}

/// Minimizer of [`attack_objective`] over `bounds`.
///
/// * `lambda < 1`: the vertex `p = (w - lambda * w_tilde) / (1 - lambda)` clamped into bounds.
/// * `lambda = 1`: the objective is linear; `upper` when `w > w_tilde`, else `lower`.
/// * `lambda > 1`: concave; whichever endpoint is strictly farther from `p`, ties to `lower`.
pub fn solve_optimal_coordinate(w: f64, w_tilde: f64, bounds: CoordinateBounds, lambda: f64) -> Result<f64> {
    bounds.validate()?;
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
    }
    let CoordinateBounds { lower, upper } = bounds;

    if (lambda - 1.0).abs() <= LAMBDA_ONE_TOLERANCE {
        return Ok(if w > w_tilde { upper } else { lower });
    }
    let p = (w - lambda * w_tilde) / (1.0 - lambda);
    if lambda < 1.0 {
        Ok(p.clamp(lower, upper))
    } else if (p - upper).abs() > (p - lower).abs() {
        Ok(upper)
    } else {
        Ok(lower)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(lower: f64, upper: f64) -> CoordinateBounds {
        CoordinateBounds::new(lower, upper).unwrap()
    }

    #[test]
    fn lambda_zero_returns_w() {
        assert_eq!(solve_optimal_coordinate(1.0, 123.0, b(-5.0, 5.0), 0.0).unwrap(), 1.0);
        assert_eq!(solve_optimal_coordinate(9.0, 0.0, b(-5.0, 5.0), 0.0).unwrap(), 5.0);
    }

    #[test]
    fn lambda_half_vertex_on_boundary() {
        assert_eq!(solve_optimal_coordinate(1.0, 0.0, b(-2.0, 2.0), 0.5).unwrap(), 2.0);
    }

    #[test]
    fn lambda_one_picks_endpoint() {
        assert_eq!(solve_optimal_coordinate(1.0, 0.5, b(0.0, 3.0), 1.0).unwrap(), 3.0);
        assert_eq!(solve_optimal_coordinate(0.5, 1.0, b(0.0, 3.0), 1.0).unwrap(), 0.0);
        // w == w_tilde goes to lower
        assert_eq!(solve_optimal_coordinate(1.0, 1.0, b(0.0, 3.0), 1.0).unwrap(), 0.0);
        // near-1 lambda takes the same branch
        assert_eq!(
            solve_optimal_coordinate(1.0, 0.5, b(0.0, 3.0), 1.0 + 1e-12).unwrap(),
            3.0
        );
    }

    #[test]
    fn lambda_two_farther_endpoint() {
        // p = 3; |3 - 4| = 1 < |3 - 0| = 3
        assert_eq!(solve_optimal_coordinate(1.0, 2.0, b(0.0, 4.0), 2.0).unwrap(), 0.0);
        assert!(attack_objective(0.0, 1.0, 2.0, 2.0) < attack_objective(4.0, 1.0, 2.0, 2.0));
    }

    #[test]
    fn lambda_above_one_tie_goes_to_lower() {
        // p = (w - 2 w~) / (-1) = 2 w~ - w = 2, equidistant from 0 and 4
        assert_eq!(solve_optimal_coordinate(0.0, 1.0, b(0.0, 4.0), 2.0).unwrap(), 0.0);
    }

    #[test]
    fn invalid_bounds() {
        let bounds = CoordinateBounds { lower: 2.0, upper: 1.0 };
        assert_eq!(
            solve_optimal_coordinate(0.0, 0.0, bounds, 0.5),
            Err(Error::InvalidBounds { lower: 2.0, upper: 1.0 })
        );
        assert!(CoordinateBounds::new(1.0, 0.0).is_err());
    }
}
