//! Coordinate-wise rules. Each coordinate is gathered, sorted with a total
//! order, and reduced; summing in sorted order keeps results independent of
//! input order.

use crate::error::{Error, Result};
use crate::model::{check_dims, ModelVector};

fn per_coordinate(models: &[ModelVector], reduce: impl Fn(&[f64]) -> f64) -> Result<ModelVector> {
    let dim = check_dims(models)?;
    let mut column = Vec::with_capacity(models.len());
    let mut out = Vec::with_capacity(dim);
    for k in 0..dim {
        column.clear();
        column.extend(models.iter().map(|m| m[k]));
        column.sort_by(f64::total_cmp);
        out.push(reduce(&column));
    }
    ModelVector::new(out)
}

fn mean(sorted: &[f64]) -> f64 {
    sorted.iter().sum::<f64>() / sorted.len() as f64
}

/// Median of an ascending-sorted, non-empty slice.
pub fn median_of_sorted(sorted: &[f64]) -> f64 {
    let len = sorted.len();
    let mid = len / 2;
    if len % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}

pub fn agg_fedavg(models: &[ModelVector]) -> Result<ModelVector> {
    per_coordinate(models, mean)
}

pub fn agg_median(models: &[ModelVector]) -> Result<ModelVector> {
    per_coordinate(models, median_of_sorted)
}

pub fn agg_trimmed_mean(models: &[ModelVector], c: usize) -> Result<ModelVector> {
    if models.len() <= 2 * c {
        if models.is_empty() {
            return Err(Error::EmptyInput);
        }
        return Err(Error::EmptyAfterTrim {
            count: models.len(),
            trim: c,
        });
    }
    per_coordinate(models, |sorted| mean(&sorted[c..sorted.len() - c]))
}
