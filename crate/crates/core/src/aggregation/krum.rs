use crate::error::{Error, Result};
use crate::model::{check_dims, ModelVector};

/// Index of the model Krum selects.
///
/// Each model is scored by the sum of squared Euclidean distances to its
/// closest `count - f - 2` other models; the lowest score wins, ties going to
/// the lowest index.
pub fn krum_select(models: &[ModelVector], f: usize) -> Result<usize> {
    let required = f + 3;
    if models.len() < required {
        return Err(Error::TooFewModels {
            required,
            got: models.len(),
        });
    }
    check_dims(models)?;
    let neighbors = models.len() - f - 2;

    let mut best = (0usize, f64::INFINITY);
    let mut distances = Vec::with_capacity(models.len() - 1);
    for (i, candidate) in models.iter().enumerate() {
        distances.clear();
        distances.extend(
            models
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, other)| candidate.squared_distance(other)),
        );
        distances.sort_by(f64::total_cmp);
        let score: f64 = distances[..neighbors].iter().sum();
        if score < best.1 {
            best = (i, score);
        }
    }
    Ok(best.0)
}

pub fn agg_krum(models: &[ModelVector], f: usize) -> Result<ModelVector> {
    krum_select(models, f).map(|i| models[i].clone())
}
