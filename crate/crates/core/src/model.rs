//! Flat parameter vectors and client identities.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fixed-dimension vector of finite model parameters.
///
/// Every layered model is flattened into one of these at the trainer
/// boundary; aggregation and attack code only ever see flat vectors.
#[derive(Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ModelVector(Vec<f64>);

impl ModelVector {
    /// Builds a vector, rejecting NaN and infinities.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(values))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        dot(&self.0, &self.0).sqrt()
    }

    pub fn dot(&self, other: &ModelVector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn scaled(&self, factor: f64) -> Result<ModelVector> {
        ModelVector::new(self.0.iter().map(|v| v * factor).collect())
    }

    pub fn squared_distance(&self, other: &ModelVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    /// `1 - cos(self, other)`; a zero vector is treated as orthogonal to everything.
    pub fn cosine_distance(&self, other: &ModelVector) -> f64 {
        1.0 - self.cosine_similarity(other)
    }

    pub fn cosine_similarity(&self, other: &ModelVector) -> f64 {
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            0.0
        } else {
            (self.dot(other) / denom).clamp(-1.0, 1.0)
        }
    }
}

impl Index<usize> for ModelVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

impl fmt::Debug for ModelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl<'de> Deserialize<'de> for ModelVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(deserializer)?;
        ModelVector::new(values).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<Vec<f64>> for ModelVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        ModelVector::new(values)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checks that `models` is non-empty and every vector has the same dimension.
pub(crate) fn check_dims(models: &[ModelVector]) -> Result<usize> {
    let first = models.first().ok_or(Error::EmptyInput)?;
    let dim = first.dim();
    for model in &models[1..] {
        if model.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: model.dim(),
            });
        }
    }
    Ok(dim)
}

/// A client index in `[0, N)`. Indices `0..n` are non-selfish, `n..n+m` selfish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClientId(pub usize);

impl ClientId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ClientId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "client {}", self.0)
    }
}
