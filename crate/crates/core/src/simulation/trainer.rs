use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelVector;
use crate::rng::Rng;

use super::data::Dataset;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainerConfig {
    pub learning_rate: f64,
    pub local_epochs: usize,
    pub batch_size: usize,
    #[serde(default)]
    pub weight_decay: f64,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.2,
            local_epochs: 3,
            batch_size: 32,
            weight_decay: 0.0,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "learning_rate must be >= 0, got {}",
                self.learning_rate
            )));
        }
        if self.local_epochs == 0 || self.batch_size == 0 {
            return Err(Error::InvalidParameter(
                "local_epochs and batch_size must be >= 1".into(),
            ));
        }
        if !(self.weight_decay >= 0.0) || !self.weight_decay.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "weight_decay must be >= 0, got {}",
                self.weight_decay
            )));
        }
        Ok(())
    }
}

/// A differentiable classifier over flat parameter vectors.
pub trait Trainer: Send + Sync {
    fn dim(&self) -> usize;

    /// Mean loss over `batch` and its gradient, written into `grad`.
    fn loss_and_grad(&self, params: &[f64], data: &Dataset, batch: &[usize], grad: &mut [f64]) -> f64;

    fn predict(&self, params: &[f64], x: &[f64]) -> usize;
}

/// Multinomial logistic regression. Parameters are the `C x f` weight matrix
/// (row-major) followed by `C` biases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LogisticRegression {
    pub features: usize,
    pub classes: usize,
}

impl LogisticRegression {
    pub fn new(features: usize, classes: usize) -> Self {
        Self { features, classes }
    }

    fn logits(&self, params: &[f64], x: &[f64], out: &mut [f64]) {
        let (weights, bias) = params.split_at(self.classes * self.features);
        for (c, z) in out.iter_mut().enumerate() {
            let row = &weights[c * self.features..(c + 1) * self.features];
            *z = bias[c] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
    }
}

impl Trainer for LogisticRegression {
    fn dim(&self) -> usize {
        self.classes * (self.features + 1)
    }

    fn loss_and_grad(&self, params: &[f64], data: &Dataset, batch: &[usize], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        if batch.is_empty() {
            return 0.0;
        }
        let bias_offset = self.classes * self.features;
        let mut probs = vec![0.0; self.classes];
        let mut loss = 0.0;
        for &i in batch {
            let x = data.features(i);
            let y = data.label(i);
            self.logits(params, x, &mut probs);
            let max = probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut total = 0.0;
            for p in probs.iter_mut() {
                *p = (*p - max).exp();
                total += *p;
            }
            // -log softmax_y = log(sum exp(z - max)) - (z_y - max)
            loss += total.ln() - probs[y].ln();
            for (c, p) in probs.iter_mut().enumerate() {
                *p /= total;
                let delta = *p - if c == y { 1.0 } else { 0.0 };
                for (g, v) in grad[c * self.features..(c + 1) * self.features].iter_mut().zip(x) {
                    *g += delta * v;
                }
                grad[bias_offset + c] += delta;
            }
        }
        let scale = 1.0 / batch.len() as f64;
        grad.iter_mut().for_each(|g| *g *= scale);
        loss * scale
    }

    fn predict(&self, params: &[f64], x: &[f64]) -> usize {
        let mut logits = vec![0.0; self.classes];
        self.logits(params, x, &mut logits);
        // first maximum wins
        let mut best = 0;
        for (c, &z) in logits.iter().enumerate() {
            if z > logits[best] {
                best = c;
            }
        }
        best
    }
}

/// Runs `local_epochs` of shuffled mini-batch gradient descent with decoupled
/// weight decay. Returns the updated model and the per-epoch mean losses,
/// each averaged over examples at the parameters in force for its batch.
pub fn train_epochs(
    trainer: &dyn Trainer,
    model: &ModelVector,
    data: &Dataset,
    cfg: &TrainerConfig,
    rng: &mut Rng,
) -> Result<(ModelVector, Vec<f64>)> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if model.dim() != trainer.dim() {
        return Err(Error::DimensionMismatch {
            expected: trainer.dim(),
            got: model.dim(),
        });
    }
    let mut params = model.as_slice().to_vec();
    let mut grad = vec![0.0; params.len()];
    let mut order: Vec<usize> = (0..data.len()).collect();
    let decay = 1.0 - cfg.learning_rate * cfg.weight_decay;
    let mut epoch_losses = Vec::with_capacity(cfg.local_epochs);
    for _ in 0..cfg.local_epochs {
        order.shuffle(rng);
        let mut weighted = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let loss = trainer.loss_and_grad(&params, data, batch, &mut grad);
            weighted += loss * batch.len() as f64;
            for (p, g) in params.iter_mut().zip(&grad) {
                *p = decay * *p - cfg.learning_rate * g;
            }
        }
        epoch_losses.push(weighted / data.len() as f64);
    }
    Ok((ModelVector::new(params)?, epoch_losses))
}

/// One client's local training: the updated model and its mean epoch loss.
pub fn local_update(
    trainer: &dyn Trainer,
    model: &ModelVector,
    data: &Dataset,
    cfg: &TrainerConfig,
    rng: &mut Rng,
) -> Result<(ModelVector, f64)> {
    let (model, losses) = train_epochs(trainer, model, data, cfg, rng)?;
    let mean = losses.iter().sum::<f64>() / losses.len() as f64;
    Ok((model, mean))
}

/// Fraction of `test` classified correctly.
pub fn accuracy(trainer: &dyn Trainer, model: &ModelVector, test: &Dataset) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    Ok(correct_count(trainer, model, test) as f64 / test.len() as f64)
}

/// Number of `test` examples classified correctly.
pub fn correct_count(trainer: &dyn Trainer, model: &ModelVector, test: &Dataset) -> usize {
    (0..test.len())
        .filter(|&i| trainer.predict(model.as_slice(), test.features(i)) == test.label(i))
        .count()
}
