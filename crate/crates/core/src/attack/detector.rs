use serde::Serialize;

use crate::error::{Error, Result};

/// Decides when selfish clients start crafting.
///
/// Tracks `best(t)`, the running minimum of the mean selfish training loss.
/// For `t > I` the window drop `gap(t) = best(t - I) - best(t)` feeds a
/// running `max_gap`; the attack starts at the first round with
/// `0 < gap(t) < epsilon * max_gap`. Once started it stays started.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttackStartDetector {
    epsilon: f64,
    interval: usize,
    /// `best_loss_history[t - 1]` is `best(t)`; rounds start at 1.
    best_loss_history: Vec<f64>,
    max_gap: f64,
    started: bool,
    started_at: Option<u64>,
}

impl AttackStartDetector {
    pub fn new(epsilon: f64, interval: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be in (0, 1], got {epsilon}"
            )));
        }
        if interval == 0 {
            return Err(Error::InvalidParameter("interval must be >= 1".into()));
        }
        Ok(Self {
            epsilon,
            interval,
            best_loss_history: Vec::new(),
            max_gap: 0.0,
            started: false,
            started_at: None,
        })
    }

    pub fn started(&self) -> bool {
        self.started
    }

    pub fn started_at(&self) -> Option<u64> {
        self.started_at
    }

    pub fn max_gap(&self) -> f64 {
        self.max_gap
    }

    pub fn best_loss_history(&self) -> &[f64] {
        &self.best_loss_history
    }

    pub fn last_round(&self) -> u64 {
        self.best_loss_history.len() as u64
    }

    /// Feeds the mean selfish loss of round `round` (1-based, consecutive).
    pub fn update(mut self, mean_selfish_loss: f64, round: u64) -> Result<Self> {
        let previous = self.last_round();
        if round != previous + 1 {
            return Err(Error::NonMonotonicRound { previous, got: round });
        }
        let best = self
            .best_loss_history
            .last()
            .map_or(mean_selfish_loss, |&prev| prev.min(mean_selfish_loss));
        self.best_loss_history.push(best);

        let t = round as usize;
        if t > self.interval && !self.started {
            let gap = self.best_loss_history[t - self.interval - 1] - best;
            self.max_gap = self.max_gap.max(gap);
            if 0.0 < gap && gap < self.epsilon * self.max_gap {
                self.started = true;
                self.started_at = Some(round);
            }
        }
        Ok(self)
    }
}
