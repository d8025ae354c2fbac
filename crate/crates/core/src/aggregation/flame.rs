//! FLAME-style aggregation: admit the majority cluster under cosine
//! distance, clip admitted norms to their median, average.
//!
//! Clustering is single-linkage over pairwise cosine distances, cut at the
//! smallest threshold at which some cluster holds at least
//! `floor(count / 2) + 1` models. Only one cluster can exceed half the
//! models, so the admitted set is unique. No noise is added.

use crate::error::{Error, Result};
use crate::model::{check_dims, ModelVector};

use super::coordinate::median_of_sorted;

struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn new(len: usize) -> Self {
        Self {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return self.size[ra];
        }
        if self.size[ra] < self.size[rb] || (self.size[ra] == self.size[rb] && rb < ra) {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.size[ra]
    }
}

/// Indices (ascending) of the admitted majority cluster, or `None` when no
/// cluster reaches the size floor.
pub fn flame_admitted(models: &[ModelVector]) -> Option<Vec<usize>> {
    let count = models.len();
    let floor = count / 2 + 1;
    if count == 0 {
        return None;
    }
    if floor <= 1 {
        return Some((0..count).collect());
    }

    let mut edges = Vec::with_capacity(count * (count - 1) / 2);
    for i in 0..count {
        for j in i + 1..count {
            let d = models[i].cosine_distance(&models[j]);
            if d.is_finite() {
                edges.push((d, i, j));
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut sets = DisjointSet::new(count);
    let mut start = 0;
    while start < edges.len() {
        // merge every edge at this threshold before checking cluster sizes
        let threshold = edges[start].0;
        let mut end = start;
        while end < edges.len() && edges[end].0 == threshold {
            let (_, i, j) = edges[end];
            sets.union(i, j);
            end += 1;
        }
        let winner = (0..count).find(|&i| {
            let root = sets.find(i);
            sets.size[root] >= floor
        });
        if let Some(member) = winner {
            let root = sets.find(member);
            return Some((0..count).filter(|&i| sets.find(i) == root).collect());
        }
        start = end;
    }
    None
}

pub fn agg_flame(models: &[ModelVector], clip: bool) -> Result<ModelVector> {
    if models.len() < 3 {
        return Err(Error::TooFewModels {
            required: 3,
            got: models.len(),
        });
    }
    let dim = check_dims(models)?;
    let admitted = flame_admitted(models).unwrap_or_else(|| {
        log::warn!(
            "flame: no admissible cluster among {} models, admitting all",
            models.len()
        );
        (0..models.len()).collect()
    });

    let mut norms: Vec<f64> = admitted.iter().map(|&i| models[i].norm()).collect();
    norms.sort_by(f64::total_cmp);
    let clip_norm = median_of_sorted(&norms);

    let mut acc = vec![0.0; dim];
    for &i in &admitted {
        let model = &models[i];
        let norm = model.norm();
        let scale = if clip && norm > clip_norm {
            clip_norm / norm
        } else {
            1.0
        };
        for (a, v) in acc.iter_mut().zip(model.as_slice()) {
            *a += scale * v;
        }
    }
    let count = admitted.len() as f64;
    ModelVector::new(acc.into_iter().map(|a| a / count).collect())
}
