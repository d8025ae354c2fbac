use std::path::Path;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Labelled examples with features stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<usize>,
    num_features: usize,
    num_classes: usize,
}

impl Dataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Dataset(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let num_features = features.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(features.len() * num_features);
        for (row, values) in features.iter().enumerate() {
            if values.len() != num_features {
                return Err(Error::Dataset(format!(
                    "row {row} has {} features, expected {num_features}",
                    values.len()
                )));
            }
            if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                return Err(Error::Dataset(format!("row {row} has non-finite feature {v}")));
            }
            flat.extend_from_slice(values);
        }
        Self::from_flat(flat, labels, num_features, num_classes)
    }

    fn from_flat(features: Vec<f64>, labels: Vec<usize>, num_features: usize, num_classes: usize) -> Result<Self> {
        if let Some(&y) = labels.iter().find(|&&y| y >= num_classes) {
            return Err(Error::Dataset(format!("label {y} outside 0..{num_classes}")));
        }
        Ok(Self {
            features,
            labels,
            num_features,
            num_classes,
        })
    }

    /// An empty dataset with the given shape.
    pub fn empty(num_features: usize, num_classes: usize) -> Self {
        Self {
            features: Vec::new(),
            labels: Vec::new(),
            num_features,
            num_classes,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.features[i * self.num_features..(i + 1) * self.num_features]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn push(&mut self, features: &[f64], label: usize) {
        debug_assert_eq!(features.len(), self.num_features);
        debug_assert!(label < self.num_classes);
        self.features.extend_from_slice(features);
        self.labels.push(label);
    }

    /// Examples at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut out = Dataset::empty(self.num_features, self.num_classes);
        for &i in indices {
            out.push(self.features(i), self.labels[i]);
        }
        out
    }

    /// Per-class example counts.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    /// Reads `f0,..,f{k-1},label` rows. The class count is `max label + 1`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.clone();
        let k = headers
            .len()
            .checked_sub(1)
            .filter(|&k| k > 0)
            .ok_or_else(|| Error::Dataset("header needs at least one feature column and a label column".into()))?;
        for (j, name) in headers.iter().enumerate() {
            let expected = if j == k { "label".to_string() } else { format!("f{j}") };
            if name.trim() != expected {
                return Err(Error::Dataset(format!("column {j} is '{name}', expected '{expected}'")));
            }
        }
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            let line = row + 2;
            for field in record.iter().take(k) {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::Dataset(format!("line {line}: bad feature '{field}'")))?;
                if !v.is_finite() {
                    return Err(Error::Dataset(format!("line {line}: non-finite feature")));
                }
                features.push(v);
            }
            let label = record
                .get(k)
                .and_then(|s| s.trim().parse::<usize>().ok())
                .ok_or_else(|| Error::Dataset(format!("line {line}: bad label")))?;
            labels.push(label);
        }
        if labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let num_classes = labels.iter().max().map_or(0, |&y| y + 1);
        Self::from_flat(features, labels, k, num_classes)
    }

    /// Shuffles and splits into `(train, test)` with `round(len * test_fraction)`
    /// test examples.
    pub fn split(&self, test_fraction: f64, rng: &mut Rng) -> Result<(Dataset, Dataset)> {
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "test_fraction must be in (0, 1), got {test_fraction}"
            )));
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), rng);
        let test_len = (self.len() as f64 * test_fraction).round() as usize;
        let (test, train) = order.split_at(test_len);
        Ok((self.subset(train), self.subset(test)))
    }
}

/// Gaussian blobs with unit covariance.
///
/// When `classes <= features` the class means sit on scaled basis vectors so
/// every pair is exactly `separation` apart; otherwise they are random
/// directions of norm `separation / sqrt(2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlobGenerator {
    means: Vec<Vec<f64>>,
}

impl BlobGenerator {
    pub fn new(classes: usize, features: usize, separation: f64, rng: &mut Rng) -> Result<Self> {
        if classes < 2 || features < 2 {
            return Err(Error::InvalidParameter(format!(
                "need classes >= 2 and features >= 2, got {classes} and {features}"
            )));
        }
        if !(separation >= 0.0) || !separation.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "separation must be >= 0, got {separation}"
            )));
        }
        let radius = separation / std::f64::consts::SQRT_2;
        let means = (0..classes)
            .map(|c| {
                if classes <= features {
                    let mut mean = vec![0.0; features];
                    mean[c] = radius;
                    mean
                } else {
                    let dir: Vec<f64> = (0..features).map(|_| StandardNormal.sample(rng)).collect();
                    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                    dir.into_iter().map(|v| v * radius / norm).collect()
                }
            })
            .collect();
        Ok(Self { means })
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    /// `per_class` examples of every class, grouped by class.
    pub fn sample(&self, per_class: usize, rng: &mut Rng) -> Dataset {
        let features = self.means[0].len();
        let mut data = Dataset::empty(features, self.means.len());
        let mut row = vec![0.0; features];
        for (label, mean) in self.means.iter().enumerate() {
            for _ in 0..per_class {
                for (x, mu) in row.iter_mut().zip(mean) {
                    let z: f64 = StandardNormal.sample(rng);
                    *x = mu + z;
                }
                data.push(&row, label);
            }
        }
        data
    }
}

/// Blob training set of `per_class` examples per class.
pub fn generate_synthetic(
    classes: usize,
    features: usize,
    per_class: usize,
    separation: f64,
    rng: &mut Rng,
) -> Result<Dataset> {
    let generator = BlobGenerator::new(classes, features, separation, rng)?;
    Ok(generator.sample(per_class, rng))
}

/// Where training and test data come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum DataSpec {
    Synthetic {
        classes: usize,
        features: usize,
        per_class: usize,
        separation: f64,
        #[serde(default = "default_test_per_class")]
        test_per_class: usize,
    },
    Csv {
        path: std::path::PathBuf,
        #[serde(default = "default_test_fraction")]
        test_fraction: f64,
    },
}

fn default_test_per_class() -> usize {
    250
}

fn default_test_fraction() -> f64 {
    0.2
}

impl DataSpec {
    /// `(train, test)`. Synthetic test data comes from the same blobs on its own stream.
    pub fn load(&self, rng: &Rng) -> Result<(Dataset, Dataset)> {
        use crate::rng::stream;
        match self {
            DataSpec::Synthetic {
                classes,
                features,
                per_class,
                separation,
                test_per_class,
            } => {
                let mut data_rng = rng.derive(&[stream::DATA]);
                let generator = BlobGenerator::new(*classes, *features, *separation, &mut data_rng)?;
                let train = generator.sample(*per_class, &mut data_rng);
                let test = generator.sample(*test_per_class, &mut rng.derive(&[stream::TEST_DATA]));
                Ok((train, test))
            }
            DataSpec::Csv { path, test_fraction } => {
                let all = Dataset::from_csv(path)?;
                all.split(*test_fraction, &mut rng.derive(&[stream::SPLIT]))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(vec![vec![1.0, 2.0]], vec![0, 1], 2).is_err());
        assert!(Dataset::new(vec![vec![1.0], vec![1.0, 2.0]], vec![0, 1], 2).is_err());
        assert!(Dataset::new(vec![vec![1.0]], vec![3], 2).is_err());
        assert!(Dataset::new(vec![vec![f64::NAN]], vec![0], 2).is_err());
        let d = Dataset::new(vec![vec![1.0, 2.0], vec![3.0, 4.0]], vec![0, 1], 2).unwrap();
        assert_eq!(d.features(1), &[3.0, 4.0]);
        assert_eq!(d.class_counts(), vec![1, 1]);
    }

    #[test]
    fn blob_means_are_separation_apart() {
        let g = BlobGenerator::new(4, 20, 3.0, &mut Rng::new(0)).unwrap();
        let m = g.means();
        for a in 0..4 {
            for b in (a + 1)..4 {
                let d: f64 = m[a].iter().zip(&m[b]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                assert!((d - 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn synthetic_is_deterministic() {
        let a = generate_synthetic(3, 5, 10, 2.0, &mut Rng::new(9)).unwrap();
        let b = generate_synthetic(3, 5, 10, 2.0, &mut Rng::new(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 30);
        assert_eq!(a.class_counts(), vec![10, 10, 10]);
        assert!(generate_synthetic(1, 5, 10, 2.0, &mut Rng::new(9)).is_err());
    }

    #[test]
    fn more_classes_than_features() {
        let g = BlobGenerator::new(5, 2, 4.0, &mut Rng::new(1)).unwrap();
        for mean in g.means() {
            let norm = mean.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 4.0 / std::f64::consts::SQRT_2).abs() < 1e-9);
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "f0,f1,label\n1.5,2,0\n-3,4.25,2").unwrap();
        let d = Dataset::from_csv(file.path()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.num_classes(), 3);
        assert_eq!(d.features(1), &[-3.0, 4.25]);
    }

    #[test]
    fn csv_rejects_bad_header() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "a,b,label\n1,2,0").unwrap();
        assert!(matches!(Dataset::from_csv(file.path()), Err(Error::Dataset(_))));
    }

    #[test]
    fn split_sizes() {
        let d = generate_synthetic(2, 3, 50, 1.0, &mut Rng::new(2)).unwrap();
        let (train, test) = d.split(0.2, &mut Rng::new(3)).unwrap();
        assert_eq!((train.len(), test.len()), (80, 20));
        assert!(d.split(1.0, &mut Rng::new(3)).is_err());
    }
}
