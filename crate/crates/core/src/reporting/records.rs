use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelVector;
use crate::roles::RoleConfig;
use crate::simulation::{correct_count, Dataset, Trainer};

/// Metrics of one global round.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub round: u64,
    pub mtas: f64,
    pub mtans: f64,
    /// Always `mtas - mtans`.
    pub gap: f64,
    pub mean_selfish_loss: f64,
    pub attack_started: bool,
}

pub const RECORDS_HEADER: &str = "round,mtas,mtans,gap,mean_selfish_loss,attack_started";

/// `(mtas, mtans, gap)`: mean test accuracy of the selfish and non-selfish
/// clients and their difference.
pub fn compute_metrics(
    trainer: &dyn Trainer,
    models: &[ModelVector],
    roles: &RoleConfig,
    test: &Dataset,
) -> Result<(f64, f64, f64)> {
    if test.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    if models.len() != roles.total() {
        return Err(Error::InvalidParameter(format!(
            "{} models for {} clients",
            models.len(),
            roles.total()
        )));
    }
    // integer counts keep identical models at exactly equal means
    let mean_over = |ids: &mut dyn Iterator<Item = crate::ClientId>, count: usize| -> f64 {
        let correct: usize = ids.map(|id| correct_count(trainer, &models[id.0], test)).sum();
        correct as f64 / (count * test.len()) as f64
    };
    let mtas = mean_over(&mut roles.selfish(), roles.m);
    let mtans = mean_over(&mut roles.non_selfish(), roles.n);
    Ok((mtas, mtans, mtas - mtans))
}

fn format_record(r: &ExperimentRecord) -> String {
    format!(
        "{},{:.6},{:.6},{:.6},{:.6},{}",
        r.round, r.mtas, r.mtans, r.gap, r.mean_selfish_loss, r.attack_started
    )
}

pub fn write_records_to(records: &[ExperimentRecord], mut out: impl Write) -> Result<()> {
    writeln!(out, "{RECORDS_HEADER}")?;
    for r in records {
        writeln!(out, "{}", format_record(r))?;
    }
    out.flush()?;
    Ok(())
}

/// Writes the per-round CSV, floats with 6 decimals.
pub fn write_records(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_records_to(records, std::io::BufWriter::new(file))
}

pub fn read_records_from(input: impl Read) -> Result<Vec<ExperimentRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != RECORDS_HEADER {
        return Err(Error::Dataset(format!(
            "unexpected records header '{}'",
            header.join(",")
        )));
    }
    reader.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_records_from(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::{generate_synthetic, LogisticRegression};
    use crate::Rng;
    use proptest::prelude::*;

    #[test]
    fn formatting_contract() {
        let r = ExperimentRecord {
            round: 0,
            mtas: 0.5,
            mtans: 0.4,
            gap: 0.1,
            mean_selfish_loss: 1.0,
            attack_started: false,
        };
        let mut buf = Vec::new();
        write_records_to(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            format!("{RECORDS_HEADER}\n0,0.500000,0.400000,0.100000,1.000000,false\n")
        );
    }

    #[test]
    fn empty_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_records(&[], &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{RECORDS_HEADER}\n"));
        assert!(read_records(&path).unwrap().is_empty());
    }

    #[test]
    fn identical_models_have_zero_gap() {
        let test = generate_synthetic(2, 3, 20, 2.0, &mut Rng::new(0)).unwrap();
        let trainer = LogisticRegression::new(3, 2);
        let roles = RoleConfig::new(4, 1).unwrap();
        let models = vec![ModelVector::new(vec![1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0]).unwrap(); 5];
        let (mtas, mtans, gap) = compute_metrics(&trainer, &models, &roles, &test).unwrap();
        assert_eq!(mtas, mtans);
        assert_eq!(gap, 0.0);
    }

    #[test]
    fn perfect_versus_constant_models() {
        // two classes separated along feature 0; the all-zero model predicts class 0 always
        let test = generate_synthetic(2, 2, 500, 20.0, &mut Rng::new(3)).unwrap();
        let trainer = LogisticRegression::new(2, 2);
        let roles = RoleConfig::new(4, 1).unwrap();
        let perfect = ModelVector::new(vec![1.0, -1.0, -1.0, 1.0, 0.0, 0.0]).unwrap();
        let mut models = vec![ModelVector::zeros(6); 4];
        models.push(perfect);
        let (mtas, mtans, gap) = compute_metrics(&trainer, &models, &roles, &test).unwrap();
        assert!(mtas > 0.99);
        assert_eq!(mtans, 0.5);
        assert!((gap - 0.5).abs() < 0.01);
        assert_eq!(
            compute_metrics(&trainer, &models, &roles, &Dataset::empty(2, 2)),
            Err(Error::EmptyTestSet)
        );
    }

    fn record() -> impl Strategy<Value = ExperimentRecord> {
        (
            0u64..10_000,
            0u32..=1_000_000,
            0u32..=1_000_000,
            0u64..100_000_000,
            any::<bool>(),
        )
            .prop_map(|(round, a, b, loss, started)| {
                let mtas = a as f64 / 1e6;
                let mtans = b as f64 / 1e6;
                ExperimentRecord {
                    round,
                    mtas,
                    mtans,
                    gap: mtas - mtans,
                    mean_selfish_loss: loss as f64 / 1e6,
                    attack_started: started,
                }
            })
    }

    proptest! {
        #[test]
        fn csv_round_trip_at_six_decimals(records in proptest::collection::vec(record(), 0..20)) {
            let mut buf = Vec::new();
            write_records_to(&records, &mut buf).unwrap();
            let back = read_records_from(buf.as_slice()).unwrap();
            prop_assert_eq!(back.len(), records.len());
            for (a, b) in records.iter().zip(&back) {
                prop_assert_eq!(a.round, b.round);
                prop_assert_eq!(a.attack_started, b.attack_started);
                for (x, y) in [(a.mtas, b.mtas), (a.mtans, b.mtans), (a.gap, b.gap), (a.mean_selfish_loss, b.mean_selfish_loss)] {
                    prop_assert!((x - y).abs() <= 5e-7);
                    prop_assert_eq!(format!("{x:.6}"), format!("{y:.6}"));
                }
            }
        }
    }
}
