use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{run_experiment, AttackSpec, ExperimentConfig};
use crate::error::{Error, Result};
use crate::roles::RoleConfig;

use super::records::{write_records, ExperimentRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Lambda,
    Rho,
    /// `m / (n + m)` with the total client count held fixed.
    SelfishFraction,
    Epsilon,
    #[serde(rename = "interval")]
    IntervalI,
    /// `n + m` with the selfish fraction held (approximately) fixed.
    NumClients,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 6] = [
        SweepParameter::Lambda,
        SweepParameter::Rho,
        SweepParameter::SelfishFraction,
        SweepParameter::Epsilon,
        SweepParameter::IntervalI,
        SweepParameter::NumClients,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Lambda => "lambda",
            SweepParameter::Rho => "rho",
            SweepParameter::SelfishFraction => "selfish_fraction",
            SweepParameter::Epsilon => "epsilon",
            SweepParameter::IntervalI => "interval",
            SweepParameter::NumClients => "num_clients",
        }
    }

    /// `base` with this parameter set to `value`.
    pub fn apply(self, base: &ExperimentConfig, value: f64) -> Result<ExperimentConfig> {
        let mut cfg = base.clone();
        let as_count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::InvalidParameter(format!(
                    "{} needs a whole number, got {v}",
                    self.name()
                )))
            }
        };
        match self {
            SweepParameter::Rho => cfg.partition.rho = value,
            SweepParameter::SelfishFraction => {
                let total = cfg.roles.total();
                let m = (value * total as f64).round() as usize;
                cfg.roles = RoleConfig::new(total.saturating_sub(m), m)?;
            }
            SweepParameter::NumClients => {
                let total = as_count(value)?;
                let fraction = cfg.roles.m as f64 / cfg.roles.total() as f64;
                let m = ((fraction * total as f64).round() as usize).max(1);
                cfg.roles = RoleConfig::new(total.saturating_sub(m), m)?;
            }
            SweepParameter::Lambda | SweepParameter::Epsilon | SweepParameter::IntervalI => {
                let AttackSpec::Selfish {
                    lambda,
                    epsilon,
                    interval,
                    ..
                } = &mut cfg.attack
                else {
                    return Err(Error::InvalidParameter(format!(
                        "sweeping {} needs a selfish attack",
                        self.name()
                    )));
                };
                match self {
                    SweepParameter::Lambda => *lambda = Some(value),
                    SweepParameter::Epsilon => *epsilon = Some(value),
                    _ => *interval = Some(as_count(value)?),
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|p| p.name()).collect();
            Error::InvalidParameter(format!("unknown sweep parameter '{s}'; valid: {}", names.join(", ")))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub repeats: usize,
}

impl SweepSpec {
    pub fn new(parameter: SweepParameter, values: Vec<f64>, repeats: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("sweep needs at least one value".into()));
        }
        if repeats == 0 {
            return Err(Error::InvalidParameter("repeats must be >= 1".into()));
        }
        Ok(Self {
            parameter,
            values,
            repeats,
        })
    }
}

/// One experiment of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub value: f64,
    pub repeat: usize,
    pub seed: u64,
    pub records: Vec<ExperimentRecord>,
}

impl SweepCell {
    pub fn final_record(&self) -> Option<&ExperimentRecord> {
        self.records.last()
    }

    pub fn file_name(&self, parameter: SweepParameter) -> String {
        format!("{}_{}_r{}.csv", parameter.name(), self.value, self.repeat)
    }
}

/// Final-round metrics per value, averaged over repeats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub mean_gap: Vec<f64>,
    pub mean_mtas: Vec<f64>,
    pub mean_mtans: Vec<f64>,
    pub repeats: usize,
    pub base_config: ExperimentConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub summary: SweepSummary,
    pub cells: Vec<SweepCell>,
}

fn run_cell(base: &ExperimentConfig, spec: &SweepSpec, index: usize) -> Result<SweepCell> {
    let value = spec.values[index / spec.repeats];
    let repeat = index % spec.repeats;
    let mut cfg = spec.parameter.apply(base, value)?;
    cfg.seed = base.seed.wrapping_add(repeat as u64);
    Ok(SweepCell {
        value,
        repeat,
        seed: cfg.seed,
        records: run_experiment(&cfg)?,
    })
}

/// Runs every value x repeat; repeat `r` uses seed `base.seed + r`.
/// Up to `jobs` cells run at once; results do not depend on `jobs`.
pub fn run_sweep(base: &ExperimentConfig, spec: &SweepSpec, jobs: usize) -> Result<SweepResult> {
    for &value in &spec.values {
        spec.parameter.apply(base, value)?;
    }
    let count = spec.values.len() * spec.repeats;
    let cells: Vec<Result<SweepCell>> = run_cells(count, jobs.max(1), |i| run_cell(base, spec, i))?;
    let cells = cells.into_iter().collect::<Result<Vec<_>>>()?;

    let mut summary = SweepSummary {
        parameter: spec.parameter,
        values: spec.values.clone(),
        mean_gap: Vec::new(),
        mean_mtas: Vec::new(),
        mean_mtans: Vec::new(),
        repeats: spec.repeats,
        base_config: base.clone(),
    };
    for group in cells.chunks(spec.repeats) {
        let finals: Vec<&ExperimentRecord> = group.iter().filter_map(SweepCell::final_record).collect();
        let mean = |f: fn(&ExperimentRecord) -> f64| {
            if finals.is_empty() {
                f64::NAN
            } else {
                finals.iter().map(|r| f(r)).sum::<f64>() / finals.len() as f64
            }
        };
        summary.mean_gap.push(mean(|r| r.gap));
        summary.mean_mtas.push(mean(|r| r.mtas));
        summary.mean_mtans.push(mean(|r| r.mtans));
    }
    Ok(SweepResult { summary, cells })
}

#[cfg(feature = "parallel")]
fn run_cells<T: Send>(count: usize, jobs: usize, f: impl Fn(usize) -> T + Sync + Send) -> Result<Vec<T>> {
    use rayon::prelude::*;
    if jobs == 1 {
        return Ok((0..count).map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..count).into_par_iter().map(f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn run_cells<T: Send>(count: usize, _jobs: usize, f: impl Fn(usize) -> T + Sync + Send) -> Result<Vec<T>> {
    Ok((0..count).map(f).collect())
}

/// Writes one records CSV per cell plus `sweep_summary.json` into `dir`.
pub fn write_sweep(result: &SweepResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    for cell in &result.cells {
        write_records(&cell.records, &dir.join(cell.file_name(result.summary.parameter)))?;
    }
    let json = serde_json::to_string_pretty(&result.summary).map_err(|e| Error::Io(e.to_string()))?;
    let path = dir.join("sweep_summary.json");
    std::fs::write(&path, json + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{
            "roles": {"n": 7, "m": 2},
            "rule": {"kind": "median"},
            "attack": {"kind": "selfish", "interval": 1},
            "trainer": {"learning_rate": 0.1, "local_epochs": 1, "batch_size": 16},
            "partition": {"rho": 0.7},
            "data": {"source": "synthetic", "classes": 3, "features": 4, "per_class": 40, "separation": 2.0},
            "rounds": 3,
            "seed": 5
        }"#,
        )
        .unwrap()
    }

    #[test]
    fn parameter_names_parse() {
        for p in SweepParameter::ALL {
            assert_eq!(p.name().parse::<SweepParameter>().unwrap(), p);
        }
        let err = "gamma".parse::<SweepParameter>().unwrap_err().to_string();
        assert!(err.contains("lambda") && err.contains("num_clients"));
    }

    #[test]
    fn single_cell_equals_direct_run() {
        let spec = SweepSpec::new(SweepParameter::Lambda, vec![0.5], 1).unwrap();
        let result = run_sweep(&base(), &spec, 1).unwrap();
        let direct = run_experiment(&SweepParameter::Lambda.apply(&base(), 0.5).unwrap()).unwrap();
        assert_eq!(result.cells[0].records, direct);
        assert_eq!(result.summary.mean_gap, vec![direct.last().unwrap().gap]);
    }

    #[test]
    fn jobs_do_not_change_results() {
        let spec = SweepSpec::new(SweepParameter::Lambda, vec![0.0, 0.5], 2).unwrap();
        let a = run_sweep(&base(), &spec, 1).unwrap();
        let b = run_sweep(&base(), &spec, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cells[1].seed, 6);
        let dir = tempfile::tempdir().unwrap();
        write_sweep(&a, dir.path()).unwrap();
        assert!(dir.path().join("lambda_0.5_r1.csv").exists());
        assert!(dir.path().join("sweep_summary.json").exists());
    }

    #[test]
    fn role_parameters() {
        let cfg = SweepParameter::NumClients.apply(&base(), 18.0).unwrap();
        assert_eq!(cfg.roles, RoleConfig { n: 14, m: 4 });
        let cfg = SweepParameter::SelfishFraction.apply(&base(), 0.2).unwrap();
        assert_eq!(cfg.roles, RoleConfig { n: 7, m: 2 });
        assert!(SweepParameter::SelfishFraction.apply(&base(), 0.5).is_err());
        assert!(SweepParameter::IntervalI.apply(&base(), 2.5).is_err());
    }

    #[test]
    fn empty_spec_rejected() {
        assert!(SweepSpec::new(SweepParameter::Rho, vec![], 1).is_err());
        assert!(SweepSpec::new(SweepParameter::Rho, vec![0.5], 0).is_err());
    }
}
