//! Randomized oracle suite for the crafting formulas.
//!
//! Each trial draws one coordinate instance (benign values `q`, the
//! receiver's own value `w` among them, `m`, `lambda`), solves for the
//! target, crafts `m` values, and checks with an independent sort-based
//! aggregator that the rule output over `q` plus the crafted values equals
//! the target. The crafting functions are injectable so that a deliberately
//! broken implementation can be shown to fail.

use rand::Rng as _;
use serde::Serialize;

use crate::attack::{
    craft_fedavg, craft_median, craft_trimmed_mean, fedavg_bounds, median_bounds, median_branch,
    solve_optimal_coordinate, trim_bounds, trim_case, CoordinateBounds, MedianBranch, TrimCase,
};
use crate::error::Result;
use crate::exec::Execution;
use crate::rng::Rng;

pub type FedAvgCrafter = fn(&[f64], f64, usize) -> Result<Vec<f64>>;
pub type RobustCrafter = fn(&[f64], f64, usize, f64) -> Result<Vec<f64>>;

/// Crafting functions under test.
#[derive(Clone, Copy)]
pub struct Crafters {
    pub fedavg: FedAvgCrafter,
    pub median: RobustCrafter,
    pub trimmed: RobustCrafter,
}

impl Default for Crafters {
    fn default() -> Self {
        Self {
            fedavg: craft_fedavg,
            median: craft_median,
            trimmed: craft_trimmed_mean,
        }
    }
}

pub const LAMBDAS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    FedAvg,
    Median,
    TrimmedMean,
    Bounds,
}

impl Suite {
    pub fn label(self) -> &'static str {
        match self {
            Suite::FedAvg => "fedavg optimality",
            Suite::Median => "median optimality",
            Suite::TrimmedMean => "trimmed-mean optimality",
            Suite::Bounds => "median/trimmed-mean bounds",
        }
    }
}

/// A benign coordinate: `q` sorted descending, `w = q[own]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Instance {
    pub q: Vec<f64>,
    pub own: usize,
    pub m: usize,
    pub lambda: f64,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn w(&self) -> f64 {
        self.q[self.own]
    }
}

/// `n` in `[5, 20]`, `1 <= m` with `n + m >= 3m + 1`. A fifth of instances
/// use small integers so ties occur.
pub fn random_instance(rng: &mut Rng) -> Instance {
    let n = rng.random_range(5..=20usize);
    let m = rng.random_range(1..=(n - 1) / 2);
    let mut q: Vec<f64> = if rng.random_bool(0.2) {
        (0..n).map(|_| rng.random_range(-5i32..=5) as f64).collect()
    } else {
        let scale = 10f64.powf(rng.random_range(-2.0..2.0));
        (0..n).map(|_| rng.random_range(-scale..scale)).collect()
    };
    q.sort_by(|a, b| b.total_cmp(a));
    Instance {
        own: rng.random_range(0..n),
        m,
        lambda: LAMBDAS[rng.random_range(0..LAMBDAS.len())],
        q,
    }
}

// Independent sort-based aggregators over all values.

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn oracle_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn oracle_median(values: &[f64]) -> f64 {
    let v = sorted(values);
    let len = v.len();
    if len % 2 == 1 {
        v[len / 2]
    } else {
        (v[len / 2 - 1] + v[len / 2]) / 2.0
    }
}

pub fn oracle_trimmed(values: &[f64], c: usize) -> f64 {
    let v = sorted(values);
    oracle_mean(&v[c..v.len() - c])
}

fn tolerance(q: &[f64], target: f64) -> f64 {
    1e-9 * q
        .iter()
        .fold(target.abs(), |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE)
}

/// The failing trial, serialized for the report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub instance: Instance,
    pub w_tilde: f64,
    pub bounds: (f64, f64),
    pub target: f64,
    pub crafted: Vec<f64>,
    pub aggregate: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub trials: usize,
    /// Named coverage counters, e.g. branch hits.
    pub counters: Vec<(String, usize)>,
    pub failures: usize,
    pub first_failure: Option<Counterexample>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn counter(&self, name: &str) -> usize {
        self.counters.iter().find(|(k, _)| k == name).map_or(0, |(_, v)| *v)
    }
}

struct Trial {
    tags: Vec<&'static str>,
    failure: Option<Counterexample>,
}

fn optimality_trial(suite: Suite, trial: usize, rng: &mut Rng, crafters: &Crafters) -> Trial {
    let inst = random_instance(rng);
    let (q, m, w) = (&inst.q, inst.m, inst.w());
    let b = 1.0;
    let (bounds, w_tilde) = match suite {
        Suite::FedAvg => (fedavg_bounds(q), oracle_mean(q)),
        Suite::Median => (median_bounds(q, m), oracle_median(q)),
        _ => (trim_bounds(q, m), oracle_trimmed(q, m)),
    };
    let mut report = Counterexample {
        trial,
        instance: inst.clone(),
        w_tilde,
        bounds: (f64::NAN, f64::NAN),
        target: f64::NAN,
        crafted: Vec::new(),
        aggregate: f64::NAN,
        error: None,
    };
    let fail = |mut report: Counterexample, e: crate::Error| {
        report.error = Some(e.to_string());
        Trial {
            tags: Vec::new(),
            failure: Some(report),
        }
    };
    let bounds: CoordinateBounds = match bounds {
        Ok(b) => b,
        Err(e) => return fail(report, e),
    };
    report.bounds = (bounds.lower, bounds.upper);
    let target = match solve_optimal_coordinate(w, w_tilde, bounds, inst.lambda) {
        Ok(t) => t,
        Err(e) => return fail(report, e),
    };
    report.target = target;

    let mut tags = Vec::new();
    let crafted = match suite {
        Suite::FedAvg => (crafters.fedavg)(q, target, m),
        Suite::Median => {
            tags.push(if (inst.n() + m).is_multiple_of(2) {
                "even"
            } else {
                "odd"
            });
            if median_branch(q, target, m) != MedianBranch::Plain {
                tags.push("exception_branch");
            }
            (crafters.median)(q, target, m, b)
        }
        _ => {
            match trim_case(q, target, m) {
                Ok(TrimCase::Lower) => tags.push("case_i"),
                Ok(TrimCase::Upper) => tags.push("case_ii"),
                Err(e) => return fail(report, e),
            }
            (crafters.trimmed)(q, target, m, b)
        }
    };
    let crafted = match crafted {
        Ok(c) => c,
        Err(e) => return fail(report, e),
    };
    let all: Vec<f64> = q.iter().chain(&crafted).copied().collect();
    let aggregate = match suite {
        Suite::FedAvg => oracle_mean(&all),
        Suite::Median => oracle_median(&all),
        _ => oracle_trimmed(&all, m),
    };
    report.crafted = crafted;
    report.aggregate = aggregate;
    let ok = report.crafted.len() == m && (aggregate - target).abs() <= tolerance(q, target);
    Trial {
        tags,
        failure: (!ok).then_some(report),
    }
}

/// Random crafted values never move Median or Trimmed-mean outside the
/// bounds, and pushing every crafted value to one extreme hits that bound.
fn bounds_trial(trial: usize, draws: usize, rng: &mut Rng) -> Trial {
    let inst = random_instance(rng);
    let (q, m) = (&inst.q, inst.m);
    let spread = q[0] - q[q.len() - 1] + 1.0;
    let mut failure = None;
    type Aggregate = fn(&[f64], usize) -> f64;
    let rules: [(&str, Aggregate, Result<CoordinateBounds>); 2] = [
        ("median", |v, _| oracle_median(v), median_bounds(q, m)),
        ("trimmed", oracle_trimmed, trim_bounds(q, m)),
    ];
    let mut record = |label: &str, target: f64, bounds: CoordinateBounds, crafted: Vec<f64>, aggregate: f64| {
        if failure.is_none() {
            failure = Some(Counterexample {
                trial,
                instance: inst.clone(),
                w_tilde: f64::NAN,
                bounds: (bounds.lower, bounds.upper),
                target,
                crafted,
                aggregate,
                error: Some(format!("{label} aggregate escaped the bounds")),
            });
        }
    };
    for (label, agg, bounds) in rules {
        let bounds = match bounds {
            Ok(b) => b,
            Err(_) => {
                record(
                    label,
                    f64::NAN,
                    CoordinateBounds {
                        lower: f64::NAN,
                        upper: f64::NAN,
                    },
                    vec![],
                    f64::NAN,
                );
                continue;
            }
        };
        let tol = tolerance(q, 0.0);
        for (extreme, expected) in [
            (q[0] + 10.0 * spread, bounds.upper),
            (q[q.len() - 1] - 10.0 * spread, bounds.lower),
        ] {
            let crafted = vec![extreme; m];
            let all: Vec<f64> = q.iter().chain(&crafted).copied().collect();
            let value = agg(&all, m);
            if (value - expected).abs() > tol {
                record(label, expected, bounds, crafted, value);
            }
        }
        for _ in 0..draws {
            let crafted: Vec<f64> = (0..m)
                .map(|_| {
                    let reach = 10f64.powf(rng.random_range(-1.0..3.0)) * spread;
                    q[rng.random_range(0..q.len())] + rng.random_range(-reach..reach)
                })
                .collect();
            let all: Vec<f64> = q.iter().chain(&crafted).copied().collect();
            let value = agg(&all, m);
            if value < bounds.lower - tol || value > bounds.upper + tol {
                record(label, f64::NAN, bounds, crafted, value);
            }
        }
    }
    Trial {
        tags: Vec::new(),
        failure,
    }
}

fn suite_label(suite: Suite) -> u64 {
    match suite {
        Suite::FedAvg => 1,
        Suite::Median => 2,
        Suite::TrimmedMean => 3,
        Suite::Bounds => 4,
    }
}

/// Runs `trials` trials of one suite. For [`Suite::Bounds`] each trial is
/// one instance with `draws` random crafted vectors.
pub fn run_suite(
    suite: Suite,
    trials: usize,
    draws: usize,
    seed: u64,
    crafters: &Crafters,
    execution: Execution,
) -> SuiteReport {
    let root = Rng::new(seed).derive(&[suite_label(suite)]);
    let results = execution.map(trials, |t| {
        let mut rng = root.derive(&[t as u64]);
        match suite {
            Suite::Bounds => bounds_trial(t, draws, &mut rng),
            _ => optimality_trial(suite, t, &mut rng, crafters),
        }
    });
    let mut counters: Vec<(String, usize)> = Vec::new();
    let mut failures = 0;
    let mut first_failure = None;
    for trial in results {
        for tag in trial.tags {
            match counters.iter_mut().find(|(k, _)| k == tag) {
                Some((_, v)) => *v += 1,
                None => counters.push((tag.to_string(), 1)),
            }
        }
        if let Some(f) = trial.failure {
            failures += 1;
            first_failure.get_or_insert(f);
        }
    }
    counters.sort();
    SuiteReport {
        suite,
        trials,
        counters,
        failures,
        first_failure,
    }
}

/// All four suites. Bounds runs `max(trials / 50, 1)` instances.
pub fn verify_all(trials: usize, seed: u64, crafters: &Crafters, execution: Execution) -> Vec<SuiteReport> {
    let mut reports: Vec<SuiteReport> = [Suite::FedAvg, Suite::Median, Suite::TrimmedMean]
        .into_iter()
        .map(|s| run_suite(s, trials, 0, seed, crafters, execution))
        .collect();
    reports.push(run_suite(
        Suite::Bounds,
        (trials / 50).max(1),
        10_000,
        seed,
        crafters,
        execution,
    ));
    reports
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_crafters_pass() {
        for report in verify_all(400, 1, &Crafters::default(), Execution::default()) {
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn oracles_agree_with_definitions() {
        assert_eq!(oracle_median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(oracle_median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(oracle_trimmed(&[10.0, 1.0, 2.0, 3.0, -10.0], 1), 2.0);
    }

    // shifts the upper window index by one
    fn off_by_one_median(q: &[f64], w_star: f64, m: usize, b: f64) -> Result<Vec<f64>> {
        let n = q.len();
        let u = ((n - m) / 2 + 1).min(n - 1);
        let v = (n + m - 1) / 2;
        let mut out = Vec::with_capacity(m);
        if w_star > q[u] {
            out.push(2.0 * w_star - q[u]);
            out.extend(std::iter::repeat_n(q[0] + b, m - 1));
        } else if v < n && w_star < q[v] {
            out.push(2.0 * w_star - q[v]);
            out.extend(std::iter::repeat_n(q[n - 1] - b, m - 1));
        } else {
            out.extend(std::iter::repeat_n(w_star, m));
        }
        Ok(out)
    }

    #[test]
    fn off_by_one_mutant_is_caught() {
        let crafters = Crafters {
            median: off_by_one_median,
            ..Crafters::default()
        };
        let report = run_suite(Suite::Median, 2000, 0, 3, &crafters, Execution::default());
        assert!(!report.passed());
        let bad = report.first_failure.unwrap();
        assert!((bad.aggregate - bad.target).abs() > 1e-9 || bad.error.is_some());
    }

    #[test]
    fn instances_respect_threat_model() {
        let mut rng = Rng::new(0);
        for _ in 0..1000 {
            let inst = random_instance(&mut rng);
            assert!((5..=20).contains(&inst.n()));
            assert!(inst.n() + inst.m > 3 * inst.m);
            assert!(inst.q.windows(2).all(|p| p[0] >= p[1]));
        }
    }
}
