//! JSON experiment configuration and its resolution into engine types.
//!
//! ```json
//! {
//!   "roles": {"n": 14, "m": 6},
//!   "rule": {"kind": "median"},
//!   "attack": {"kind": "selfish"},
//!   "trainer": {"learning_rate": 0.1, "local_epochs": 3, "batch_size": 32},
//!   "partition": {"rho": 0.7},
//!   "data": {"source": "synthetic", "classes": 4, "features": 20, "per_class": 400, "separation": 3.0},
//!   "rounds": 300,
//!   "seed": 1
//! }
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::aggregation::AggregationRule;
use crate::attack::AttackPlan;
use crate::baselines::BaselineKind;
use crate::error::Result;
use crate::exec::Execution;
use crate::reporting::ExperimentRecord;
use crate::rng::Rng;
use crate::roles::{validate_roles, RoleConfig};
use crate::simulation::{AttackMode, DataSpec, ExperimentSetup, InfoMode, PartitionConfig, Simulation, TrainerConfig};

/// Aggregation rule with role-dependent parameters left open:
/// a missing trim count or Krum `f` becomes `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleSpec {
    #[serde(rename = "fedavg")]
    FedAvg,
    Median,
    TrimmedMean {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<usize>,
    },
    Krum {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        f: Option<usize>,
    },
    #[serde(rename = "fltrust")]
    FlTrust,
    Flame {
        #[serde(default = "default_true")]
        clip: bool,
    },
}

fn default_true() -> bool {
    true
}

impl RuleSpec {
    pub fn resolve(&self, roles: &RoleConfig) -> AggregationRule {
        match *self {
            RuleSpec::FedAvg => AggregationRule::FedAvg,
            RuleSpec::Median => AggregationRule::Median,
            RuleSpec::TrimmedMean { c } => AggregationRule::TrimmedMean {
                c: c.unwrap_or(roles.m),
            },
            RuleSpec::Krum { f } => AggregationRule::Krum {
                f: f.unwrap_or(roles.m),
            },
            RuleSpec::FlTrust => AggregationRule::FlTrust,
            RuleSpec::Flame { clip } => AggregationRule::Flame { clip },
        }
    }
}

/// Attack section; a missing `lambda` takes the default for the target rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AttackSpec {
    None,
    Selfish {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        interval: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
    },
    TrimAttack {
        #[serde(default = "default_delta_lo")]
        delta_lo: f64,
        #[serde(default = "default_delta_hi")]
        delta_hi: f64,
    },
    Gaussian {
        #[serde(default = "default_sigma")]
        sigma: f64,
    },
    Independent,
    TwoCoalitions,
}

fn default_delta_lo() -> f64 {
    0.5
}

fn default_delta_hi() -> f64 {
    2.0
}

fn default_sigma() -> f64 {
    200.0
}

impl AttackSpec {
    /// Selfish attack with every parameter at its default.
    pub fn selfish() -> Self {
        AttackSpec::Selfish {
            lambda: None,
            b: None,
            epsilon: None,
            interval: None,
            alpha: None,
            beta: None,
        }
    }

    pub fn resolve(&self, rule: &AggregationRule) -> AttackMode {
        match *self {
            AttackSpec::None => AttackMode::NoAttack,
            AttackSpec::Selfish {
                lambda,
                b,
                epsilon,
                interval,
                alpha,
                beta,
            } => {
                let d = AttackPlan::for_rule(rule);
                AttackMode::Selfish(AttackPlan {
                    lambda: lambda.unwrap_or(d.lambda),
                    b: b.unwrap_or(d.b),
                    epsilon: epsilon.unwrap_or(d.epsilon),
                    interval: interval.unwrap_or(d.interval),
                    flame_alpha: alpha.unwrap_or(d.flame_alpha),
                    flame_beta: beta.unwrap_or(d.flame_beta),
                })
            }
            AttackSpec::TrimAttack { delta_lo, delta_hi } => {
                AttackMode::Baseline(BaselineKind::TrimAttack { delta_lo, delta_hi })
            }
            AttackSpec::Gaussian { sigma } => AttackMode::Baseline(BaselineKind::GaussianAttack { sigma }),
            AttackSpec::Independent => AttackMode::Baseline(BaselineKind::Independent),
            AttackSpec::TwoCoalitions => AttackMode::Baseline(BaselineKind::TwoCoalitions),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub roles: RoleConfig,
    /// Rule of the non-selfish clients.
    pub rule: RuleSpec,
    pub attack: AttackSpec,
    /// Rule of the selfish clients; defaults to `rule`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selfish_rule: Option<RuleSpec>,
    #[serde(default)]
    pub info_mode: InfoMode,
    pub trainer: TrainerConfig,
    pub partition: PartitionConfig,
    pub data: DataSpec,
    pub rounds: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub execution: Execution,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn setup(&self) -> Result<ExperimentSetup> {
        let roles = validate_roles(self.roles)?;
        let rule = self.rule.resolve(&roles);
        let setup = ExperimentSetup {
            roles,
            rule,
            selfish_rule: self.selfish_rule.map_or(rule, |r| r.resolve(&roles)),
            info_mode: self.info_mode,
            attack: self.attack.resolve(&rule),
            trainer: self.trainer,
            partition: self.partition,
            rounds: self.rounds,
            seed: self.seed,
            execution: self.execution,
        };
        setup.validate()?;
        Ok(setup)
    }

    /// Validates everything that can be checked without loading data.
    pub fn validate(&self) -> Result<()> {
        let setup = self.setup()?;
        if let DataSpec::Synthetic { classes, .. } = self.data {
            setup.partition.validate(classes, setup.roles.total())?;
        }
        Ok(())
    }

    /// Loads the data and builds the simulation.
    pub fn build(&self) -> Result<Simulation> {
        let setup = self.setup()?;
        let (train, test) = self.data.load(&Rng::new(self.seed))?;
        Simulation::new(setup, &train, test)
    }
}

/// Runs every round of `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.build()?.run()
}
