use serde::{Deserialize, Serialize};

use crate::aggregation::AggregationRule;
use crate::attack::{craft_shared_model, AttackPlan, AttackStartDetector, CraftedShares};
use crate::baselines::{craft_gaussian, craft_trim_attack, run_mode_filter, BaselineKind};
use crate::error::{Error, Result};
use crate::exchange::RoundExchange;
use crate::exec::Execution;
use crate::model::{ClientId, ModelVector};
use crate::reporting::{compute_metrics, ExperimentRecord};
use crate::rng::{stream, Rng};
use crate::roles::{validate_roles, RoleConfig};

use super::data::Dataset;
use super::partition::{partition_non_iid, PartitionConfig};
use super::trainer::{local_update, LogisticRegression, Trainer, TrainerConfig};

/// What the selfish clients do.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AttackMode {
    NoAttack,
    Selfish(AttackPlan),
    Baseline(BaselineKind),
}

/// Which received models a selfish client aggregates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfoMode {
    /// Everything received, benign shares included.
    #[default]
    All,
    /// Only the models of fellow selfish clients (and its own).
    SelfishOnly,
}

/// Fully resolved experiment parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSetup {
    pub roles: RoleConfig,
    pub rule: AggregationRule,
    pub selfish_rule: AggregationRule,
    pub info_mode: InfoMode,
    pub attack: AttackMode,
    pub trainer: TrainerConfig,
    pub partition: PartitionConfig,
    pub rounds: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl ExperimentSetup {
    pub fn validate(&self) -> Result<()> {
        validate_roles(self.roles)?;
        self.trainer.validate()?;
        match &self.attack {
            AttackMode::NoAttack => {}
            AttackMode::Selfish(plan) => {
                plan.validate()?;
                if let AggregationRule::TrimmedMean { c } = self.rule {
                    if c != self.roles.m {
                        return Err(Error::TrimCountMismatch { c, m: self.roles.m });
                    }
                }
            }
            AttackMode::Baseline(kind) => kind.validate()?,
        }
        Ok(())
    }
}

/// Outcome of one global round.
#[derive(Clone, Debug)]
pub struct RoundOutput {
    pub exchange: RoundExchange,
    pub losses: Vec<f64>,
    pub record: ExperimentRecord,
}

/// All clients' state across rounds.
pub struct Simulation {
    setup: ExperimentSetup,
    trainer: Box<dyn Trainer>,
    shards: Vec<Dataset>,
    test: Dataset,
    models: Vec<ModelVector>,
    detector: Option<AttackStartDetector>,
    round: u64,
    root: Rng,
}

impl Simulation {
    /// Partitions `train` across clients and starts everyone from zeros.
    pub fn new(setup: ExperimentSetup, train: &Dataset, test: Dataset) -> Result<Self> {
        setup.validate()?;
        if train.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if test.is_empty() {
            return Err(Error::EmptyTestSet);
        }
        if train.num_features() != test.num_features() {
            return Err(Error::DimensionMismatch {
                expected: train.num_features(),
                got: test.num_features(),
            });
        }
        let root = Rng::new(setup.seed);
        let shards = partition_non_iid(
            train,
            &setup.roles,
            &setup.partition,
            &mut root.derive(&[stream::PARTITION]),
        )?;
        let classes = train.num_classes().max(test.num_classes());
        let trainer = Box::new(LogisticRegression::new(train.num_features(), classes));
        Self::with_shards(setup, trainer, shards, test)
    }

    /// Uses the given per-client shards and trainer directly.
    pub fn with_shards(
        setup: ExperimentSetup,
        trainer: Box<dyn Trainer>,
        shards: Vec<Dataset>,
        test: Dataset,
    ) -> Result<Self> {
        setup.validate()?;
        if shards.len() != setup.roles.total() {
            return Err(Error::InvalidParameter(format!(
                "{} shards for {} clients",
                shards.len(),
                setup.roles.total()
            )));
        }
        if let Some(c) = shards.iter().position(Dataset::is_empty) {
            return Err(Error::Dataset(format!("client {c} received no training data")));
        }
        let detector = match &setup.attack {
            AttackMode::Selfish(plan) => Some(plan.detector()?),
            _ => None,
        };
        let models = vec![ModelVector::zeros(trainer.dim()); setup.roles.total()];
        let root = Rng::new(setup.seed);
        Ok(Self {
            setup,
            trainer,
            shards,
            test,
            models,
            detector,
            round: 0,
            root,
        })
    }

    pub fn setup(&self) -> &ExperimentSetup {
        &self.setup
    }

    /// Post-aggregation models of the last completed round.
    pub fn models(&self) -> &[ModelVector] {
        &self.models
    }

    pub fn shards(&self) -> &[Dataset] {
        &self.shards
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn detector(&self) -> Option<&AttackStartDetector> {
        self.detector.as_ref()
    }

    /// Per-client training stream for `round`.
    pub fn train_rng(seed: u64, client: usize, round: u64) -> Rng {
        Rng::new(seed).derive(&[stream::TRAIN, client as u64, round])
    }

    /// Runs global round `self.round() + 1`.
    pub fn run_round(&mut self) -> Result<RoundOutput> {
        let round = self.round + 1;
        let setup = &self.setup;
        let roles = setup.roles;

        // Step I
        let trainer = self.trainer.as_ref();
        let (models, shards) = (&self.models, &self.shards);
        let trained = setup.execution.map(roles.total(), |c| {
            let mut rng = Self::train_rng(setup.seed, c, round);
            local_update(trainer, &models[c], &shards[c], &setup.trainer, &mut rng)
        });
        let mut pre_agg = Vec::with_capacity(trained.len());
        let mut losses = Vec::with_capacity(trained.len());
        for result in trained {
            let (model, loss) = result?;
            pre_agg.push(model);
            losses.push(loss);
        }
        let mean_selfish_loss = roles.selfish().map(|c| losses[c.0]).sum::<f64>() / roles.m as f64;

        let active = match self.detector.take() {
            Some(det) => {
                let det = det.update(mean_selfish_loss, round)?;
                let started = det.started();
                self.detector = Some(det);
                started
            }
            None => matches!(
                setup.attack,
                AttackMode::Baseline(BaselineKind::TrimAttack { .. } | BaselineKind::GaussianAttack { .. })
            ),
        };

        // Step II
        let exchange = build_exchange(pre_agg, &self.models, setup, active, &self.root, round)?;

        // Step III
        let post = aggregate_all(&exchange, setup)?;
        let (mtas, mtans, gap) = compute_metrics(trainer, &post, &roles, &self.test)?;
        self.models = post;
        self.round = round;
        Ok(RoundOutput {
            exchange,
            losses,
            record: ExperimentRecord {
                round,
                mtas,
                mtans,
                gap,
                mean_selfish_loss,
                attack_started: active,
            },
        })
    }

    /// Runs the remaining rounds up to `setup.rounds`.
    pub fn run(&mut self) -> Result<Vec<ExperimentRecord>> {
        let mut records = Vec::with_capacity(self.setup.rounds);
        while (self.round as usize) < self.setup.rounds {
            records.push(self.run_round()?.record);
        }
        Ok(records)
    }
}

/// Crafted shares for every non-selfish receiver, in receiver order.
fn craft_all(
    pre_agg: &[ModelVector],
    prev_post: &[ModelVector],
    setup: &ExperimentSetup,
    root: &Rng,
    round: u64,
) -> Result<Vec<CraftedShares>> {
    let (n, m) = (setup.roles.n, setup.roles.m);
    let benign = &pre_agg[..n];
    let crafted = setup.execution.map(n, |i| match &setup.attack {
        AttackMode::Selfish(plan) => craft_shared_model(&setup.rule, &pre_agg[i], benign, m, plan),
        AttackMode::Baseline(BaselineKind::TrimAttack { delta_lo, delta_hi }) => {
            let mut rng = root.derive(&[stream::TRIM, i as u64, round]);
            craft_trim_attack(benign, &prev_post[i], m, *delta_lo, *delta_hi, &mut rng)
        }
        AttackMode::Baseline(BaselineKind::GaussianAttack { sigma }) => {
            let mut rng = root.derive(&[stream::GAUSSIAN, i as u64, round]);
            craft_gaussian(pre_agg[i].dim(), m, *sigma, &mut rng)
        }
        _ => unreachable!("only crafting modes reach here"),
    });
    crafted.into_iter().collect()
}

/// Step II: the honest exchange, with crafted shares substituted when
/// `active`, or filtered for the run modes.
pub fn build_exchange(
    pre_agg: Vec<ModelVector>,
    prev_post: &[ModelVector],
    setup: &ExperimentSetup,
    active: bool,
    root: &Rng,
    round: u64,
) -> Result<RoundExchange> {
    let roles = setup.roles;
    match &setup.attack {
        AttackMode::Baseline(mode @ (BaselineKind::Independent | BaselineKind::TwoCoalitions)) => {
            Ok(run_mode_filter(mode, &roles, RoundExchange::honest(pre_agg)))
        }
        AttackMode::NoAttack => Ok(RoundExchange::honest(pre_agg)),
        _ if !active => Ok(RoundExchange::honest(pre_agg)),
        _ => {
            let crafted = craft_all(&pre_agg, prev_post, setup, root, round)?;
            let mut exchange = RoundExchange::honest(pre_agg);
            for (receiver, shares) in roles.non_selfish().zip(crafted) {
                for (sender, share) in roles.selfish().zip(shares.into_vec()) {
                    exchange.set(sender, receiver, share);
                }
            }
            Ok(exchange)
        }
    }
}

/// Step III: every client's post-aggregation model.
pub fn aggregate_all(exchange: &RoundExchange, setup: &ExperimentSetup) -> Result<Vec<ModelVector>> {
    let roles = setup.roles;
    let coalition_mode = matches!(
        setup.attack,
        AttackMode::Baseline(BaselineKind::Independent | BaselineKind::TwoCoalitions)
    );
    let results = setup.execution.map(roles.total(), |c| {
        let client = ClientId(c);
        let selfish = roles.is_selfish(client);
        let models: Vec<ModelVector> = exchange
            .inbox(client)
            .iter()
            .filter(|(sender, _)| !(selfish && setup.info_mode == InfoMode::SelfishOnly) || roles.is_selfish(*sender))
            .map(|(_, model)| model.clone())
            .collect();
        let rule = if coalition_mode {
            &AggregationRule::FedAvg
        } else if selfish {
            &setup.selfish_rule
        } else {
            &setup.rule
        };
        rule.aggregate(&models, exchange.pre_agg(client))
    });
    results.into_iter().collect()
}
