//! The round engine, local training, and data generation and partitioning.

mod data;
mod engine;
mod partition;
mod trainer;

pub use data::{generate_synthetic, BlobGenerator, DataSpec, Dataset};
pub use engine::{aggregate_all, build_exchange, AttackMode, ExperimentSetup, InfoMode, RoundOutput, Simulation};
pub use partition::{client_group, partition_non_iid, PartitionConfig};
pub use trainer::{accuracy, correct_count, local_update, train_epochs, LogisticRegression, Trainer, TrainerConfig};
