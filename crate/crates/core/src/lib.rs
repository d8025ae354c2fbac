//! Decentralized federated learning simulator with selfish-client attacks.
//!
//! Clients train locally, exchange shared models with every peer, and
//! aggregate what they receive. Selfish clients share honestly among
//! themselves but send crafted models to non-selfish clients so that each
//! non-selfish client's post-aggregation model lands on a per-coordinate
//! optimum that keeps it useful to the selfish coalition while pulling it
//! away from what honest aggregation would have produced.
//!
//! Module map:
//!
//! * [`model`], [`roles`], [`exchange`], [`rng`]: shared domain types
//! * [`aggregation`]: FedAvg, Median, Trimmed-mean, Krum, FLTrust, FLAME
//! * [`attack`]: optimal-target solver, per-rule crafting, start detector
//! * [`baselines`]: Gaussian and Trim attacks, Independent and Two Coalitions modes
//! * [`simulation`]: data, partitioning, local training, round engine
//! * [`reporting`]: metrics, CSV records, sweeps
//! * [`config`]: JSON experiment configuration
//! * [`verify`]: randomized optimality oracle suite

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregation;
pub mod attack;
pub mod baselines;
pub mod config;
pub mod error;
pub mod exchange;
pub mod exec;
pub mod model;
pub mod reporting;
pub mod rng;
pub mod roles;
pub mod simulation;
pub mod verify;

pub use error::{Error, Result};
pub use exchange::RoundExchange;
pub use exec::Execution;
pub use model::{ClientId, ModelVector};
pub use rng::Rng;
pub use roles::{validate_roles, Role, RoleConfig};
