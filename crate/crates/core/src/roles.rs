use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ClientId;

/// Number of non-selfish (`n`) and selfish (`m`) clients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleConfig {
    pub n: usize,
    pub m: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    NonSelfish,
    Selfish,
}

impl RoleConfig {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        validate_roles(RoleConfig { n, m })
    }

    pub fn total(&self) -> usize {
        self.n + self.m
    }

    pub fn role(&self, id: ClientId) -> Role {
        if id.0 < self.n {
            Role::NonSelfish
        } else {
            Role::Selfish
        }
    }

    pub fn is_selfish(&self, id: ClientId) -> bool {
        self.role(id) == Role::Selfish
    }

    pub fn non_selfish(&self) -> impl Iterator<Item = ClientId> {
        (0..self.n).map(ClientId)
    }

    pub fn selfish(&self) -> impl Iterator<Item = ClientId> {
        (self.n..self.n + self.m).map(ClientId)
    }

    pub fn clients(&self) -> impl Iterator<Item = ClientId> {
        (0..self.total()).map(ClientId)
    }
}

/// Returns `cfg` unchanged if both groups are non-empty and `N >= 3m + 1`.
pub fn validate_roles(cfg: RoleConfig) -> Result<RoleConfig> {
    if cfg.n == 0 || cfg.m == 0 {
        return Err(Error::EmptyGroup { n: cfg.n, m: cfg.m });
    }
    if cfg.total() < 3 * cfg.m + 1 {
        return Err(Error::ThreatModelViolation {
            total: cfg.total(),
            selfish: cfg.m,
        });
    }
    Ok(cfg)
}
