use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::roles::RoleConfig;

use super::data::Dataset;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionConfig {
    /// Probability that an example goes to the group matching its label.
    pub rho: f64,
    /// Number of client groups; the class count when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<usize>,
}

impl PartitionConfig {
    pub fn resolve_groups(&self, num_classes: usize) -> usize {
        self.groups.unwrap_or(num_classes)
    }

    pub fn validate(&self, num_classes: usize, num_clients: usize) -> Result<usize> {
        let g = self.resolve_groups(num_classes);
        if g < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 groups, got {g}")));
        }
        if g > num_clients {
            return Err(Error::InvalidParameter(format!(
                "{g} groups but only {num_clients} clients"
            )));
        }
        // 1/G written as a product so rho = 1/G passes for every G
        if !(self.rho * g as f64 >= 1.0 - 1e-12 && self.rho <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rho must be in [1/{g}, 1], got {}",
                self.rho
            )));
        }
        Ok(g)
    }
}

/// Group of client `c` under the round-robin split.
pub fn client_group(client: usize, groups: usize) -> usize {
    client % groups
}

/// Label-skewed split over all `N + M` clients.
///
/// Group `g` holds clients `c` with `c % G == g`. An example labelled `y` goes
/// to group `y % G` with probability `rho` and to each other group with
/// probability `(1 - rho) / (G - 1)`, then to a uniformly chosen client of
/// that group.
pub fn partition_non_iid(
    data: &Dataset,
    clients: &RoleConfig,
    cfg: &PartitionConfig,
    rng: &mut Rng,
) -> Result<Vec<Dataset>> {
    let total = clients.total();
    let g = cfg.validate(data.num_classes(), total)?;
    let members: Vec<Vec<usize>> = (0..g)
        .map(|group| (0..total).filter(|&c| client_group(c, g) == group).collect())
        .collect();
    let mut shards: Vec<Vec<usize>> = vec![Vec::new(); total];
    for i in 0..data.len() {
        let home = data.label(i) % g;
        let group = if rng.random::<f64>() < cfg.rho {
            home
        } else {
            // uniform over the other G - 1 groups
            let other = rng.random_range(0..g - 1);
            if other >= home {
                other + 1
            } else {
                other
            }
        };
        let client = members[group][rng.random_range(0..members[group].len())];
        shards[client].push(i);
    }
    Ok(shards.iter().map(|idx| data.subset(idx)).collect())
}
