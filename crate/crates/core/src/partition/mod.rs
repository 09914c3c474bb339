//! Partitioning strategies.
//!
//! * [`exact_partition`]: branch-and-bound search for a partition maximizing
//!   the max-min adjusted angular gap.
//! * [`approximate_partition`]: sort-and-round-robin heuristic, `O(K log K)`.
//! * [`clumped_partition`]: angularly adjacent nodes grouped together, the
//!   worst case for directional grouping.
//! * [`power_partition`]: nodes of similar received power grouped together;
//!   needs the full channel.
//! * [`brute_force_partition`]: exhaustive enumeration, used as an oracle.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{NodeProfile, Partition};

mod approx;
mod baseline;
mod brute;
mod exact;

pub use approx::approximate_partition;
pub use baseline::{clumped_partition, power_partition};
pub use brute::{brute_force_partition, BRUTE_FORCE_LIMIT};
pub use exact::{exact_partition, ExactSolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Approximation,
    Clumped,
    Power,
    BruteForce,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Exact,
        Method::Approximation,
        Method::Clumped,
        Method::Power,
        Method::BruteForce,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Approximation => "approximation",
            Method::Clumped => "clumped",
            Method::Power => "power",
            Method::BruteForce => "brute_force",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionResult {
    pub partition: Partition,
    /// Max-min adjusted angular gap of `partition`, radians.
    pub objective: f64,
    pub method: Method,
    pub solve_time: Duration,
}

pub(crate) fn check_capacity(num_nodes: usize, groups: usize, capacity: usize) -> Result<()> {
    if groups == 0 || capacity == 0 {
        return Err(Error::Config(format!(
            "need at least one group and one pilot, got G={groups}, P={capacity}"
        )));
    }
    if groups.saturating_mul(capacity) < num_nodes {
        return Err(Error::Capacity {
            nodes: num_nodes,
            groups,
            capacity,
        });
    }
    Ok(())
}

/// Balanced consecutive block sizes: sizes differ by at most one, earlier
/// groups take the larger blocks.
pub(crate) fn block_sizes(num_nodes: usize, groups: usize) -> Vec<usize> {
    let base = num_nodes / groups;
    let extra = num_nodes % groups;
    (0..groups).map(|g| base + usize::from(g < extra)).collect()
}

/// Assigns `order[i]` (indices into `nodes`) to consecutive balanced blocks.
pub(crate) fn blocks_in_order(
    nodes: &[NodeProfile],
    order: &[usize],
    groups: usize,
    capacity: usize,
) -> Result<Partition> {
    let mut assignment = vec![0; nodes.len()];
    let mut pos = order.iter();
    for (g, size) in block_sizes(nodes.len(), groups).into_iter().enumerate() {
        for &i in pos.by_ref().take(size) {
            assignment[i] = g;
        }
    }
    Partition::from_assignment(nodes, &assignment, groups, capacity)
}
