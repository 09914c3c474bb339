//! Reference partitioners used for comparison.

use std::time::Instant;

use super::{blocks_in_order, check_capacity, Method, PartitionResult};
use crate::channel::ChannelInstance;
use crate::error::Result;
use crate::geometry::{angular_order, partition_objective, NodeProfile};

const POWER_RESOLUTION: f64 = 1e12;

/// Sorts nodes by direction and fills groups with consecutive blocks.
pub fn clumped_partition(nodes: &[NodeProfile], groups: usize, capacity: usize) -> Result<PartitionResult> {
    let start = Instant::now();
    check_capacity(nodes.len(), groups, capacity)?;
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| angular_order(&nodes[a], &nodes[b]));
    let partition = blocks_in_order(nodes, &order, groups, capacity)?;
    let objective = partition_objective(nodes, &partition)?.objective;
    Ok(PartitionResult {
        partition,
        objective,
        method: Method::Clumped,
        solve_time: start.elapsed(),
    })
}

/// Sorts nodes by received power `‖h_k‖²`, strongest first, and fills groups
/// with consecutive blocks. Powers equal to within a relative `1e-12` count as
/// ties, which go to the lower node id.
///
/// Generated instances normalize every row to `‖h_k‖² = M`, so on those this
/// reduces to grouping by id.
pub fn power_partition(instance: &ChannelInstance, groups: usize, capacity: usize) -> Result<PartitionResult> {
    let start = Instant::now();
    let nodes = &instance.profiles;
    check_capacity(nodes.len(), groups, capacity)?;
    let power: Vec<f64> = (0..nodes.len()).map(|k| instance.channel.row_power(k)).collect();
    let peak = power.iter().copied().fold(0.0, f64::max);
    let level: Vec<i64> = power
        .iter()
        .map(|&p| if peak > 0.0 { (p / peak * POWER_RESOLUTION).round() as i64 } else { 0 })
        .collect();
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| level[b].cmp(&level[a]).then(nodes[a].id().cmp(&nodes[b].id())));
    let partition = blocks_in_order(nodes, &order, groups, capacity)?;
    let objective = partition_objective(nodes, &partition)?.objective;
    Ok(PartitionResult {
        partition,
        objective,
        method: Method::Power,
        solve_time: start.elapsed(),
    })
}
