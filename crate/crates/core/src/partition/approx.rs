use std::f64::consts::PI;
use std::time::Instant;

use super::{check_capacity, Method, PartitionResult};
use crate::error::Result;
use crate::geometry::{partition_objective, NodeProfile, Partition};

/// Round-robin heuristic.
///
/// The node whose direction minus its shift allowance is smallest opens
/// group 0. All other nodes are ordered by direction plus shift allowance
/// and dealt to groups `1, 2, …, G-1, 0, 1, …` in turn. Ties are broken by
/// node id, so the result does not depend on input order.
pub fn approximate_partition(nodes: &[NodeProfile], groups: usize, capacity: usize) -> Result<PartitionResult> {
    let start = Instant::now();
    check_capacity(nodes.len(), groups, capacity)?;

    let mut assignment = vec![0usize; nodes.len()];
    let lower = |n: &NodeProfile| n.theta() - PI * n.sigma();
    let upper = |n: &NodeProfile| n.theta() + PI * n.sigma();

    let first = (0..nodes.len()).min_by(|&a, &b| {
        lower(&nodes[a])
            .total_cmp(&lower(&nodes[b]))
            .then(nodes[a].id().cmp(&nodes[b].id()))
    });
    if let Some(first) = first {
        let mut rest: Vec<(f64, u32, usize)> = nodes
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != first)
            .map(|(i, n)| (upper(n), n.id(), i))
            .collect();
        rest.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        assignment[first] = 0;
        for (pos, &(_, _, i)) in rest.iter().enumerate() {
            assignment[i] = (pos + 1) % groups;
        }
    }

    let partition = Partition::from_assignment(nodes, &assignment, groups, capacity)?;
    let objective = partition_objective(nodes, &partition)?.objective;
    Ok(PartitionResult {
        partition,
        objective,
        method: Method::Approximation,
        solve_time: start.elapsed(),
    })
}
