use std::f64::consts::PI;
use std::time::Instant;

use super::{check_capacity, Method, PartitionResult};
use crate::error::{Error, Result};
use crate::geometry::{group_value, partition_objective, NodeProfile, Partition};

/// Largest number of raw assignments (`G^K`) the enumeration accepts.
pub const BRUTE_FORCE_LIMIT: f64 = 1e8;

/// Enumerates every assignment of nodes to groups that respects the capacity
/// and keeps one with the largest objective. Among equally good assignments
/// the lexicographically smallest group vector (in input order) wins.
pub fn brute_force_partition(nodes: &[NodeProfile], groups: usize, capacity: usize) -> Result<PartitionResult> {
    let start = Instant::now();
    check_capacity(nodes.len(), groups, capacity)?;
    let assignments = (groups as f64).powi(nodes.len() as i32);
    if assignments > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            assignments,
            limit: BRUTE_FORCE_LIMIT,
        });
    }

    let k = nodes.len();
    let mut current = vec![0usize; k];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut buckets: Vec<Vec<NodeProfile>> = vec![Vec::with_capacity(capacity); groups];
    loop {
        for b in &mut buckets {
            b.clear();
        }
        for (n, &g) in nodes.iter().zip(&current) {
            buckets[g].push(*n);
        }
        if buckets.iter().all(|b| b.len() <= capacity) {
            let value = buckets.iter().map(|b| group_value(b)).fold(PI, f64::min);
            if best.as_ref().is_none_or(|(v, _)| value > *v) {
                best = Some((value, current.clone()));
            }
        }
        // odometer, last node fastest, so visiting order is lexicographic
        let mut i = k;
        loop {
            if i == 0 {
                let (_, assignment) = best.expect("capacity check guarantees a feasible assignment");
                let partition = Partition::from_assignment(nodes, &assignment, groups, capacity)?;
                let objective = partition_objective(nodes, &partition)?.objective;
                return Ok(PartitionResult {
                    partition,
                    objective,
                    method: Method::BruteForce,
                    solve_time: start.elapsed(),
                });
            }
            i -= 1;
            current[i] += 1;
            if current[i] < groups {
                break;
            }
            current[i] = 0;
        }
    }
}
