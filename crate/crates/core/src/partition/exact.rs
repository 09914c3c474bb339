//! Branch-and-bound search for a max-min optimal partition.
//!
//! Nodes are visited in angular order and each is appended to one group.
//! Because every group receives its members in angular order, the gap between
//! a node and the previous member of its group is final the moment the node is
//! placed; only the wraparound gap of each group stays open until the end. The
//! minimum over committed gaps is therefore an upper bound on every completion
//! of a partial assignment.
//!
//! Groups are interchangeable, so a node may open at most the first empty
//! group. The search runs in two passes over a frontier of subtrees:
//!
//! 1. find the optimal value, with all subtrees sharing one incumbent;
//! 2. find the first leaf, in depth-first order, that reaches that value.
//!
//! The second pass makes the returned partition independent of thread timing.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use super::{approximate_partition, check_capacity, Method, PartitionResult};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::geometry::{angular_order, partition_objective, shifted_gap, wraparound_gap, NodeProfile, Partition};

/// Subtrees handed out per pass; enough to keep a typical pool busy.
const FRONTIER_TARGET: usize = 256;
const DEADLINE_CHECK_INTERVAL: u64 = 4096;

#[derive(Debug, Clone, Copy, Default)]
pub struct ExactSolver {
    /// Wall-clock budget for the whole search; `None` searches to completion.
    pub time_limit: Option<Duration>,
    pub exec: Exec,
}

/// Optimal partition without a time limit.
pub fn exact_partition(nodes: &[NodeProfile], groups: usize, capacity: usize) -> Result<PartitionResult> {
    ExactSolver::default().solve(nodes, groups, capacity)
}

impl ExactSolver {
    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn solve(&self, nodes: &[NodeProfile], groups: usize, capacity: usize) -> Result<PartitionResult> {
        let start = Instant::now();
        check_capacity(nodes.len(), groups, capacity)?;

        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by(|&a, &b| angular_order(&nodes[a], &nodes[b]));
        let sorted: Vec<NodeProfile> = order.iter().map(|&i| nodes[i]).collect();

        let incumbent = approximate_partition(nodes, groups, capacity)?.objective;
        let search = Search {
            nodes: &sorted,
            groups,
            capacity,
            deadline: self.time_limit.map(|d| start + d),
            aborted: AtomicBool::new(false),
        };
        let frontier = search.frontier();

        // pass 1: optimal value
        let best = AtomicU64::new(incumbent.to_bits());
        let outcomes = exec::map_collect(self.exec, &frontier, |prefix| search.improve(prefix, &best));
        if outcomes.iter().any(Option::is_none) {
            return Err(Error::Timeout(start.elapsed()));
        }
        let optimum = f64::from_bits(best.load(Ordering::SeqCst));

        // pass 2: first leaf in depth-first order reaching the optimum
        let found_at = AtomicUsize::new(usize::MAX);
        let indexed: Vec<(usize, &Vec<usize>)> = frontier.iter().enumerate().collect();
        let leaves = exec::map_collect(self.exec, &indexed, |&(i, prefix)| {
            if i > found_at.load(Ordering::SeqCst) {
                return Ok(None);
            }
            let leaf = search.first_reaching(prefix, optimum);
            if let Ok(Some(_)) = &leaf {
                found_at.fetch_min(i, Ordering::SeqCst);
            }
            leaf
        });
        let mut sorted_assignment = None;
        for leaf in leaves {
            match leaf {
                Err(()) => return Err(Error::Timeout(start.elapsed())),
                Ok(Some(a)) => {
                    sorted_assignment = Some(a);
                    break;
                }
                Ok(None) => {}
            }
        }
        let sorted_assignment = sorted_assignment.expect("the optimum is attained by some leaf");

        let mut assignment = vec![0; nodes.len()];
        for (pos, &i) in order.iter().enumerate() {
            assignment[i] = sorted_assignment[pos];
        }
        let partition = Partition::from_assignment(nodes, &assignment, groups, capacity)?;
        let objective = partition_objective(nodes, &partition)?.objective;
        debug_assert_eq!(objective, optimum);
        Ok(PartitionResult {
            partition,
            objective,
            method: Method::Exact,
            solve_time: start.elapsed(),
        })
    }
}

struct Search<'a> {
    /// Nodes in angular order.
    nodes: &'a [NodeProfile],
    groups: usize,
    capacity: usize,
    deadline: Option<Instant>,
    aborted: AtomicBool,
}

/// Incremental state of a partial assignment.
struct State {
    assignment: Vec<usize>,
    first: Vec<usize>,
    last: Vec<usize>,
    size: Vec<usize>,
    used: usize,
    visited: u64,
}

enum Goal<'a> {
    /// Raise the shared incumbent; prune anything that cannot beat it.
    Improve(&'a AtomicU64),
    /// Stop at the first leaf whose value reaches the target.
    Reach(f64),
}

impl Search<'_> {
    fn new_state(&self) -> State {
        State {
            assignment: Vec::with_capacity(self.nodes.len()),
            first: vec![usize::MAX; self.groups],
            last: vec![usize::MAX; self.groups],
            size: vec![0; self.groups],
            used: 0,
            visited: 0,
        }
    }

    /// Gap committed by appending the next node to group `g`, or `π` if the
    /// group is empty.
    fn gap_if_placed(&self, state: &State, g: usize) -> f64 {
        let pos = state.assignment.len();
        if state.size[g] == 0 {
            return PI;
        }
        let prev = &self.nodes[state.last[g]];
        let next = &self.nodes[pos];
        shifted_gap(prev, next, next.theta() - prev.theta())
    }

    /// Groups the next node may join: open groups with room, plus the first
    /// empty one. Groups fill in index order, so the bound on `g` is fixed
    /// while the children of one state are visited.
    fn candidate_limit(&self, state: &State) -> usize {
        (state.used + 1).min(self.groups)
    }

    fn has_room(&self, state: &State, g: usize) -> bool {
        state.size[g] < self.capacity
    }

    fn push(&self, state: &mut State, g: usize) -> (usize, usize) {
        let pos = state.assignment.len();
        let saved = (state.first[g], state.last[g]);
        if state.size[g] == 0 {
            state.first[g] = pos;
            state.used += 1;
        }
        state.last[g] = pos;
        state.size[g] += 1;
        state.assignment.push(g);
        saved
    }

    fn pop(&self, state: &mut State, saved: (usize, usize)) {
        let g = state.assignment.pop().expect("pop after push");
        state.size[g] -= 1;
        if state.size[g] == 0 {
            state.used -= 1;
        }
        (state.first[g], state.last[g]) = saved;
    }

    fn leaf_value(&self, state: &State, bound: f64) -> f64 {
        (0..self.groups)
            .filter(|&g| state.size[g] >= 2)
            .map(|g| wraparound_gap(&self.nodes[state.first[g]], &self.nodes[state.last[g]]))
            .fold(bound, f64::min)
    }

    /// Replays `prefix`, returning the state and its committed bound.
    fn replay(&self, prefix: &[usize]) -> (State, f64) {
        let mut state = self.new_state();
        let mut bound = PI;
        for &g in prefix {
            bound = bound.min(self.gap_if_placed(&state, g));
            self.push(&mut state, g);
        }
        (state, bound)
    }

    /// Partial assignments in depth-first order, expanded level by level until
    /// there are enough of them or they are complete.
    fn frontier(&self) -> Vec<Vec<usize>> {
        let mut level: Vec<Vec<usize>> = vec![Vec::new()];
        let mut depth = 0;
        while level.len() < FRONTIER_TARGET && depth < self.nodes.len() {
            let mut next = Vec::with_capacity(level.len() * self.groups);
            for prefix in &level {
                let (state, _) = self.replay(prefix);
                for g in (0..self.candidate_limit(&state)).filter(|&g| self.has_room(&state, g)) {
                    let mut child = prefix.clone();
                    child.push(g);
                    next.push(child);
                }
            }
            level = next;
            depth += 1;
        }
        level
    }

    fn out_of_time(&self, state: &mut State) -> bool {
        state.visited += 1;
        if state.visited.is_multiple_of(DEADLINE_CHECK_INTERVAL) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.aborted.store(true, Ordering::Relaxed);
                }
            }
        }
        self.aborted.load(Ordering::Relaxed)
    }

    /// Pass 1 on one subtree. `None` means the search ran out of time.
    fn improve(&self, prefix: &[usize], best: &AtomicU64) -> Option<()> {
        let (mut state, bound) = self.replay(prefix);
        let goal = Goal::Improve(best);
        self.descend(&mut state, bound, &goal).map(|_| ())
    }

    /// Pass 2 on one subtree. `Err` means the search ran out of time.
    fn first_reaching(&self, prefix: &[usize], target: f64) -> std::result::Result<Option<Vec<usize>>, ()> {
        let (mut state, bound) = self.replay(prefix);
        if bound < target {
            return Ok(None);
        }
        self.descend(&mut state, bound, &Goal::Reach(target)).ok_or(())
    }

    /// Depth-first search below `state`. Returns `None` on timeout, otherwise
    /// the assignment of the leaf that satisfied a `Reach` goal, if any.
    fn descend(&self, state: &mut State, bound: f64, goal: &Goal) -> Option<Option<Vec<usize>>> {
        if self.out_of_time(state) {
            return None;
        }
        if state.assignment.len() == self.nodes.len() {
            let value = self.leaf_value(state, bound);
            return Some(match goal {
                Goal::Improve(best) => {
                    best.fetch_max(value.to_bits(), Ordering::SeqCst);
                    None
                }
                Goal::Reach(target) => (value >= *target).then(|| state.assignment.clone()),
            });
        }
        for g in 0..self.candidate_limit(state) {
            if !self.has_room(state, g) {
                continue;
            }
            let child_bound = bound.min(self.gap_if_placed(state, g));
            let prune = match goal {
                // nonnegative floats order like their bit patterns
                Goal::Improve(best) => child_bound <= f64::from_bits(best.load(Ordering::Relaxed)),
                Goal::Reach(target) => child_bound < *target,
            };
            if prune {
                continue;
            }
            let saved = self.push(state, g);
            let found = self.descend(state, child_bound, goal);
            self.pop(state, saved);
            match found {
                None => return None,
                Some(Some(leaf)) => return Some(Some(leaf)),
                Some(None) => {}
            }
        }
        Some(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::NodeId;
    use crate::partition::brute_force_partition;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn ring(n: usize) -> Vec<NodeProfile> {
        (0..n)
            .map(|k| NodeProfile::new(k as NodeId, k as f64 * TAU / n as f64, 0.0).unwrap())
            .collect()
    }

    fn random_nodes(rng: &mut ChaCha8Rng, k: usize) -> Vec<NodeProfile> {
        (0..k)
            .map(|i| {
                let sigma = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..0.2) };
                NodeProfile::new(i as NodeId, rng.random_range(0.0..TAU), sigma).unwrap()
            })
            .collect()
    }

    #[test]
    fn ring_alternation_is_optimal() {
        let r = exact_partition(&ring(6), 2, 3).unwrap();
        assert_abs_diff_eq!(r.objective, 2.0 * PI / 3.0, epsilon = 1e-12);
        assert_eq!(r.method, Method::Exact);
    }

    #[test]
    fn coincident_nodes_give_zero() {
        let nodes: Vec<_> = (0..5).map(|k| NodeProfile::new(k, 1.0, 0.0).unwrap()).collect();
        let r = exact_partition(&nodes, 3, 5).unwrap();
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn trivial_sizes() {
        assert_eq!(exact_partition(&[], 2, 1).unwrap().objective, PI);
        let r = exact_partition(&ring(3), 3, 1).unwrap();
        assert_eq!(r.objective, PI);
        assert_eq!(r.partition.group_sizes(), vec![1, 1, 1]);
    }

    #[test]
    fn matches_brute_force_on_small_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let k: usize = rng.random_range(1..=8);
            let groups: usize = rng.random_range(1..=3);
            let capacity = k.div_ceil(groups) + rng.random_range(0..2);
            let nodes = random_nodes(&mut rng, k);
            let exact = exact_partition(&nodes, groups, capacity).unwrap();
            let brute = brute_force_partition(&nodes, groups, capacity).unwrap();
            assert_eq!(exact.objective, brute.objective, "{nodes:?} G={groups} P={capacity}");
            assert!(exact.partition.group_sizes().iter().all(|&s| s <= capacity));
        }
    }

    #[test]
    fn parallel_and_sequential_agree_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let nodes = random_nodes(&mut rng, 12);
            let seq = ExactSolver::default().with_exec(Exec::Sequential).solve(&nodes, 3, 4).unwrap();
            let par = ExactSolver::default().with_exec(Exec::Parallel).solve(&nodes, 3, 4).unwrap();
            assert_eq!(seq.partition, par.partition);
            assert_eq!(seq.objective, par.objective);
        }
    }

    #[test]
    fn beats_or_matches_the_heuristic() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let nodes = random_nodes(&mut rng, 14);
            let exact = exact_partition(&nodes, 3, 12).unwrap();
            let approx = approximate_partition(&nodes, 3, 12).unwrap();
            assert!(exact.objective >= approx.objective);
        }
    }

    #[test]
    fn times_out() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let nodes = random_nodes(&mut rng, 60);
        let solver = ExactSolver::default().with_time_limit(Duration::from_millis(1));
        assert!(matches!(solver.solve(&nodes, 4, 15), Err(Error::Timeout(_))));
    }

    #[test]
    fn rejects_insufficient_capacity() {
        assert!(matches!(exact_partition(&ring(7), 2, 3), Err(Error::Capacity { .. })));
    }
}
