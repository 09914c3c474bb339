//! Directional node descriptors and the max-min angular objective.
//!
//! Nodes of one group are placed on a circle at their dominant directions.
//! The value of a group is the smallest gap between circularly consecutive
//! members, where each gap is widened by `π·σ` for both of its endpoints and
//! capped at `π`. The objective of a partition is the smallest group value.
//!
//! The widening is the closed form of the per-node angular shifts of the
//! underlying mixed-integer model: a shift is bounded above by `π·σ` and only
//! ever enters the gap constraints with a positive sign, so the optimal shift
//! of every node sits on its upper bound.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Long-term directional descriptor of a node.
///
/// `theta` is the dominant direction in radians, in `[0, 2π)`. `sigma` is the
/// normalized angular spectrum spread, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct NodeProfile {
    id: NodeId,
    theta: f64,
    sigma: f64,
}

#[derive(Deserialize)]
struct RawProfile {
    id: NodeId,
    theta: f64,
    sigma: f64,
}

impl TryFrom<RawProfile> for NodeProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        NodeProfile::new(raw.id, raw.theta, raw.sigma)
    }
}

impl NodeProfile {
    pub fn new(id: NodeId, theta: f64, sigma: f64) -> Result<Self> {
        if !(0.0..TAU).contains(&theta) {
            return Err(Error::Domain(format!(
                "node {id}: theta {theta} outside [0, 2π)"
            )));
        }
        if !(0.0..=1.0).contains(&sigma) {
            return Err(Error::Domain(format!(
                "node {id}: sigma {sigma} outside [0, 1]"
            )));
        }
        Ok(NodeProfile { id, theta, sigma })
    }

    /// Builds a profile from any finite angle, wrapping it into `[0, 2π)`.
    pub fn wrapped(id: NodeId, theta: f64, sigma: f64) -> Result<Self> {
        let mut t = theta.rem_euclid(TAU);
        // rem_euclid can round up to exactly 2π for tiny negative inputs
        if t >= TAU {
            t = 0.0;
        }
        NodeProfile::new(id, t, sigma)
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Upper bound of the angular shift this node may take, `π·σ`.
    pub fn max_shift(&self) -> f64 {
        PI * self.sigma
    }
}

/// Total order used wherever nodes are placed around the circle: by direction,
/// then by id.
pub fn angular_order(a: &NodeProfile, b: &NodeProfile) -> Ordering {
    a.theta.total_cmp(&b.theta).then(a.id.cmp(&b.id))
}

/// Gap between two circularly consecutive nodes after both take their maximal
/// shift, capped at `π`.
pub fn adjusted_gap(a: &NodeProfile, b: &NodeProfile, raw_gap: f64) -> Result<f64> {
    if raw_gap.is_nan() || raw_gap < 0.0 {
        return Err(Error::Domain(format!(
            "raw angular gap must be nonnegative, got {raw_gap}"
        )));
    }
    Ok(shifted_gap(a, b, raw_gap))
}

#[inline]
pub(crate) fn shifted_gap(a: &NodeProfile, b: &NodeProfile, raw_gap: f64) -> f64 {
    (raw_gap + a.max_shift() + b.max_shift()).min(PI)
}

/// Gap from the last node of a group back around to its first node.
#[inline]
pub(crate) fn wraparound_gap(first: &NodeProfile, last: &NodeProfile) -> f64 {
    shifted_gap(last, first, first.theta + TAU - last.theta)
}

/// Value of a single group: the minimum adjusted gap over all circularly
/// consecutive pairs of members. Empty and singleton groups are worth `π`.
pub fn group_value(members: &[NodeProfile]) -> f64 {
    if members.len() <= 1 {
        return PI;
    }
    let mut sorted: Vec<&NodeProfile> = members.iter().collect();
    sorted.sort_by(|a, b| angular_order(a, b));
    sorted_group_value(&sorted)
}

/// [`group_value`] for members already in [`angular_order`].
pub(crate) fn sorted_group_value(sorted: &[&NodeProfile]) -> f64 {
    if sorted.len() <= 1 {
        return PI;
    }
    let consecutive = sorted
        .windows(2)
        .map(|w| shifted_gap(w[0], w[1], w[1].theta - w[0].theta));
    let wrap = wraparound_gap(sorted[0], sorted[sorted.len() - 1]);
    consecutive.fold(wrap, f64::min)
}

/// Assignment of nodes to `num_groups` disjoint groups of at most `capacity`
/// nodes each. Groups are indexed from 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    group_of: BTreeMap<NodeId, usize>,
    num_groups: usize,
    capacity: usize,
}

impl Partition {
    pub fn new(group_of: BTreeMap<NodeId, usize>, num_groups: usize, capacity: usize) -> Result<Self> {
        if num_groups == 0 || capacity == 0 {
            return Err(Error::Config(format!(
                "need at least one group and one pilot, got G={num_groups}, P={capacity}"
            )));
        }
        let mut sizes = vec![0usize; num_groups];
        for (&id, &g) in &group_of {
            if g >= num_groups {
                return Err(Error::Consistency(format!(
                    "node {id} assigned to group {g}, but only {num_groups} groups exist"
                )));
            }
            sizes[g] += 1;
        }
        if let Some(g) = sizes.iter().position(|&s| s > capacity) {
            return Err(Error::Consistency(format!(
                "group {g} holds {} nodes, capacity is {capacity}",
                sizes[g]
            )));
        }
        Ok(Partition {
            group_of,
            num_groups,
            capacity,
        })
    }

    /// Builds a partition from a group index per node, aligned with `nodes`.
    pub fn from_assignment(
        nodes: &[NodeProfile],
        groups: &[usize],
        num_groups: usize,
        capacity: usize,
    ) -> Result<Self> {
        if nodes.len() != groups.len() {
            return Err(Error::Consistency(format!(
                "{} nodes but {} group indices",
                nodes.len(),
                groups.len()
            )));
        }
        let mut group_of = BTreeMap::new();
        for (node, &g) in nodes.iter().zip(groups) {
            if group_of.insert(node.id, g).is_some() {
                return Err(Error::Consistency(format!("duplicate node id {}", node.id)));
            }
        }
        Partition::new(group_of, num_groups, capacity)
    }

    pub fn group_of(&self, id: NodeId) -> Option<usize> {
        self.group_of.get(&id).copied()
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.group_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.group_of.is_empty()
    }

    /// `(node id, group)` pairs in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, usize)> + '_ {
        self.group_of.iter().map(|(&id, &g)| (id, g))
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_groups];
        for &g in self.group_of.values() {
            sizes[g] += 1;
        }
        sizes
    }

    /// Group index of each node in `nodes`, in the same order.
    pub fn assignment_for(&self, nodes: &[NodeProfile]) -> Result<Vec<usize>> {
        self.check_covers(nodes)?;
        Ok(nodes.iter().map(|n| self.group_of[&n.id]).collect())
    }

    /// Checks that the partition assigns exactly the ids of `nodes`, each once.
    pub fn check_covers(&self, nodes: &[NodeProfile]) -> Result<()> {
        let mut seen = BTreeMap::new();
        for n in nodes {
            if seen.insert(n.id, ()).is_some() {
                return Err(Error::Consistency(format!("duplicate node id {}", n.id)));
            }
            if !self.group_of.contains_key(&n.id) {
                return Err(Error::Consistency(format!("node {} is not assigned", n.id)));
            }
        }
        if let Some(id) = self.group_of.keys().find(|id| !seen.contains_key(id)) {
            return Err(Error::Consistency(format!("partition references unknown node {id}")));
        }
        Ok(())
    }

    /// Splits `nodes` into their groups, preserving input order within each.
    pub fn split<'a>(&self, nodes: &'a [NodeProfile]) -> Result<Vec<Vec<&'a NodeProfile>>> {
        self.check_covers(nodes)?;
        let mut groups = vec![Vec::new(); self.num_groups];
        for n in nodes {
            groups[self.group_of[&n.id]].push(n);
        }
        Ok(groups)
    }
}

/// Per-group values and the resulting partition objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupEvaluation {
    pub per_group_value: Vec<f64>,
    pub objective: f64,
}

pub fn partition_objective(nodes: &[NodeProfile], partition: &Partition) -> Result<GroupEvaluation> {
    let per_group_value: Vec<f64> = partition
        .split(nodes)?
        .into_iter()
        .map(|mut members| {
            members.sort_by(|a, b| angular_order(a, b));
            sorted_group_value(&members)
        })
        .collect();
    let objective = per_group_value.iter().copied().fold(PI, f64::min);
    Ok(GroupEvaluation {
        per_group_value,
        objective,
    })
}
