//! Uplink SINR under maximum ratio combining with perfect channel knowledge.
//!
//! For node `k` whose group holds the interferers `J`:
//!
//! ```text
//! SINR_k = ρ‖h_k‖⁴ / (ρ Σ_{j∈J} |h_kᴴ h_j|² + ‖h_k‖²)
//! ```
//!
//! where `ρ` is the per-node transmit SNR. Nodes in other groups transmit in
//! other coherence blocks and do not interfere.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelInstance;
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::geometry::{NodeId, Partition};
use crate::partition::Method;
use crate::stats::{mean_ci, MeanCi};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinrReport {
    pub per_node_sinr_db: BTreeMap<NodeId, f64>,
    pub min_db: f64,
    /// Mean of the per-node dB values.
    pub mean_db: f64,
    pub max_db: f64,
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Linear SINR of every node, in the order of `instance.profiles`.
pub fn mrc_sinr_linear(instance: &ChannelInstance, partition: &Partition, exec: Exec) -> Result<Vec<f64>> {
    let groups = partition.assignment_for(&instance.profiles)?;
    let h = &instance.channel;
    if h.rows() != groups.len() {
        return Err(Error::Consistency(format!(
            "{} profiles but {} channel rows",
            groups.len(),
            h.rows()
        )));
    }
    let rho = instance.snr_linear;
    let indices: Vec<usize> = (0..groups.len()).collect();
    Ok(exec::map_collect(exec, &indices, |&k| {
        let hk = h.row(k);
        let gain = h.row_power(k);
        let interference: f64 = (0..groups.len())
            .filter(|&j| j != k && groups[j] == groups[k])
            .map(|j| inner(hk, h.row(j)).norm_sqr())
            .sum();
        // ρ‖h‖⁴ / (ρI + ‖h‖²), arranged so a lone node yields exactly ρ‖h‖²
        rho * gain / (rho * interference / gain + 1.0)
    }))
}

pub fn mrc_sinr(instance: &ChannelInstance, partition: &Partition) -> Result<SinrReport> {
    mrc_sinr_with(instance, partition, Exec::default())
}

pub fn mrc_sinr_with(instance: &ChannelInstance, partition: &Partition, exec: Exec) -> Result<SinrReport> {
    let linear = mrc_sinr_linear(instance, partition, exec)?;
    let per_node_sinr_db: BTreeMap<NodeId, f64> = instance
        .profiles
        .iter()
        .zip(&linear)
        .map(|(p, &s)| (p.id(), to_db(s)))
        .collect();
    let db: Vec<f64> = per_node_sinr_db.values().copied().collect();
    let (min_db, max_db) = db
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let mean_db = if db.is_empty() {
        f64::NAN
    } else {
        db.iter().sum::<f64>() / db.len() as f64
    };
    Ok(SinrReport {
        per_node_sinr_db,
        min_db,
        // summation rounding must not push the mean outside [min, max]
        mean_db: mean_db.clamp(min_db.min(max_db), max_db.max(min_db)),
        max_db,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SinrStatistic {
    Min,
    Mean,
    Max,
}

/// Mean and 95% interval of one SINR statistic across instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinrSummary {
    pub nodes: usize,
    pub method: Method,
    pub statistic: SinrStatistic,
    pub ci: MeanCi,
}

/// Groups reports by `(node count, method)` and summarizes the min, mean and
/// max SINR of each group across instances.
pub fn aggregate<'a, I>(reports: I) -> Vec<SinrSummary>
where
    I: IntoIterator<Item = (usize, Method, &'a SinrReport)>,
{
    let mut grouped: BTreeMap<(usize, Method), Vec<&SinrReport>> = BTreeMap::new();
    for (nodes, method, report) in reports {
        grouped.entry((nodes, method)).or_default().push(report);
    }
    let mut out = Vec::new();
    for ((nodes, method), rs) in grouped {
        for statistic in [SinrStatistic::Min, SinrStatistic::Mean, SinrStatistic::Max] {
            let samples: Vec<f64> = rs
                .iter()
                .map(|r| match statistic {
                    SinrStatistic::Min => r.min_db,
                    SinrStatistic::Mean => r.mean_db,
                    SinrStatistic::Max => r.max_db,
                })
                .collect();
            out.push(SinrSummary {
                nodes,
                method,
                statistic,
                ci: mean_ci(&samples),
            });
        }
    }
    out
}
