//! Grouping of massive-MIMO nodes into coherence-block groups from long-term
//! directional channel properties only, and evaluation of the resulting
//! groupings against full-channel baselines.
//!
//! * [`geometry`]: node descriptors, partitions and the max-min angular
//!   objective.
//! * [`channel`]: clustered multipath instance generation and its file format.
//! * [`partition`]: exact, heuristic and baseline partitioners.
//! * [`sinr`]: per-node SINR under maximum ratio combining.
//! * [`lp`]: export of the mixed-integer model in CPLEX LP format.
//! * [`harness`]: the generate / evaluate / summarize experiment pipeline.
//!
//! Data-parallel loops use rayon when the `parallel` feature is enabled (the
//! default); see [`Exec`].

pub mod channel;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod harness;
pub mod lp;
pub mod partition;
pub mod sinr;
pub mod stats;

pub use channel::{generate_instance, ChannelInstance, ExperimentConfig};
pub use error::{Error, Result};
pub use exec::Exec;
pub use geometry::{group_value, partition_objective, GroupEvaluation, NodeId, NodeProfile, Partition};
pub use partition::{
    approximate_partition, brute_force_partition, clumped_partition, exact_partition, power_partition,
    ExactSolver, Method, PartitionResult,
};
pub use sinr::{mrc_sinr, SinrReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
