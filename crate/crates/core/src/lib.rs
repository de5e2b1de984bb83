//! Flow-based refinement of hypergraph partitions.
//!
//! The crate computes maximum flows directly on weighted hypergraphs
//! ([`flow_hypergraph`], [`dinic`]), runs the HyperFlowCutter incremental
//! cut/balance loop on them ([`hfc`]), and uses that loop to improve k-way
//! partitions under the connectivity objective ([`refine`]).

pub mod dinic;
pub mod extract;
pub mod flow_hypergraph;
pub mod hfc;
pub mod hypergraph;
pub mod initial;
pub mod io;
pub mod isolated;
pub mod piercing;
pub mod refine;

pub use dinic::{Dinic, DistanceLabels, PushAudit, Reachability};
pub use extract::{extract_flow_problem, pair_cut, Extraction, SizeConstraint, SOURCE_SUPER, TARGET_SUPER};
pub use flow_hypergraph::{FlowHypergraph, Role, Side};
pub use hfc::{run_hfc, Bipartition, HfcConfig, HfcOutcome, HfcProblem, HfcResult, HfcStats, Infeasible};
pub use hypergraph::{
    connectivity_metric, imbalance, imbalance_of, is_balanced, max_block_weight, BlockId, EdgeId, Hypergraph,
    HypergraphError, Partition, PartitionError, VertexId, Weight,
};
pub use initial::{greedy_initial_partition, rebalance, InitialPartitionError};
pub use isolated::{split_for_balance, IsolatedDp};
pub use piercing::PiercingQueue;
pub use refine::{refine_kway, refine_kway_observed, RefineConfig, RefineStats};
pub use io::{parse_hmetis, parse_partition, write_hmetis, write_partition, ParseError};
