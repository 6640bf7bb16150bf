//! Simulation and analysis of collective memory formation in temporal
//! conversation networks.
//!
//! The library covers five concerns:
//!
//! - [`net`]: temporal networks (a sequence of per-round matchings), the
//!   16-node/4-clique experiment topology with its two conversation
//!   schedules, and validation/text I/O.
//! - [`reach`]: the mnemonic-reachability score (a recency-weighted direct
//!   term plus practice-decayed walk products over consecutive rounds),
//!   with a brute-force oracle and per-clique aggregation.
//! - [`metrics`]: recall vectors, Jaccard similarity, network convergence,
//!   and the per-clique overlap/diversity indices.
//! - [`agentsim`]: an agent model that replays the four-phase lab procedure
//!   (study, pre-recall, four conversation rounds, post-recall) and a paired
//!   replication driver.
//! - [`graphalgo`] and [`calibrate`]: the contact-network pipeline (edge
//!   betweenness, quartile schedules, spectral clustering, centralities)
//!   and (λ, γ) grid-search calibration.
//!
//! ```
//! use mnemosim::{build_experiment_network, mnemonic_reachability, Condition, ModelParams};
//!
//! let (network, partition) = build_experiment_network(Condition::WeakTiesFirst);
//! let scores = mnemonic_reachability(&network, ModelParams::default());
//! let agg = mnemosim::aggregate_reachability(&scores, &partition).unwrap();
//! assert!(agg.within.unwrap() > agg.distant.unwrap());
//! ```

pub mod agentsim;
pub mod calibrate;
pub mod error;
pub mod graphalgo;
pub mod metrics;
pub mod net;
pub mod reach;
pub mod stats;

pub use agentsim::{
    individual_recall, init_agents, recall_probability, replicate, run_experiment,
    run_experiment_seeded, seed_row, simulate_conversation, AgentMemory, ConditionSummary,
    ReplicationTable, SeedRow, SimConfig, SimResult,
};
pub use calibrate::{
    grid_search, grid_search_with, matrix_correlation, matrix_correlation_with, model_target,
    target_from_sim, CalibrationGrid, CalibrationResult, ModelTransform, TargetMode,
};
pub use error::{Error, Result};
pub use stats::{mean, pearson, sample_sd, sign_test_greater};
pub use graphalgo::{
    centralities, edge_betweenness, quartile_schedule, random_block_graph, read_edge_list,
    spectral_clusters, spectral_clusters_with, Centralities, EdgeOrder, EdgeRanking, IngestStats,
    SplitRule, StaticGraph,
};
pub use metrics::{
    clique_level_similarity, convergence_increase, diversity_index, indices_by_round,
    mnemonic_convergence, mnemonic_similarity, overlap_index, similarity_matrix, CliqueSimilarity,
    ConversationRecord, RecallMatrix, RecallVector, RoundIndices,
};
pub use net::{
    build_experiment_network, experiment_matchings, experiment_partition, validate,
    CliquePartition, Condition, Diagnostic, RoundMatching, TemporalNetwork, ValidationMode,
    EXPERIMENT_N, EXPERIMENT_ROUNDS,
};
pub use reach::{
    aggregate_reachability, aggregate_reachability_noninteracting, influence_trajectory,
    mnemonic_reachability, mnemonic_reachability_with, reachability_bruteforce,
    reachability_bruteforce_with, GammaWeighting, ModelParams, ReachAggregates,
    ReachabilityMatrix,
};
