//! netsample measures how network sampling distorts degree-centrality
//! rankings and group visibility in social networks with a binary node
//! attribute.
//!
//! The library covers the full loop:
//!
//! * [`netgen`] grows synthetic networks by preferential attachment with a
//!   tunable homophily parameter and an exact minority fraction;
//! * [`samplers`] draws node, edge, random-walk, and snowball samples;
//! * [`metrics`] ranks nodes by degree centrality and scores samples with
//!   the group-aware top-k bias and log-nCGR measures;
//! * [`stats`] fits the per-method OLS models relating sampling error to
//!   homophily strength and group size difference;
//! * [`pipeline`] runs seeded Monte-Carlo campaigns, ingests empirical
//!   edge lists with node attributes, and emits records and plot CSVs.
//!
//! Everything is deterministic given a master seed, independent of worker
//! count. Start with the runnable examples (`cargo run -p netsample
//! --example minority_visibility`) or the `netsample` CLI for file-based
//! workflows.

pub mod graph;
pub mod metrics;
pub mod netgen;
pub mod pipeline;
pub mod samplers;
pub mod seeds;
pub mod stats;

pub use graph::{AttributedGraph, GraphError, Group, NodeId, Origin, Provenance, SampledGraph};
pub use metrics::{
    cgr, log_ncgr, log_ncgr_with_mode, relevance, top_k_bias, top_k_minority_fraction,
    MetricRecord, MetricsError, RankedList, RelevanceTable, SampleCgrMode, EPSILON,
};
pub use netgen::{
    ccdf_divergence, degree_ccdf, generate, generate_with_diagnostics, group_degree_distribution,
    Ccdf, GenDiagnostics, GenParams, NetgenError,
};
pub use pipeline::{ExperimentConfig, PipelineError};
pub use samplers::{
    edge_sample, node_sample, random_walk_sample, sample, snowball_sample, SampleMethod,
    SamplerError, SamplerParams, DEFAULT_TELEPORT,
};
pub use stats::{
    build_design_matrix, ols_fit, significance_stars, DesignMatrix, RegressionResult,
    ResponseKind, StatsError,
};
