//! Experiment campaigns, file formats, empirical ingestion, and plot-data
//! emission. Everything the CLI does lives behind this module.

pub mod campaign;
pub mod config;
pub mod files;
pub mod ingest;
pub mod plot;

pub use campaign::{evaluate_empirical, run_synthetic_campaign, CampaignResult, EmpiricalParams, SkippedEntry};
pub use config::ExperimentConfig;
pub use files::{format_sig6, IdMap};
pub use ingest::{
    binarize_by_quantile, load_edge_list, AttributeKind, EdgeListData, IngestSpec, IngestSummary,
    IngestedGraph, UnlabeledRule,
};
pub use plot::{emit_plot_data, GroupKey, PlotSpec, ResponseKey};

use thiserror::Error;

use crate::graph::GraphError;
use crate::metrics::MetricsError;
use crate::netgen::NetgenError;
use crate::samplers::SamplerError;
use crate::stats::StatsError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Netgen(#[from] NetgenError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown grouping key {0:?}")]
    UnknownKey(String),
    #[error("no records match the requested grouping ({0})")]
    EmptySelection(String),
    #[error("graph has a single group; both groups must be present")]
    SingleGroup,
    #[error("attribute is degenerate: all {0} values are identical")]
    DegenerateAttribute(usize),
    #[error("quantile must lie in (0, 1), got {0}")]
    InvalidQuantile(f64),
    #[error("node {0} appears in the edge list but not in the labels file")]
    MissingLabel(u64),
}

impl PipelineError {
    fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        PipelineError::Io { path: path.display().to_string(), source }
    }
}

/// Process exit code classes: 1 input/parse, 2 infeasible parameters,
/// 3 internal invariant violation.
pub fn exit_code(err: &PipelineError) -> i32 {
    match err {
        PipelineError::Parse { .. }
        | PipelineError::Io { .. }
        | PipelineError::Json(_)
        | PipelineError::Csv(_)
        | PipelineError::UnknownKey(_)
        | PipelineError::EmptySelection(_)
        | PipelineError::MissingLabel(_)
        | PipelineError::SingleGroup
        | PipelineError::DegenerateAttribute(_) => 1,
        PipelineError::Config(_) | PipelineError::InvalidQuantile(_) => 2,
        PipelineError::Graph(e) => match e {
            GraphError::DegenerateGraph(_) | GraphError::NoEdges => 2,
            _ => 1,
        },
        PipelineError::Netgen(_) => 2,
        PipelineError::Sampler(e) => match e {
            SamplerError::UnknownMethod(_) => 1,
            _ => 2,
        },
        PipelineError::Stats(e) => match e {
            StatsError::NonFinite { .. } => 3,
            _ => 1,
        },
        PipelineError::Metrics(e) => match e {
            MetricsError::EmptyList | MetricsError::InvalidK => 1,
            MetricsError::LabelOutOfRange(_, _) | MetricsError::MissingRelevance(_) => 3,
        },
    }
}
