//! Empirical-network ingestion: edge lists plus per-node attributes, with
//! quantile binarization for numeric attributes.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::graph::{AttributedGraph, Group};

use super::files::IdMap;
use super::PipelineError;

/// Raw edge list after cleanup: canonical undirected pairs over external
/// ids, with drop counters.
#[derive(Debug, Clone)]
pub struct EdgeListData {
    /// Deduplicated `(min, max)` pairs, sorted.
    pub edges: Vec<(u64, u64)>,
    /// Distinct endpoint ids, ascending.
    pub nodes: Vec<u64>,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

/// Parse a whitespace-separated edge list; `#` lines are comments.
/// Self-loops and duplicate (undirected) edges are dropped and counted.
pub fn load_edge_list(path: &Path) -> Result<EdgeListData, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut edges: Vec<(u64, u64)> = Vec::new();
    let mut self_loops = 0usize;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse = |message: String| PipelineError::Parse {
            path: path.display().to_string(),
            line: i + 1,
            message,
        };
        let mut it = line.split_whitespace();
        let (a, b) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(parse(format!("expected two ids, got {line:?}"))),
        };
        let a: u64 = a.parse().map_err(|e| parse(format!("bad id {a:?}: {e}")))?;
        let b: u64 = b.parse().map_err(|e| parse(format!("bad id {b:?}: {e}")))?;
        if a == b {
            self_loops += 1;
            continue;
        }
        edges.push((a.min(b), a.max(b)));
    }
    let before = edges.len();
    edges.sort_unstable();
    edges.dedup();
    let duplicates = before - edges.len();

    let mut nodes: Vec<u64> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    nodes.sort_unstable();
    nodes.dedup();

    Ok(EdgeListData {
        edges,
        nodes,
        self_loops_dropped: self_loops,
        duplicates_dropped: duplicates,
    })
}

/// Parse a whitespace-separated `node_id value` attribute file.
/// Returns the values in file order; later entries for the same id win.
pub fn load_attributes(path: &Path) -> Result<HashMap<u64, f64>, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse = |message: String| PipelineError::Parse {
            path: path.display().to_string(),
            line: i + 1,
            message,
        };
        let mut it = line.split_whitespace();
        let (id, value) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(parse(format!("expected `id value`, got {line:?}"))),
        };
        let id: u64 = id.parse().map_err(|e| parse(format!("bad id {id:?}: {e}")))?;
        let value: f64 = value.parse().map_err(|e| parse(format!("bad value {value:?}: {e}")))?;
        if !value.is_finite() {
            return Err(parse(format!("non-finite value {value}")));
        }
        out.insert(id, value);
    }
    Ok(out)
}

/// Nearest-rank (type-1) empirical quantile threshold: values strictly
/// above it become the minority. Returns `(labels, threshold)`.
pub fn binarize_by_quantile(values: &[f64], q: f64) -> Result<(Vec<Group>, f64), PipelineError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(PipelineError::InvalidQuantile(q));
    }
    if values.is_empty() {
        return Err(PipelineError::DegenerateAttribute(0));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.first() == sorted.last() {
        return Err(PipelineError::DegenerateAttribute(values.len()));
    }
    let rank = (q * values.len() as f64).ceil() as usize;
    let threshold = sorted[rank.clamp(1, values.len()) - 1];
    let labels = values
        .iter()
        .map(|&v| if v > threshold { Group::Minority } else { Group::Majority })
        .collect();
    Ok((labels, threshold))
}

/// How the attribute file is interpreted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttributeKind {
    /// Values must be 0/1; 1 maps to minority.
    Binary,
    /// Numeric attribute binarized at this quantile of the labeled nodes'
    /// distribution.
    NumericQuantile(f64),
}

/// What to do with edge-list nodes missing from the attribute file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnlabeledRule {
    /// Drop them (and their edges) before graph construction.
    #[default]
    Drop,
    /// Treat missing attributes as an input error.
    Fail,
}

#[derive(Debug, Clone)]
pub struct IngestSpec {
    pub edge_path: PathBuf,
    pub attribute_path: PathBuf,
    pub kind: AttributeKind,
    pub unlabeled: UnlabeledRule,
}

/// Ingestion report, serialized as the CLI's summary JSON.
#[derive(Debug, Clone, Serialize)]
pub struct IngestSummary {
    pub nodes_in_edge_list: usize,
    pub self_loops_dropped: usize,
    pub duplicate_edges_dropped: usize,
    pub unlabeled_nodes_dropped: usize,
    pub nodes: usize,
    pub edges: usize,
    pub threshold: Option<f64>,
    pub minority_share: f64,
    pub same_group_edge_fraction: Option<f64>,
    /// Same-group share expected if edges formed independently of labels:
    /// `share^2 + (1 - share)^2`.
    pub random_mixing_baseline: f64,
}

#[derive(Debug, Clone)]
pub struct IngestedGraph {
    pub graph: AttributedGraph,
    pub ids: IdMap,
    pub summary: IngestSummary,
}

/// Load, label, and assemble an empirical graph.
///
/// The node set is the edge-list nodes that carry an attribute; edges with
/// an unlabeled endpoint are dropped under [`UnlabeledRule::Drop`]. For
/// numeric attributes the quantile is taken over the surviving nodes'
/// values.
pub fn ingest(spec: &IngestSpec) -> Result<IngestedGraph, PipelineError> {
    let edge_data = load_edge_list(&spec.edge_path)?;
    let attributes = load_attributes(&spec.attribute_path)?;

    let mut kept: Vec<u64> = Vec::with_capacity(edge_data.nodes.len());
    let mut dropped = 0usize;
    for &node in &edge_data.nodes {
        if attributes.contains_key(&node) {
            kept.push(node);
        } else if spec.unlabeled == UnlabeledRule::Fail {
            return Err(PipelineError::MissingLabel(node));
        } else {
            dropped += 1;
        }
    }

    let values: Vec<f64> = kept.iter().map(|id| attributes[id]).collect();
    let (labels, threshold) = match spec.kind {
        AttributeKind::Binary => {
            let mut labels = Vec::with_capacity(values.len());
            for (&id, &v) in kept.iter().zip(&values) {
                labels.push(match v {
                    x if x == 0.0 => Group::Majority,
                    x if x == 1.0 => Group::Minority,
                    other => {
                        return Err(PipelineError::Parse {
                            path: spec.attribute_path.display().to_string(),
                            line: 0,
                            message: format!("binary attribute for node {id} is {other}, not 0/1"),
                        })
                    }
                });
            }
            (labels, None)
        }
        AttributeKind::NumericQuantile(q) => {
            let (labels, t) = binarize_by_quantile(&values, q)?;
            (labels, Some(t))
        }
    };

    let ids = IdMap::from_sorted(kept);
    let mut edges = Vec::with_capacity(edge_data.edges.len());
    for &(a, b) in &edge_data.edges {
        if let (Some(u), Some(v)) = (ids.to_internal(a), ids.to_internal(b)) {
            edges.push((u, v));
        }
    }
    let graph = AttributedGraph::from_edges(labels, &edges)?;

    let minority_share = graph.minority_share();
    let summary = IngestSummary {
        nodes_in_edge_list: edge_data.nodes.len(),
        self_loops_dropped: edge_data.self_loops_dropped,
        duplicate_edges_dropped: edge_data.duplicates_dropped,
        unlabeled_nodes_dropped: dropped,
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        threshold,
        minority_share,
        same_group_edge_fraction: graph.same_group_edge_fraction().ok(),
        random_mixing_baseline: minority_share * minority_share
            + (1.0 - minority_share) * (1.0 - minority_share),
    };
    Ok(IngestedGraph { graph, ids, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn temp_file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn edge_list_basics() {
        let f = temp_file("0 1\n1 2\n");
        let data = load_edge_list(f.path()).unwrap();
        assert_eq!(data.nodes.len(), 3);
        assert_eq!(data.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(data.self_loops_dropped, 0);
        assert_eq!(data.duplicates_dropped, 0);
    }

    #[test]
    fn edge_list_drops_and_counts_self_loops() {
        let f = temp_file("0 1\n1 1\n");
        let data = load_edge_list(f.path()).unwrap();
        assert_eq!(data.edges, vec![(0, 1)]);
        assert_eq!(data.self_loops_dropped, 1);
    }

    #[test]
    fn edge_list_dedups_reversed_pairs() {
        let f = temp_file("0 1\n1 0\n");
        let data = load_edge_list(f.path()).unwrap();
        assert_eq!(data.edges, vec![(0, 1)]);
        assert_eq!(data.duplicates_dropped, 1);
    }

    #[test]
    fn edge_list_reports_malformed_line() {
        let f = temp_file("0 1\n# fine\nbroken line here\n");
        match load_edge_list(f.path()) {
            Err(PipelineError::Parse { line: 3, .. }) => {}
            other => panic!("expected parse error at line 3, got {other:?}"),
        }
    }

    #[test]
    fn quantile_binarization_on_one_to_ten() {
        let values: Vec<f64> = (1..=10).map(f64::from).collect();
        let (labels, threshold) = binarize_by_quantile(&values, 0.8).unwrap();
        assert_eq!(threshold, 8.0);
        let minority: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &g)| g == Group::Minority)
            .map(|(i, _)| i + 1)
            .collect();
        assert_eq!(minority, vec![9, 10]);
    }

    #[test]
    fn quantile_rejects_degenerate_attribute() {
        assert!(matches!(
            binarize_by_quantile(&[3.0, 3.0, 3.0], 0.8),
            Err(PipelineError::DegenerateAttribute(3))
        ));
        assert!(matches!(
            binarize_by_quantile(&[1.0, 2.0], 1.0),
            Err(PipelineError::InvalidQuantile(_))
        ));
    }

    #[test]
    fn ingest_numeric_drops_unlabeled_and_reports() {
        let edges = temp_file("0 1\n1 2\n2 3\n3 0\n0 9\n");
        // node 9 has no attribute; ages split 3 young / 1 old at q = 0.75
        let attrs = temp_file("0 20\n1 25\n2 30\n3 60\n");
        let spec = IngestSpec {
            edge_path: edges.path().to_path_buf(),
            attribute_path: attrs.path().to_path_buf(),
            kind: AttributeKind::NumericQuantile(0.75),
            unlabeled: UnlabeledRule::Drop,
        };
        let ing = ingest(&spec).unwrap();
        assert_eq!(ing.summary.unlabeled_nodes_dropped, 1);
        assert_eq!(ing.summary.nodes, 4);
        assert_eq!(ing.summary.edges, 4);
        assert_eq!(ing.summary.threshold, Some(30.0));
        assert_eq!(ing.graph.minority_count(), 1);
        assert_eq!(ing.ids.to_external(0), 0);

        let strict = IngestSpec { unlabeled: UnlabeledRule::Fail, ..spec };
        assert!(matches!(ingest(&strict), Err(PipelineError::MissingLabel(9))));
    }

    #[test]
    fn ingest_binary_passthrough() {
        let edges = temp_file("10 20\n20 30\n");
        let attrs = temp_file("10 1\n20 0\n30 1\n");
        let spec = IngestSpec {
            edge_path: edges.path().to_path_buf(),
            attribute_path: attrs.path().to_path_buf(),
            kind: AttributeKind::Binary,
            unlabeled: UnlabeledRule::Drop,
        };
        let ing = ingest(&spec).unwrap();
        assert_eq!(ing.graph.minority_count(), 2);
        assert_eq!(ing.summary.threshold, None);
        // fully cross-group edges
        assert_eq!(ing.summary.same_group_edge_fraction, Some(0.0));
    }
}
