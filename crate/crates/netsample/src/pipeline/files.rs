//! On-disk formats: edge lists, label files, and the records CSV.
//!
//! Edge lists are whitespace-separated id pairs, one per line, `#` starting
//! a comment line. Labels are a two-column `node_id,label` CSV. Records use
//! the fixed column set
//! `method,h,f,n,m,sample_fraction,k,network_seed,sample_seed,bias_topk,log_ncgr_min,log_ncgr_maj,actual_nodes`.
//! Floats are serialized with six significant digits so outputs are stable
//! enough for golden-file comparison.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use crate::graph::{AttributedGraph, Group, NodeId, SampledGraph};
use crate::metrics::MetricRecord;
use crate::samplers::SampleMethod;

use super::campaign::SkippedEntry;
use super::ingest::load_edge_list;
use super::PipelineError;

/// Mapping between external (file) node ids and dense internal ids.
#[derive(Debug, Clone)]
pub struct IdMap {
    internal_to_external: Vec<u64>,
    external_to_internal: HashMap<u64, NodeId>,
}

impl IdMap {
    /// Build from the ascending list of external ids.
    pub fn from_sorted(external: Vec<u64>) -> Self {
        let map = external
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as NodeId))
            .collect();
        Self { internal_to_external: external, external_to_internal: map }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_sorted((0..n as u64).collect())
    }

    pub fn len(&self) -> usize {
        self.internal_to_external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.internal_to_external.is_empty()
    }

    pub fn to_external(&self, id: NodeId) -> u64 {
        self.internal_to_external[id as usize]
    }

    pub fn to_internal(&self, external: u64) -> Option<NodeId> {
        self.external_to_internal.get(&external).copied()
    }
}

/// Six-significant-digit formatting with a deterministic shape.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        let s = format!("{x:.5e}");
        let (mantissa, exponent) = s.split_once('e').expect("{:e} always emits an exponent");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{exponent}")
    } else {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, PipelineError> {
    let file = std::fs::File::create(path).map_err(|e| PipelineError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(std::io::BufWriter::new(file))
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> PipelineError + '_ {
    move |e| PipelineError::Io { path: path.display().to_string(), source: e }
}

/// Write a graph's edge list under the id map.
pub fn write_edge_list(
    path: &Path,
    edges: impl Iterator<Item = (NodeId, NodeId)>,
    ids: &IdMap,
) -> Result<(), PipelineError> {
    let mut w = create(path)?;
    for (u, v) in edges {
        writeln!(w, "{} {}", ids.to_external(u), ids.to_external(v)).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Write `node_id,label` rows for the given nodes, ascending by id.
pub fn write_labels(
    path: &Path,
    nodes: impl Iterator<Item = NodeId>,
    graph: &AttributedGraph,
    ids: &IdMap,
) -> Result<(), PipelineError> {
    let mut w = create(path)?;
    writeln!(w, "node_id,label").map_err(io_err(path))?;
    for u in nodes {
        writeln!(w, "{},{}", ids.to_external(u), graph.label(u)).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Write a full graph as an edge-list/labels file pair.
pub fn write_graph(
    edges_path: &Path,
    labels_path: &Path,
    graph: &AttributedGraph,
    ids: &IdMap,
) -> Result<(), PipelineError> {
    write_edge_list(edges_path, graph.edges(), ids)?;
    write_labels(labels_path, 0..graph.node_count() as NodeId, graph, ids)
}

/// Write a sample as an edge-list/labels file pair (labels list exactly the
/// sampled nodes, so isolated sampled nodes survive the round trip).
pub fn write_sample(
    edges_path: &Path,
    labels_path: &Path,
    sample: &SampledGraph,
    parent: &AttributedGraph,
    ids: &IdMap,
) -> Result<(), PipelineError> {
    write_edge_list(edges_path, sample.edges().iter().copied(), ids)?;
    write_labels(labels_path, sample.nodes().iter().copied(), parent, ids)
}

/// Read a `node_id,label` CSV.
pub fn read_labels(path: &Path) -> Result<Vec<(u64, Group)>, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line == "node_id,label") {
            continue;
        }
        let parse = |message: String| PipelineError::Parse {
            path: path.display().to_string(),
            line: i + 1,
            message,
        };
        let (id_str, label_str) = line
            .split_once(',')
            .ok_or_else(|| parse("expected node_id,label".to_string()))?;
        let id: u64 = id_str
            .trim()
            .parse()
            .map_err(|e| parse(format!("bad node id {id_str:?}: {e}")))?;
        let label: Group = label_str
            .trim()
            .parse()
            .map_err(|_| parse(format!("bad label {label_str:?}")))?;
        out.push((id, label));
    }
    Ok(out)
}

/// Load an edge-list/labels pair into an [`AttributedGraph`]. The node set
/// is the label file's; every edge endpoint must be labeled.
pub fn load_graph(
    edges_path: &Path,
    labels_path: &Path,
) -> Result<(AttributedGraph, IdMap), PipelineError> {
    let edge_data = load_edge_list(edges_path)?;
    let labeled = read_labels(labels_path)?;

    let mut by_id: Vec<(u64, Group)> = labeled;
    by_id.sort_unstable_by_key(|&(id, _)| id);
    by_id.dedup_by_key(|&mut (id, _)| id);
    let ids = IdMap::from_sorted(by_id.iter().map(|&(id, _)| id).collect());
    let labels: Vec<Group> = by_id.iter().map(|&(_, g)| g).collect();

    let mut edges = Vec::with_capacity(edge_data.edges.len());
    for &(a, b) in &edge_data.edges {
        let u = ids.to_internal(a).ok_or(PipelineError::MissingLabel(a))?;
        let v = ids.to_internal(b).ok_or(PipelineError::MissingLabel(b))?;
        edges.push((u, v));
    }
    let graph = AttributedGraph::from_edges(labels, &edges)?;
    Ok((graph, ids))
}

const RECORD_HEADER: [&str; 13] = [
    "method",
    "h",
    "f",
    "n",
    "m",
    "sample_fraction",
    "k",
    "network_seed",
    "sample_seed",
    "bias_topk",
    "log_ncgr_min",
    "log_ncgr_maj",
    "actual_nodes",
];

/// Write campaign records with the fixed column set.
pub fn write_records_csv(path: &Path, records: &[MetricRecord]) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record([
            r.method.name().to_string(),
            format_sig6(r.h),
            format_sig6(r.f),
            r.n.to_string(),
            r.m.to_string(),
            format_sig6(r.sample_fraction),
            r.k.to_string(),
            r.network_seed.to_string(),
            r.sample_seed.to_string(),
            format_sig6(r.bias_topk),
            format_sig6(r.log_ncgr_minority),
            format_sig6(r.log_ncgr_majority),
            r.actual_nodes.to_string(),
        ])?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// Read a records CSV back; `k_used` is not serialized and is restored as
/// `k`.
pub fn read_records_csv(path: &Path) -> Result<Vec<MetricRecord>, PipelineError> {
    let mut reader = csv::Reader::from_path(path).map_err(PipelineError::Csv)?;
    let headers = reader.headers()?.clone();
    if headers.iter().ne(RECORD_HEADER) {
        return Err(PipelineError::Parse {
            path: path.display().to_string(),
            line: 1,
            message: format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>()),
        });
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let parse = |message: String| PipelineError::Parse {
            path: path.display().to_string(),
            line: i + 2,
            message,
        };
        let field = |j: usize| row.get(j).unwrap_or("").trim();
        let float = |j: usize| -> Result<f64, PipelineError> {
            field(j)
                .parse()
                .map_err(|e| parse(format!("bad float {:?} in {}: {e}", field(j), RECORD_HEADER[j])))
        };
        let int = |j: usize| -> Result<u64, PipelineError> {
            field(j)
                .parse()
                .map_err(|e| parse(format!("bad integer {:?} in {}: {e}", field(j), RECORD_HEADER[j])))
        };
        let method: SampleMethod = field(0)
            .parse()
            .map_err(|_| parse(format!("bad method {:?}", field(0))))?;
        let k = int(6)? as usize;
        out.push(MetricRecord {
            method,
            h: float(1)?,
            f: float(2)?,
            n: int(3)? as usize,
            m: int(4)? as usize,
            sample_fraction: float(5)?,
            k,
            k_used: k,
            network_seed: int(7)?,
            sample_seed: int(8)?,
            bias_topk: float(9)?,
            log_ncgr_minority: float(10)?,
            log_ncgr_majority: float(11)?,
            actual_nodes: int(12)? as usize,
        });
    }
    Ok(out)
}

/// Write the skipped-cells manifest (written even when empty so campaign
/// outputs always have the same shape).
pub fn write_skipped_csv(path: &Path, skipped: &[SkippedEntry]) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["h", "f", "method", "sample_fraction", "network_rep", "sample_rep", "reason"])?;
    for s in skipped {
        w.write_record([
            format_sig6(s.h),
            format_sig6(s.f),
            s.method.map(|m| m.name().to_string()).unwrap_or_else(|| "-".to_string()),
            s.sample_fraction.map(format_sig6).unwrap_or_else(|| "-".to_string()),
            s.network_rep.to_string(),
            s.sample_rep.map(|r| r.to_string()).unwrap_or_else(|| "-".to_string()),
            s.reason.clone(),
        ])?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::{node_sample, SampleMethod};

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(-0.0), "0");
        assert_eq!(format_sig6(0.25), "0.25");
        assert_eq!(format_sig6(1.0), "1");
        assert_eq!(format_sig6(0.123456789), "0.123457");
        assert_eq!(format_sig6(123.456789), "123.457");
        assert_eq!(format_sig6(-0.680001), "-0.680001");
        assert_eq!(format_sig6(0.0001), "0.0001");
        assert_eq!(format_sig6(1.0e-7), "1e-7");
        assert_eq!(format_sig6(1234567.0), "1.23457e6");
    }

    #[test]
    fn graph_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let edges = dir.path().join("g.edges");
        let labels = dir.path().join("g.labels");
        let g = AttributedGraph::from_edges(
            vec![Group::Minority, Group::Majority, Group::Majority, Group::Minority],
            &[(0, 1), (1, 2), (2, 3)],
        )
        .unwrap();
        let ids = IdMap::identity(4);
        write_graph(&edges, &labels, &g, &ids).unwrap();

        let (back, back_ids) = load_graph(&edges, &labels).unwrap();
        assert_eq!(back.node_count(), 4);
        assert_eq!(back.labels(), g.labels());
        assert!(back.edges().eq(g.edges()));
        assert_eq!(back_ids.to_external(3), 3);
    }

    #[test]
    fn sample_files_keep_isolated_nodes() {
        let g = AttributedGraph::from_edges(
            vec![Group::Minority, Group::Majority, Group::Majority, Group::Minority],
            &[(0, 1)],
        )
        .unwrap();
        let ids = IdMap::identity(4);
        let s = node_sample(&g, 4, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let ep = dir.path().join("s.edges");
        let lp = dir.path().join("s.labels");
        write_sample(&ep, &lp, &s, &g, &ids).unwrap();
        let (back, _) = load_graph(&ep, &lp).unwrap();
        assert_eq!(back.node_count(), 4, "isolated nodes must survive");
        assert_eq!(back.edge_count(), 1);
    }

    #[test]
    fn records_csv_round_trip() {
        let rec = MetricRecord {
            method: SampleMethod::RandomWalk,
            h: 0.25,
            f: 0.2,
            n: 1000,
            m: 10,
            sample_fraction: 0.1,
            k: 100,
            k_used: 100,
            network_seed: 11,
            sample_seed: 22,
            bias_topk: 0.12345678,
            log_ncgr_minority: -0.4,
            log_ncgr_majority: 0.025,
            actual_nodes: 100,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        write_records_csv(&path, &[rec.clone()]).unwrap();
        let back = read_records_csv(&path).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].method, SampleMethod::RandomWalk);
        assert_eq!(back[0].k, 100);
        assert!((back[0].bias_topk - 0.123457).abs() < 1e-9, "six significant digits");
    }

    #[test]
    fn load_graph_rejects_unlabeled_edge_endpoint() {
        let dir = tempfile::tempdir().unwrap();
        let ep = dir.path().join("g.edges");
        let lp = dir.path().join("g.labels");
        std::fs::write(&ep, "0 1\n1 2\n").unwrap();
        std::fs::write(&lp, "node_id,label\n0,minority\n1,majority\n").unwrap();
        assert!(matches!(load_graph(&ep, &lp), Err(PipelineError::MissingLabel(2))));
    }

    #[test]
    fn labels_parse_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let lp = dir.path().join("bad.labels");
        std::fs::write(&lp, "node_id,label\n0,minority\nnot-a-line\n").unwrap();
        match read_labels(&lp) {
            Err(PipelineError::Parse { line: 3, .. }) => {}
            other => panic!("expected parse error at line 3, got {other:?}"),
        }
    }
}
