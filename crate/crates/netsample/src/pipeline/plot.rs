//! Plot-ready aggregation of campaign records: group by an x key and a
//! series key (optionally split into one file per panel value), emitting
//! `(x, mean, stderr, series)` rows.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::metrics::MetricRecord;

use super::files::format_sig6;
use super::PipelineError;

/// Record fields usable as grouping keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKey {
    SampleFraction,
    Homophily,
    MinorityFraction,
    TopK,
    Method,
}

impl GroupKey {
    pub fn name(self) -> &'static str {
        match self {
            GroupKey::SampleFraction => "sample_fraction",
            GroupKey::Homophily => "h",
            GroupKey::MinorityFraction => "f",
            GroupKey::TopK => "k",
            GroupKey::Method => "method",
        }
    }

    pub fn parse(s: &str) -> Result<Self, PipelineError> {
        match s {
            "sample_fraction" => Ok(GroupKey::SampleFraction),
            "h" => Ok(GroupKey::Homophily),
            "f" => Ok(GroupKey::MinorityFraction),
            "k" => Ok(GroupKey::TopK),
            "method" => Ok(GroupKey::Method),
            other => Err(PipelineError::UnknownKey(other.to_string())),
        }
    }
}

/// Value a plot row is aggregated over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseKey {
    BiasTopk,
    LogNcgrMinority,
    LogNcgrMajority,
    /// `|log nCGR minority| + |log nCGR majority|`.
    AbsLogNcgrSum,
}

impl ResponseKey {
    pub fn name(self) -> &'static str {
        match self {
            ResponseKey::BiasTopk => "bias_topk",
            ResponseKey::LogNcgrMinority => "log_ncgr_min",
            ResponseKey::LogNcgrMajority => "log_ncgr_maj",
            ResponseKey::AbsLogNcgrSum => "abs_log_ncgr_sum",
        }
    }

    pub fn parse(s: &str) -> Result<Self, PipelineError> {
        match s {
            "bias_topk" => Ok(ResponseKey::BiasTopk),
            "log_ncgr_min" => Ok(ResponseKey::LogNcgrMinority),
            "log_ncgr_maj" => Ok(ResponseKey::LogNcgrMajority),
            "abs_log_ncgr_sum" => Ok(ResponseKey::AbsLogNcgrSum),
            other => Err(PipelineError::UnknownKey(other.to_string())),
        }
    }

    fn extract(self, r: &MetricRecord) -> f64 {
        match self {
            ResponseKey::BiasTopk => r.bias_topk,
            ResponseKey::LogNcgrMinority => r.log_ncgr_minority,
            ResponseKey::LogNcgrMajority => r.log_ncgr_majority,
            ResponseKey::AbsLogNcgrSum => r.log_ncgr_minority.abs() + r.log_ncgr_majority.abs(),
        }
    }
}

/// One figure family: x axis, series key, optional per-file panel key, and
/// the aggregated response.
#[derive(Debug, Clone, Copy)]
pub struct PlotSpec {
    pub x: GroupKey,
    pub series: GroupKey,
    pub panel: Option<GroupKey>,
    pub response: ResponseKey,
}

/// Orderable, exact grouping value (floats compared by bit pattern; the
/// grid values come from shared config constants so equal cells match).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum KeyValue {
    Float(u64),
    Int(usize),
    Name(&'static str),
}

impl KeyValue {
    fn of(record: &MetricRecord, key: GroupKey) -> KeyValue {
        match key {
            GroupKey::SampleFraction => KeyValue::Float(record.sample_fraction.to_bits()),
            GroupKey::Homophily => KeyValue::Float(record.h.to_bits()),
            GroupKey::MinorityFraction => KeyValue::Float(record.f.to_bits()),
            GroupKey::TopK => KeyValue::Int(record.k),
            GroupKey::Method => KeyValue::Name(record.method.name()),
        }
    }

    fn render(&self) -> String {
        match self {
            KeyValue::Float(bits) => format_sig6(f64::from_bits(*bits)),
            KeyValue::Int(v) => v.to_string(),
            KeyValue::Name(s) => (*s).to_string(),
        }
    }
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Aggregate `records` per `spec` and write one CSV per panel value (or a
/// single `<stem>.csv` when no panel key is set). Returns the written paths.
pub fn emit_plot_data(
    records: &[MetricRecord],
    spec: &PlotSpec,
    out_dir: &Path,
    stem: &str,
) -> Result<Vec<PathBuf>, PipelineError> {
    if records.is_empty() {
        return Err(PipelineError::EmptySelection(format!(
            "response {} by {}",
            spec.response.name(),
            spec.x.name()
        )));
    }

    // panel -> (series, x) -> responses
    let mut groups: BTreeMap<Option<KeyValue>, BTreeMap<(KeyValue, KeyValue), Vec<f64>>> =
        BTreeMap::new();
    for r in records {
        let panel = spec.panel.map(|p| KeyValue::of(r, p));
        let series = KeyValue::of(r, spec.series);
        let x = KeyValue::of(r, spec.x);
        groups
            .entry(panel)
            .or_default()
            .entry((series, x))
            .or_default()
            .push(spec.response.extract(r));
    }

    let mut written = Vec::new();
    for (panel, cells) in groups {
        let file_name = match (&panel, spec.panel) {
            (Some(value), Some(key)) => {
                format!("{stem}_{}-{}.csv", key.name(), value.render())
            }
            _ => format!("{stem}.csv"),
        };
        let path = out_dir.join(file_name);
        let mut w = csv::Writer::from_writer(
            std::fs::File::create(&path).map_err(|e| PipelineError::Io {
                path: path.display().to_string(),
                source: e,
            })?,
        );
        w.write_record([spec.x.name(), "mean", "stderr", spec.series.name()])?;
        for ((series, x), values) in cells {
            let (mean, stderr) = mean_and_stderr(&values);
            w.write_record([
                x.render(),
                format_sig6(mean),
                format_sig6(stderr),
                series.render(),
            ])?;
        }
        w.flush().map_err(|e| PipelineError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        written.push(path);
    }
    Ok(written)
}
