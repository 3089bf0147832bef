//! Seeded Monte-Carlo campaigns over the (homophily, group mix) grid and the
//! matching evaluation loop for empirical graphs.
//!
//! Every network, sample, and tie-break seed is derived from the master seed
//! and the task's grid coordinates, and results are gathered and key-sorted
//! before they are returned, so output is byte-stable under any worker
//! count. The tie-break seed is shared between a network's own ranking and
//! the rankings of its samples: an identity sample then reproduces the
//! original ranking exactly and measures exactly zero bias.

use rayon::prelude::*;

use crate::graph::{AttributedGraph, Group};
use crate::metrics::{
    log_ncgr, top_k_bias, MetricRecord, RankedList, RelevanceTable, EPSILON,
};
use crate::netgen::{generate, GenParams, NetgenError};
use crate::samplers::{sample, SampleMethod, SamplerParams};
use crate::seeds::{child_seed, purpose};

use super::config::ExperimentConfig;
use super::PipelineError;

/// A cell/replicate the campaign could not run, with the reason.
#[derive(Debug, Clone)]
pub struct SkippedEntry {
    pub h: f64,
    pub f: f64,
    /// None when network generation itself was skipped.
    pub method: Option<SampleMethod>,
    pub sample_fraction: Option<f64>,
    pub network_rep: usize,
    pub sample_rep: Option<usize>,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct CampaignResult {
    pub records: Vec<MetricRecord>,
    pub skipped: Vec<SkippedEntry>,
}

type Keyed<T> = (Vec<usize>, T);

struct NetworkOutput {
    records: Vec<Keyed<MetricRecord>>,
    skipped: Vec<Keyed<SkippedEntry>>,
}

fn sample_size(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64).round() as usize).max(1)
}

/// Run the full synthetic campaign described by `config`.
pub fn run_synthetic_campaign(config: &ExperimentConfig) -> Result<CampaignResult, PipelineError> {
    config.validate()?;
    let cells: Vec<(usize, f64, f64)> = config
        .h_values
        .iter()
        .enumerate()
        .flat_map(|(hi, &h)| {
            config
                .f_values
                .iter()
                .enumerate()
                .map(move |(fi, &f)| (hi * 1000 + fi, h, f))
        })
        .collect();

    let tasks: Vec<(usize, f64, f64, usize)> = cells
        .iter()
        .flat_map(|&(cell, h, f)| {
            (0..config.networks_per_cell).map(move |rep| (cell, h, f, rep))
        })
        .collect();

    let outputs: Vec<NetworkOutput> = tasks
        .par_iter()
        .map(|&(cell, h, f, net_rep)| run_network(config, cell, h, f, net_rep))
        .collect::<Result<_, _>>()?;

    let mut records: Vec<Keyed<MetricRecord>> = Vec::new();
    let mut skipped: Vec<Keyed<SkippedEntry>> = Vec::new();
    for out in outputs {
        records.extend(out.records);
        skipped.extend(out.skipped);
    }
    records.sort_by(|a, b| a.0.cmp(&b.0));
    skipped.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(CampaignResult {
        records: records.into_iter().map(|(_, r)| r).collect(),
        skipped: skipped.into_iter().map(|(_, s)| s).collect(),
    })
}

fn run_network(
    config: &ExperimentConfig,
    cell: usize,
    h: f64,
    f: f64,
    net_rep: usize,
) -> Result<NetworkOutput, PipelineError> {
    let master = config.master_seed;
    let cell_u = cell as u64;
    let rep_u = net_rep as u64;
    let net_seed = child_seed(master, &[purpose::NETWORK, cell_u, rep_u]);
    let tie_seed = child_seed(master, &[purpose::TIE_BREAK, cell_u, rep_u]);

    let params = GenParams {
        n: config.n,
        m: config.m,
        minority_fraction: f,
        homophily: h,
        seed: net_seed,
    };
    let graph = match generate(&params) {
        Ok(g) => g,
        // Cells whose parameters the generator cannot honor are skipped and
        // recorded, not fatal.
        Err(e @ (NetgenError::MinorityTooSmall { .. } | NetgenError::InvalidSize { .. })) => {
            return Ok(NetworkOutput {
                records: Vec::new(),
                skipped: vec![(
                    vec![cell, net_rep, 0, 0, 0, 0],
                    SkippedEntry {
                        h,
                        f,
                        method: None,
                        sample_fraction: None,
                        network_rep: net_rep,
                        sample_rep: None,
                        reason: e.to_string(),
                    },
                )],
            });
        }
        Err(e) => return Err(e.into()),
    };

    let original = RankedList::from_graph(&graph, tie_seed);
    let relevance = RelevanceTable::from_ranking(&original);
    let mut out = NetworkOutput { records: Vec::new(), skipped: Vec::new() };

    for (mi, &method) in config.methods.iter().enumerate() {
        for (si, &fraction) in config.sample_fractions.iter().enumerate() {
            let k_nodes = sample_size(fraction, config.n);
            for samp_rep in 0..config.samples_per_network {
                let taken = measure_sample(
                    &graph,
                    &original,
                    &relevance,
                    MeasureCtx {
                        method,
                        teleport: config.teleport,
                        k_nodes,
                        fraction,
                        k_values: &config.k_values,
                        tie_seed,
                        net_seed,
                        sample_seed: child_seed(
                            master,
                            &[purpose::SAMPLE, cell_u, rep_u, mi as u64, si as u64, samp_rep as u64],
                        ),
                        h,
                        f,
                        m: config.m,
                    },
                )?;
                match taken {
                    Ok(recs) => {
                        for (ki, rec) in recs.into_iter().enumerate() {
                            out.records.push((vec![cell, net_rep, mi, si, samp_rep, ki], rec));
                        }
                    }
                    Err(reason) => out.skipped.push((
                        vec![cell, net_rep, mi, si, samp_rep, 0],
                        SkippedEntry {
                            h,
                            f,
                            method: Some(method),
                            sample_fraction: Some(fraction),
                            network_rep: net_rep,
                            sample_rep: Some(samp_rep),
                            reason,
                        },
                    )),
                }
            }
        }
    }
    Ok(out)
}

struct MeasureCtx<'a> {
    method: SampleMethod,
    teleport: f64,
    k_nodes: usize,
    fraction: f64,
    k_values: &'a [usize],
    tie_seed: u64,
    net_seed: u64,
    sample_seed: u64,
    h: f64,
    f: f64,
    m: usize,
}

/// Draw and score one sample; sampler failures come back as `Ok(Err(reason))`
/// so the caller can record them as skipped rather than aborting.
fn measure_sample(
    graph: &AttributedGraph,
    original: &RankedList,
    relevance: &RelevanceTable,
    ctx: MeasureCtx<'_>,
) -> Result<Result<Vec<MetricRecord>, String>, PipelineError> {
    if ctx.k_nodes > graph.node_count() {
        return Ok(Err(format!(
            "requested {} nodes from a graph of {}",
            ctx.k_nodes,
            graph.node_count()
        )));
    }
    let params = SamplerParams {
        method: ctx.method,
        k: ctx.k_nodes,
        teleport: ctx.teleport,
        seed: ctx.sample_seed,
    };
    let sampled = match sample(graph, &params) {
        Ok(s) => s,
        Err(e) => return Ok(Err(e.to_string())),
    };
    let sample_ranked = RankedList::from_sample(&sampled, ctx.tie_seed);
    let labels = graph.labels();

    let mut records = Vec::with_capacity(ctx.k_values.len());
    for &k in ctx.k_values {
        let bias = top_k_bias(original, &sample_ranked, labels, k)?;
        let lmin = log_ncgr(&sample_ranked, relevance, original, labels, Group::Minority, k, EPSILON)?;
        let lmaj = log_ncgr(&sample_ranked, relevance, original, labels, Group::Majority, k, EPSILON)?;
        records.push(MetricRecord {
            method: ctx.method,
            h: ctx.h,
            f: ctx.f,
            n: graph.node_count(),
            m: ctx.m,
            sample_fraction: ctx.fraction,
            k,
            k_used: k.min(sample_ranked.len()),
            network_seed: ctx.net_seed,
            sample_seed: ctx.sample_seed,
            bias_topk: bias,
            log_ncgr_minority: lmin,
            log_ncgr_majority: lmaj,
            actual_nodes: sampled.node_count(),
        });
    }
    Ok(Ok(records))
}

/// Sampler grid for one empirical graph.
#[derive(Debug, Clone)]
pub struct EmpiricalParams {
    pub methods: Vec<SampleMethod>,
    pub teleport: f64,
    pub sample_fractions: Vec<f64>,
    pub k_values: Vec<usize>,
    pub samples_per_setting: usize,
    pub master_seed: u64,
}

/// Run the campaign measurement loop over one ingested graph. Records carry
/// the measured same-group edge fraction in the `h` column and the measured
/// minority share in `f`; `m` is 0.
pub fn evaluate_empirical(
    graph: &AttributedGraph,
    params: &EmpiricalParams,
) -> Result<CampaignResult, PipelineError> {
    let minority = graph.minority_count();
    if minority == 0 || minority == graph.node_count() {
        return Err(PipelineError::SingleGroup);
    }
    let h_measured = graph.same_group_edge_fraction()?;
    let f_measured = graph.minority_share();

    let tie_seed = child_seed(params.master_seed, &[purpose::TIE_BREAK, 0, 0]);
    let original = RankedList::from_graph(graph, tie_seed);
    let relevance = RelevanceTable::from_ranking(&original);

    let tasks: Vec<(usize, usize, usize)> = (0..params.methods.len())
        .flat_map(|mi| {
            (0..params.sample_fractions.len()).flat_map(move |si| {
                (0..params.samples_per_setting).map(move |rep| (mi, si, rep))
            })
        })
        .collect();

    let outputs: Vec<(Vec<usize>, Result<Vec<MetricRecord>, String>, (usize, usize, usize))> = tasks
        .par_iter()
        .map(|&(mi, si, rep)| {
            let method = params.methods[mi];
            let fraction = params.sample_fractions[si];
            let ctx = MeasureCtx {
                method,
                teleport: params.teleport,
                k_nodes: sample_size(fraction, graph.node_count()),
                fraction,
                k_values: &params.k_values,
                tie_seed,
                net_seed: params.master_seed,
                sample_seed: child_seed(
                    params.master_seed,
                    &[purpose::SAMPLE, 0, 0, mi as u64, si as u64, rep as u64],
                ),
                h: h_measured,
                f: f_measured,
                m: 0,
            };
            measure_sample(graph, &original, &relevance, ctx)
                .map(|res| (vec![mi, si, rep], res, (mi, si, rep)))
        })
        .collect::<Result<_, _>>()?;

    let mut keyed_records: Vec<Keyed<MetricRecord>> = Vec::new();
    let mut keyed_skipped: Vec<Keyed<SkippedEntry>> = Vec::new();
    for (key, res, (mi, si, rep)) in outputs {
        match res {
            Ok(recs) => {
                for (ki, rec) in recs.into_iter().enumerate() {
                    let mut k = key.clone();
                    k.push(ki);
                    keyed_records.push((k, rec));
                }
            }
            Err(reason) => keyed_skipped.push((
                key,
                SkippedEntry {
                    h: h_measured,
                    f: f_measured,
                    method: Some(params.methods[mi]),
                    sample_fraction: Some(params.sample_fractions[si]),
                    network_rep: 0,
                    sample_rep: Some(rep),
                    reason,
                },
            )),
        }
    }
    keyed_records.sort_by(|a, b| a.0.cmp(&b.0));
    keyed_skipped.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(CampaignResult {
        records: keyed_records.into_iter().map(|(_, r)| r).collect(),
        skipped: keyed_skipped.into_iter().map(|(_, s)| s).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            n: 120,
            m: 2,
            h_values: vec![0.5],
            f_values: vec![0.2],
            methods: vec![SampleMethod::Node],
            sample_fractions: vec![1.0],
            k_values: vec![10, 50],
            networks_per_cell: 1,
            samples_per_network: 1,
            master_seed: 1,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn identity_sample_measures_exactly_zero() {
        let result = run_synthetic_campaign(&tiny_config()).unwrap();
        assert_eq!(result.records.len(), 2);
        assert!(result.skipped.is_empty());
        for rec in &result.records {
            assert_eq!(rec.bias_topk, 0.0);
            assert_eq!(rec.log_ncgr_minority, 0.0);
            assert_eq!(rec.log_ncgr_majority, 0.0);
            assert_eq!(rec.actual_nodes, 120);
        }
    }

    #[test]
    fn record_count_matches_grid() {
        let mut config = tiny_config();
        config.h_values = vec![0.25, 0.75];
        config.f_values = vec![0.2, 0.4];
        config.methods = vec![SampleMethod::Node, SampleMethod::RandomWalk];
        config.sample_fractions = vec![0.2, 0.5];
        config.networks_per_cell = 2;
        config.samples_per_network = 2;
        let result = run_synthetic_campaign(&config).unwrap();
        assert_eq!(result.records.len(), config.expected_records());
        assert!(result.skipped.is_empty());
    }

    #[test]
    fn campaign_is_invariant_to_worker_count() {
        let config = ExperimentConfig {
            n: 150,
            m: 2,
            h_values: vec![0.25, 0.75],
            f_values: vec![0.2],
            methods: vec![SampleMethod::Node, SampleMethod::Edge],
            sample_fractions: vec![0.3],
            k_values: vec![20],
            networks_per_cell: 2,
            samples_per_network: 2,
            master_seed: 99,
            ..ExperimentConfig::default()
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_synthetic_campaign(&config))
            .unwrap();
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_synthetic_campaign(&config))
            .unwrap();
        assert_eq!(single.records, many.records);
    }

    #[test]
    fn infeasible_cells_are_skipped_with_reasons() {
        let mut config = tiny_config();
        // round(0.04 * 120) = 5 < m... use m = 6 to force MinorityTooSmall
        config.m = 6;
        config.f_values = vec![0.04, 0.2];
        let result = run_synthetic_campaign(&config).unwrap();
        assert_eq!(result.skipped.len(), 1);
        assert!(result.skipped[0].reason.contains("seed set"));
        assert!(result.records.iter().all(|r| (r.f - 0.2).abs() < 1e-12));
    }

    #[test]
    fn empirical_evaluation_reports_measured_mixing() {
        // Perfect bipartite graph: measured same-group share is 0.
        let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
        for i in 0..10u32 {
            for j in 10..20u32 {
                if (i + j) % 3 == 0 {
                    edges.push((i, j));
                }
            }
        }
        let mut labels = vec![Group::Minority; 10];
        labels.extend(vec![Group::Majority; 10]);
        let graph = AttributedGraph::from_edges(labels, &edges).unwrap();
        let params = EmpiricalParams {
            methods: vec![SampleMethod::Node],
            teleport: 0.15,
            sample_fractions: vec![1.0],
            k_values: vec![5],
            samples_per_setting: 1,
            master_seed: 5,
        };
        let result = evaluate_empirical(&graph, &params).unwrap();
        assert_eq!(result.records.len(), 1);
        let rec = &result.records[0];
        assert_eq!(rec.h, 0.0, "h column carries measured same-group share");
        assert_eq!(rec.f, 0.5);
        assert_eq!(rec.bias_topk, 0.0, "identity sample");
    }

    #[test]
    fn empirical_rejects_single_group() {
        let graph = AttributedGraph::from_edges(vec![Group::Majority; 4], &[(0, 1), (2, 3)]).unwrap();
        let params = EmpiricalParams {
            methods: vec![SampleMethod::Node],
            teleport: 0.15,
            sample_fractions: vec![0.5],
            k_values: vec![2],
            samples_per_setting: 1,
            master_seed: 5,
        };
        assert!(matches!(evaluate_empirical(&graph, &params), Err(PipelineError::SingleGroup)));
    }
}
