//! Thin CLI over the netsample library: generate networks, draw samples,
//! score them, run campaigns, ingest empirical data, and fit the regression
//! models. Exit codes: 0 success, 1 input/parse error, 2 infeasible
//! parameters, 3 internal invariant violation.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use netsample::graph::Group;
use netsample::metrics::{log_ncgr, top_k_bias, RankedList, RelevanceTable, EPSILON};
use netsample::netgen::{generate, GenParams};
use netsample::pipeline::{
    campaign::{evaluate_empirical, run_synthetic_campaign, CampaignResult, EmpiricalParams},
    config::ExperimentConfig,
    exit_code, files,
    files::IdMap,
    ingest::{ingest, AttributeKind, IngestSpec, UnlabeledRule},
    plot::{emit_plot_data, GroupKey, PlotSpec, ResponseKey},
    PipelineError,
};
use netsample::samplers::{sample, SampleMethod, SamplerParams, DEFAULT_TELEPORT};
use netsample::stats::{
    build_design_matrix, ols_fit, significance_stars, ResponseKind, COLUMN_NAMES,
};

#[derive(Parser)]
#[command(
    name = "netsample",
    about = "Sampling bias in attributed networks: generation, sampling, and group-aware metrics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Node,
    Edge,
    Rw,
    Snowball,
}

impl From<MethodArg> for SampleMethod {
    fn from(m: MethodArg) -> SampleMethod {
        match m {
            MethodArg::Node => SampleMethod::Node,
            MethodArg::Edge => SampleMethod::Edge,
            MethodArg::Rw => SampleMethod::RandomWalk,
            MethodArg::Snowball => SampleMethod::Snowball,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ResponseArg {
    Bias,
    Ncgr,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Binary,
    Numeric,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic homophilic network as edge-list + labels files.
    Generate {
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        m: usize,
        #[arg(long = "minority-fraction", default_value_t = 0.2)]
        minority_fraction: f64,
        #[arg(long, default_value_t = 0.5)]
        homophily: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long = "out-edges")]
        out_edges: PathBuf,
        #[arg(long = "out-labels")]
        out_labels: PathBuf,
    },
    /// Draw one sample from a graph stored as edge-list + labels files.
    Sample {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Absolute node count to sample; exclusive with --fraction.
        #[arg(long, conflicts_with = "fraction")]
        k: Option<usize>,
        /// Node count as a fraction of the graph.
        #[arg(long)]
        fraction: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TELEPORT)]
        teleport: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long = "out-edges")]
        out_edges: PathBuf,
        #[arg(long = "out-labels")]
        out_labels: PathBuf,
    },
    /// Score a stored sample against its original network (JSON report).
    Evaluate {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long = "sample-edges")]
        sample_edges: PathBuf,
        #[arg(long = "sample-labels")]
        sample_labels: PathBuf,
        /// Top-k cutoffs, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "100")]
        k: Vec<usize>,
        #[arg(long = "tie-seed", default_value_t = 0)]
        tie_seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a synthetic campaign: records CSV, plot CSVs, skipped manifest.
    Campaign {
        /// JSON config; defaults apply for missing keys.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
        #[arg(long = "master-seed")]
        master_seed: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        networks: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        /// Rayon worker threads (0 = default).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Ingest an empirical edge list + attribute file into graph files.
    Ingest {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        attributes: PathBuf,
        /// binary: values are 0/1 labels; numeric: binarize at --quantile.
        #[arg(long, value_enum, default_value_t = KindArg::Numeric)]
        kind: KindArg,
        #[arg(long, default_value_t = 0.8)]
        quantile: f64,
        /// Fail instead of dropping nodes without attributes.
        #[arg(long)]
        strict: bool,
        #[arg(long = "out-edges")]
        out_edges: PathBuf,
        #[arg(long = "out-labels")]
        out_labels: PathBuf,
        /// Summary JSON path; stdout when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Evaluate samplers on an ingested empirical graph.
    EvalEmpirical {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.5")]
        fractions: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "20,50,100,200")]
        k: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long = "master-seed", default_value_t = 1)]
        master_seed: u64,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Fit the per-method OLS models on a records CSV.
    Regress {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, value_enum, default_value_t = ResponseArg::Both)]
        response: ResponseArg,
        /// Also write the table as CSV.
        #[arg(long = "out-csv")]
        out_csv: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Generate { n, m, minority_fraction, homophily, seed, out_edges, out_labels } => {
            cmd_generate(n, m, minority_fraction, homophily, seed, &out_edges, &out_labels)
        }
        Command::Sample {
            edges,
            labels,
            method,
            k,
            fraction,
            teleport,
            seed,
            out_edges,
            out_labels,
        } => cmd_sample(
            &edges,
            &labels,
            method.into(),
            k,
            fraction,
            teleport,
            seed,
            &out_edges,
            &out_labels,
        ),
        Command::Evaluate { edges, labels, sample_edges, sample_labels, k, tie_seed, out } => {
            cmd_evaluate(&edges, &labels, &sample_edges, &sample_labels, &k, tie_seed, out.as_deref())
        }
        Command::Campaign { config, out_dir, master_seed, n, networks, samples, threads } => {
            let mut cfg = match config {
                Some(path) => ExperimentConfig::from_json_file(&path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(seed) = master_seed {
                cfg.master_seed = seed;
            }
            if let Some(n) = n {
                cfg.n = n;
            }
            if let Some(networks) = networks {
                cfg.networks_per_cell = networks;
            }
            if let Some(samples) = samples {
                cfg.samples_per_network = samples;
            }
            cmd_campaign(&cfg, &out_dir, threads)
        }
        Command::Ingest {
            edges,
            attributes,
            kind,
            quantile,
            strict,
            out_edges,
            out_labels,
            summary,
        } => {
            let spec = IngestSpec {
                edge_path: edges,
                attribute_path: attributes,
                kind: match kind {
                    KindArg::Binary => AttributeKind::Binary,
                    KindArg::Numeric => AttributeKind::NumericQuantile(quantile),
                },
                unlabeled: if strict { UnlabeledRule::Fail } else { UnlabeledRule::Drop },
            };
            cmd_ingest(&spec, &out_edges, &out_labels, summary.as_deref())
        }
        Command::EvalEmpirical {
            edges,
            labels,
            fractions,
            k,
            samples,
            master_seed,
            out_dir,
            threads,
        } => cmd_eval_empirical(&edges, &labels, &fractions, &k, samples, master_seed, &out_dir, threads),
        Command::Regress { records, response, out_csv } => {
            cmd_regress(&records, response, out_csv.as_deref())
        }
    }
}

fn cmd_generate(
    n: usize,
    m: usize,
    minority_fraction: f64,
    homophily: f64,
    seed: u64,
    out_edges: &Path,
    out_labels: &Path,
) -> Result<(), PipelineError> {
    let params = GenParams { n, m, minority_fraction, homophily, seed };
    let graph = generate(&params)?;
    let ids = IdMap::identity(graph.node_count());
    files::write_graph(out_edges, out_labels, &graph, &ids)?;
    eprintln!(
        "generated n={} edges={} minority_share={} same_group_edge_fraction={}",
        graph.node_count(),
        graph.edge_count(),
        files::format_sig6(graph.minority_share()),
        files::format_sig6(graph.same_group_edge_fraction().unwrap_or(f64::NAN)),
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    edges: &Path,
    labels: &Path,
    method: SampleMethod,
    k: Option<usize>,
    fraction: Option<f64>,
    teleport: f64,
    seed: u64,
    out_edges: &Path,
    out_labels: &Path,
) -> Result<(), PipelineError> {
    let (graph, ids) = files::load_graph(edges, labels)?;
    let k = match (k, fraction) {
        (Some(k), _) => k,
        (None, Some(fr)) => ((fr * graph.node_count() as f64).round() as usize).max(1),
        (None, None) => {
            return Err(PipelineError::Config("one of --k or --fraction is required".into()))
        }
    };
    let params = SamplerParams { method, k, teleport, seed };
    let sampled = sample(&graph, &params)?;
    files::write_sample(out_edges, out_labels, &sampled, &graph, &ids)?;
    eprintln!(
        "sampled method={} requested_k={} actual_nodes={} edges={}",
        method,
        k,
        sampled.node_count(),
        sampled.edge_count()
    );
    Ok(())
}

fn cmd_evaluate(
    edges: &Path,
    labels: &Path,
    sample_edges: &Path,
    sample_labels: &Path,
    ks: &[usize],
    tie_seed: u64,
    out: Option<&Path>,
) -> Result<(), PipelineError> {
    let (graph, ids) = files::load_graph(edges, labels)?;
    let sampled_labels = files::read_labels(sample_labels)?;
    let sampled_edge_data = netsample::pipeline::ingest::load_edge_list(sample_edges)?;

    let mut nodes = Vec::with_capacity(sampled_labels.len());
    for &(ext, group) in &sampled_labels {
        let id = ids.to_internal(ext).ok_or(PipelineError::MissingLabel(ext))?;
        if graph.label(id) != group {
            return Err(PipelineError::Parse {
                path: sample_labels.display().to_string(),
                line: 0,
                message: format!("label of node {ext} disagrees with the original network"),
            });
        }
        nodes.push(id);
    }
    let mut edge_pairs = Vec::with_capacity(sampled_edge_data.edges.len());
    for &(a, b) in &sampled_edge_data.edges {
        let u = ids.to_internal(a).ok_or(PipelineError::MissingLabel(a))?;
        let v = ids.to_internal(b).ok_or(PipelineError::MissingLabel(b))?;
        edge_pairs.push((u, v));
    }
    let sampled = graph.partial_subgraph(&nodes, &edge_pairs)?;

    let original = RankedList::from_graph(&graph, tie_seed);
    let rel = RelevanceTable::from_ranking(&original);
    let sample_ranked = RankedList::from_sample(&sampled, tie_seed);
    let labels_slice = graph.labels();

    #[derive(serde::Serialize)]
    struct KReport {
        k: usize,
        bias_topk: f64,
        log_ncgr_minority: f64,
        log_ncgr_majority: f64,
    }
    #[derive(serde::Serialize)]
    struct Report {
        nodes: usize,
        sample_nodes: usize,
        sample_edges: usize,
        tie_seed: u64,
        per_k: Vec<KReport>,
    }

    let mut per_k = Vec::with_capacity(ks.len());
    for &k in ks {
        per_k.push(KReport {
            k,
            bias_topk: top_k_bias(&original, &sample_ranked, labels_slice, k)?,
            log_ncgr_minority: log_ncgr(
                &sample_ranked, &rel, &original, labels_slice, Group::Minority, k, EPSILON,
            )?,
            log_ncgr_majority: log_ncgr(
                &sample_ranked, &rel, &original, labels_slice, Group::Majority, k, EPSILON,
            )?,
        });
    }
    let report = Report {
        nodes: graph.node_count(),
        sample_nodes: sampled.node_count(),
        sample_edges: sampled.edge_count(),
        tie_seed,
        per_k,
    };
    let json = serde_json::to_string_pretty(&report)?;
    match out {
        Some(path) => std::fs::write(path, json + "\n").map_err(|e| PipelineError::Io {
            path: path.display().to_string(),
            source: e,
        })?,
        None => println!("{json}"),
    }
    Ok(())
}

fn with_thread_pool<T>(
    threads: usize,
    body: impl FnOnce() -> Result<T, PipelineError> + Send,
) -> Result<T, PipelineError>
where
    T: Send,
{
    if threads == 0 {
        return body();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| PipelineError::Config(format!("thread pool: {e}")))?;
    pool.install(body)
}

fn write_campaign_outputs(result: &CampaignResult, out_dir: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(out_dir).map_err(|e| PipelineError::Io {
        path: out_dir.display().to_string(),
        source: e,
    })?;
    files::write_records_csv(&out_dir.join("records.csv"), &result.records)?;
    files::write_skipped_csv(&out_dir.join("skipped.csv"), &result.skipped)?;
    for response in [ResponseKey::BiasTopk, ResponseKey::AbsLogNcgrSum] {
        let spec = PlotSpec {
            x: GroupKey::SampleFraction,
            series: GroupKey::Homophily,
            panel: Some(GroupKey::Method),
            response,
        };
        let stem = format!("plot_{}", response.name());
        emit_plot_data(&result.records, &spec, out_dir, &stem)?;
    }
    Ok(())
}

fn cmd_campaign(config: &ExperimentConfig, out_dir: &Path, threads: usize) -> Result<(), PipelineError> {
    let result = with_thread_pool(threads, || run_synthetic_campaign(config))?;
    write_campaign_outputs(&result, out_dir)?;
    eprintln!(
        "campaign: {} records, {} skipped -> {}",
        result.records.len(),
        result.skipped.len(),
        out_dir.display()
    );
    Ok(())
}

fn cmd_ingest(
    spec: &IngestSpec,
    out_edges: &Path,
    out_labels: &Path,
    summary_out: Option<&Path>,
) -> Result<(), PipelineError> {
    let ingested = ingest(spec)?;
    files::write_edge_list(out_edges, ingested.graph.edges(), &ingested.ids)?;
    files::write_labels(
        out_labels,
        0..ingested.graph.node_count() as netsample::graph::NodeId,
        &ingested.graph,
        &ingested.ids,
    )?;
    let json = serde_json::to_string_pretty(&ingested.summary)?;
    match summary_out {
        Some(path) => std::fs::write(path, json + "\n").map_err(|e| PipelineError::Io {
            path: path.display().to_string(),
            source: e,
        })?,
        None => println!("{json}"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval_empirical(
    edges: &Path,
    labels: &Path,
    fractions: &[f64],
    ks: &[usize],
    samples: usize,
    master_seed: u64,
    out_dir: &Path,
    threads: usize,
) -> Result<(), PipelineError> {
    let (graph, _) = files::load_graph(edges, labels)?;
    let params = EmpiricalParams {
        methods: SampleMethod::ALL.to_vec(),
        teleport: DEFAULT_TELEPORT,
        sample_fractions: fractions.to_vec(),
        k_values: ks.to_vec(),
        samples_per_setting: samples,
        master_seed,
    };
    let result = with_thread_pool(threads, || evaluate_empirical(&graph, &params))?;
    std::fs::create_dir_all(out_dir).map_err(|e| PipelineError::Io {
        path: out_dir.display().to_string(),
        source: e,
    })?;
    files::write_records_csv(&out_dir.join("records.csv"), &result.records)?;
    files::write_skipped_csv(&out_dir.join("skipped.csv"), &result.skipped)?;
    for response in [ResponseKey::BiasTopk, ResponseKey::AbsLogNcgrSum] {
        let spec = PlotSpec {
            x: GroupKey::TopK,
            series: GroupKey::SampleFraction,
            panel: Some(GroupKey::Method),
            response,
        };
        let stem = format!("plot_{}", response.name());
        emit_plot_data(&result.records, &spec, out_dir, &stem)?;
    }
    eprintln!(
        "empirical evaluation: {} records, {} skipped -> {}",
        result.records.len(),
        result.skipped.len(),
        out_dir.display()
    );
    Ok(())
}

fn cmd_regress(
    records_path: &Path,
    response: ResponseArg,
    out_csv: Option<&Path>,
) -> Result<(), PipelineError> {
    let records = files::read_records_csv(records_path)?;
    let kinds: &[ResponseKind] = match response {
        ResponseArg::Bias => &[ResponseKind::BiasTopk],
        ResponseArg::Ncgr => &[ResponseKind::AbsLogNcgrSum],
        ResponseArg::Both => &[ResponseKind::AbsLogNcgrSum, ResponseKind::BiasTopk],
    };

    let mut csv_rows: Vec<Vec<String>> = Vec::new();
    for method in SampleMethod::ALL {
        let subset: Vec<_> = records.iter().filter(|r| r.method == method).cloned().collect();
        if subset.is_empty() {
            continue;
        }
        for &kind in kinds {
            let design = build_design_matrix(&subset, kind)?;
            let fit = ols_fit(&design)?;
            println!("model: {} / {} (n = {})", method, kind.name(), fit.n_obs);
            println!("  {:<28} {:>12} {:>12} {:>10}", "term", "coef", "stderr", "t");
            for j in 0..COLUMN_NAMES.len() {
                println!(
                    "  {:<28} {:>12} {:>12} {:>10} {}",
                    COLUMN_NAMES[j],
                    files::format_sig6(fit.coefficients[j]),
                    files::format_sig6(fit.standard_errors[j]),
                    files::format_sig6(fit.t_stats[j]),
                    significance_stars(fit.t_stats[j]),
                );
                csv_rows.push(vec![
                    method.name().to_string(),
                    kind.name().to_string(),
                    COLUMN_NAMES[j].to_string(),
                    files::format_sig6(fit.coefficients[j]),
                    files::format_sig6(fit.standard_errors[j]),
                    files::format_sig6(fit.t_stats[j]),
                    significance_stars(fit.t_stats[j]).to_string(),
                ]);
            }
            println!("  R2 = {}", files::format_sig6(fit.r_squared));
            csv_rows.push(vec![
                method.name().to_string(),
                kind.name().to_string(),
                "r_squared".to_string(),
                files::format_sig6(fit.r_squared),
                String::new(),
                String::new(),
                String::new(),
            ]);
        }
    }

    if let Some(path) = out_csv {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["method", "response", "term", "coef", "stderr", "t", "stars"])?;
        for row in &csv_rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|e| PipelineError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
    }
    Ok(())
}
