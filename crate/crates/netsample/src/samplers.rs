//! The four sampling strategies: node, edge, random-walk, and snowball.
//!
//! Each sampler maps `(graph, K, seed)` to a [`SampledGraph`] and is a pure
//! function of its inputs, so samples can be drawn in parallel. Node,
//! random-walk, and snowball samples keep every original edge between
//! sampled nodes; edge samples keep only the edges that were drawn.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{AttributedGraph, NodeId, Origin, Provenance, SampledGraph};

/// Per-step probability that the random walker jumps to a uniform random
/// node instead of following an edge.
pub const DEFAULT_TELEPORT: f64 = 0.15;

/// Cap on random-walk steps per requested node before giving up.
const WALK_STEP_FACTOR: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMethod {
    Node,
    Edge,
    #[serde(rename = "rw")]
    RandomWalk,
    Snowball,
}

impl SampleMethod {
    pub const ALL: [SampleMethod; 4] = [
        SampleMethod::Node,
        SampleMethod::Edge,
        SampleMethod::RandomWalk,
        SampleMethod::Snowball,
    ];

    pub fn origin(self) -> Origin {
        match self {
            SampleMethod::Node => Origin::NodeSample,
            SampleMethod::Edge => Origin::EdgeSample,
            SampleMethod::RandomWalk => Origin::RandomWalkSample,
            SampleMethod::Snowball => Origin::SnowballSample,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SampleMethod::Node => "node",
            SampleMethod::Edge => "edge",
            SampleMethod::RandomWalk => "rw",
            SampleMethod::Snowball => "snowball",
        }
    }
}

impl std::fmt::Display for SampleMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl std::str::FromStr for SampleMethod {
    type Err = SamplerError;

    fn from_str(s: &str) -> Result<Self, SamplerError> {
        match s {
            "node" => Ok(SampleMethod::Node),
            "edge" => Ok(SampleMethod::Edge),
            "rw" | "random_walk" | "randomwalk" => Ok(SampleMethod::RandomWalk),
            "snowball" => Ok(SampleMethod::Snowball),
            other => Err(SamplerError::UnknownMethod(other.to_string())),
        }
    }
}

/// Parameters for drawing one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerParams {
    pub method: SampleMethod,
    /// Target node count, `1 <= k <= N`.
    pub k: usize,
    /// Random-walk teleport probability in `[0, 1)`; ignored by the other
    /// methods.
    pub teleport: f64,
    pub seed: u64,
}

impl SamplerParams {
    pub fn new(method: SampleMethod, k: usize, seed: u64) -> Self {
        Self { method, k, teleport: DEFAULT_TELEPORT, seed }
    }
}

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("requested k = {k} nodes from a graph with n = {n}")]
    InvalidK { k: usize, n: usize },
    #[error("teleport probability must lie in [0, 1), got {0}")]
    InvalidTeleport(f64),
    #[error("edge sampling needs at least one edge")]
    NoEdges,
    #[error("edges exhausted after reaching {reached} of {requested} nodes")]
    EdgeCoverage { reached: usize, requested: usize },
    #[error("random walk did not reach {requested} nodes within {steps} steps (teleport = {teleport})")]
    NonTermination { requested: usize, steps: usize, teleport: f64 },
    #[error("unknown sampling method {0:?}")]
    UnknownMethod(String),
}

/// Draw a sample with the method chosen in `params`.
pub fn sample(graph: &AttributedGraph, params: &SamplerParams) -> Result<SampledGraph, SamplerError> {
    match params.method {
        SampleMethod::Node => node_sample(graph, params.k, params.seed),
        SampleMethod::Edge => edge_sample(graph, params.k, params.seed),
        SampleMethod::RandomWalk => random_walk_sample(graph, params.k, params.teleport, params.seed),
        SampleMethod::Snowball => snowball_sample(graph, params.k, params.seed),
    }
}

fn check_k(graph: &AttributedGraph, k: usize) -> Result<usize, SamplerError> {
    let n = graph.node_count();
    if k < 1 || k > n {
        return Err(SamplerError::InvalidK { k, n });
    }
    Ok(n)
}

fn induced_sample(
    graph: &AttributedGraph,
    nodes: Vec<NodeId>,
    method: SampleMethod,
    requested_k: usize,
    seed: u64,
) -> SampledGraph {
    let ind = graph
        .induced_subgraph(&nodes)
        .expect("sampler produced ids within the parent graph");
    let actual = ind.node_count();
    SampledGraph::new(
        ind.nodes().to_vec(),
        ind.edges().to_vec(),
        Provenance { method: method.origin(), requested_k, actual_nodes: actual, seed },
    )
}

/// Uniform subset of `k` nodes plus all edges between them.
pub fn node_sample(graph: &AttributedGraph, k: usize, seed: u64) -> Result<SampledGraph, SamplerError> {
    let n = check_k(graph, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes: Vec<NodeId> = index::sample(&mut rng, n, k)
        .into_iter()
        .map(|i| i as NodeId)
        .collect();
    Ok(induced_sample(graph, nodes, SampleMethod::Node, k, seed))
}

/// Draw edges uniformly without replacement until their endpoints cover at
/// least `k` distinct nodes; the sample keeps exactly the drawn edges. The
/// final edge may introduce two new nodes, so the sample can end up with
/// `k + 1` nodes.
pub fn edge_sample(graph: &AttributedGraph, k: usize, seed: u64) -> Result<SampledGraph, SamplerError> {
    check_k(graph, k)?;
    if graph.edge_count() == 0 {
        return Err(SamplerError::NoEdges);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<(NodeId, NodeId)> = graph.edges().collect();
    let mut seen = vec![false; graph.node_count()];
    let mut nodes: Vec<NodeId> = Vec::with_capacity(k + 1);
    let mut drawn: Vec<(NodeId, NodeId)> = Vec::new();

    for i in 0..pool.len() {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
        let (u, v) = pool[i];
        drawn.push((u, v));
        for w in [u, v] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                nodes.push(w);
            }
        }
        if nodes.len() >= k {
            let actual = nodes.len();
            return Ok(SampledGraph::new(
                nodes,
                drawn,
                Provenance {
                    method: Origin::EdgeSample,
                    requested_k: k,
                    actual_nodes: actual,
                    seed,
                },
            ));
        }
    }
    Err(SamplerError::EdgeCoverage { reached: nodes.len(), requested: k })
}

/// Random walk with teleportation: every visited node (including the start
/// and teleport landings) joins the sample until `k` distinct nodes are
/// collected; edges are the induced set.
pub fn random_walk_sample(
    graph: &AttributedGraph,
    k: usize,
    teleport: f64,
    seed: u64,
) -> Result<SampledGraph, SamplerError> {
    let n = check_k(graph, k)?;
    if !(0.0..1.0).contains(&teleport) {
        return Err(SamplerError::InvalidTeleport(teleport));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = vec![false; n];
    let mut nodes: Vec<NodeId> = Vec::with_capacity(k);
    let visit = |u: NodeId, seen: &mut Vec<bool>, nodes: &mut Vec<NodeId>| {
        if !seen[u as usize] {
            seen[u as usize] = true;
            nodes.push(u);
        }
    };

    let mut current: NodeId = rng.random_range(0..n) as NodeId;
    visit(current, &mut seen, &mut nodes);
    let cap = WALK_STEP_FACTOR.saturating_mul(k);
    let mut steps = 0usize;
    while nodes.len() < k {
        if steps >= cap {
            return Err(SamplerError::NonTermination { requested: k, steps: cap, teleport });
        }
        steps += 1;
        let degree = graph.degree(current);
        // A dead end always teleports; otherwise flip the teleport coin.
        let jump = degree == 0 || rng.random::<f64>() < teleport;
        current = if jump {
            rng.random_range(0..n) as NodeId
        } else {
            graph.neighbors(current)[rng.random_range(0..degree)]
        };
        visit(current, &mut seen, &mut nodes);
    }
    Ok(induced_sample(graph, nodes, SampleMethod::RandomWalk, k, seed))
}

/// Two-step snowball sampling: starting from a fresh random node, add it,
/// its neighbors, and its neighbors' neighbors in BFS discovery order
/// (neighbor lists in ascending id order), truncating the final wave at
/// exactly `k`; repeat with new start nodes until `k` is reached. Edges are
/// the induced set.
pub fn snowball_sample(graph: &AttributedGraph, k: usize, seed: u64) -> Result<SampledGraph, SamplerError> {
    let n = check_k(graph, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Start nodes drawn without replacement: walk a seeded permutation and
    // skip entries that earlier waves already swallowed.
    let mut starts: Vec<NodeId> = (0..n as NodeId).collect();
    use rand::seq::SliceRandom;
    starts.shuffle(&mut rng);

    let mut sampled = vec![false; n];
    let mut nodes: Vec<NodeId> = Vec::with_capacity(k);
    let add = |u: NodeId, sampled: &mut Vec<bool>, nodes: &mut Vec<NodeId>| -> bool {
        if !sampled[u as usize] {
            sampled[u as usize] = true;
            nodes.push(u);
        }
        nodes.len() >= k
    };

    'outer: for &start in &starts {
        if sampled[start as usize] {
            continue;
        }
        if add(start, &mut sampled, &mut nodes) {
            break 'outer;
        }
        let mut wave = Vec::new();
        for &v in graph.neighbors(start) {
            if !sampled[v as usize] {
                wave.push(v);
                if add(v, &mut sampled, &mut nodes) {
                    break 'outer;
                }
            }
        }
        for u in wave {
            for &v in graph.neighbors(u) {
                if !sampled[v as usize] && add(v, &mut sampled, &mut nodes) {
                    break 'outer;
                }
            }
        }
    }
    Ok(induced_sample(graph, nodes, SampleMethod::Snowball, k, seed))
}
