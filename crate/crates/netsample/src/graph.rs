//! Immutable undirected simple graphs with a binary group label per node.
//!
//! [`AttributedGraph`] is the shared read-only structure everything else
//! operates on: adjacency is stored in CSR form (offset array plus a flat,
//! per-node-sorted neighbor array), so graphs are cheap to share across
//! threads and neighbor scans are cache friendly. [`SampledGraph`] is a
//! node/edge subset of a parent graph that remembers where it came from.

use std::fmt;

use thiserror::Error;

/// Node identifier. Graphs use dense ids `0..n`; ingestion keeps a separate
/// map back to external ids.
pub type NodeId = u32;

/// Binary group membership of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Minority,
    Majority,
}

impl Group {
    /// The other group.
    pub fn other(self) -> Group {
        match self {
            Group::Minority => Group::Majority,
            Group::Majority => Group::Minority,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Minority => write!(f, "minority"),
            Group::Majority => write!(f, "majority"),
        }
    }
}

impl std::str::FromStr for Group {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, GraphError> {
        match s {
            "minority" | "Minority" | "1" => Ok(Group::Minority),
            "majority" | "Majority" | "0" => Ok(Group::Majority),
            other => Err(GraphError::UnknownLabel(other.to_string())),
        }
    }
}

/// Errors raised by graph construction and the core graph operations.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph has {0} nodes; operation requires at least 2")]
    DegenerateGraph(usize),
    #[error("node id {0} is outside the graph (n = {1})")]
    UnknownNode(NodeId, usize),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("label array has length {0}, expected {1}")]
    LabelLengthMismatch(usize, usize),
    #[error("edge ({0}, {1}) is not an edge of the parent graph")]
    EdgeNotInParent(NodeId, NodeId),
    #[error("edge ({0}, {1}) has an endpoint outside the node set")]
    EndpointOutsideNodes(NodeId, NodeId),
    #[error("graph has no edges; fraction undefined")]
    NoEdges,
    #[error("unknown group label {0:?}")]
    UnknownLabel(String),
}

/// How a [`SampledGraph`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Direct induced-subgraph extraction.
    Induced,
    /// Direct partial-subgraph extraction (explicit edge subset).
    Partial,
    NodeSample,
    EdgeSample,
    RandomWalkSample,
    SnowballSample,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Origin::Induced => "induced",
            Origin::Partial => "partial",
            Origin::NodeSample => "node",
            Origin::EdgeSample => "edge",
            Origin::RandomWalkSample => "rw",
            Origin::SnowballSample => "snowball",
        };
        write!(f, "{s}")
    }
}

/// Record of how a sample was drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub method: Origin,
    /// The node count the caller asked for.
    pub requested_k: usize,
    /// The node count actually delivered (`requested_k` or, for edge
    /// sampling, `requested_k + 1`).
    pub actual_nodes: usize,
    pub seed: u64,
}

/// Immutable undirected simple graph with one binary attribute per node.
#[derive(Debug, Clone)]
pub struct AttributedGraph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    labels: Vec<Group>,
    edge_count: usize,
}

impl AttributedGraph {
    /// Build a graph from labels and an edge list.
    ///
    /// Edges may be given in either orientation; self-loops and duplicate
    /// edges are rejected (loaders that tolerate dirty input clean it up
    /// before calling this).
    pub fn from_edges(labels: Vec<Group>, edges: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        let n = labels.len();
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u as usize >= n {
                return Err(GraphError::UnknownNode(u, n));
            }
            if v as usize >= n {
                return Err(GraphError::UnknownNode(v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }

        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }

        let mut neighbors = vec![0 as NodeId; acc];
        let mut cursor = offsets[..n].to_vec();
        for &(u, v) in edges {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }

        for u in 0..n {
            let slice = &mut neighbors[offsets[u]..offsets[u + 1]];
            slice.sort_unstable();
            if let Some(w) = slice.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u as NodeId, w[0]));
            }
        }

        Ok(Self {
            offsets,
            neighbors,
            labels,
            edge_count: edges.len(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, u: NodeId) -> usize {
        let u = u as usize;
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Neighbors of `u` in ascending id order.
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        let u = u as usize;
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn label(&self, u: NodeId) -> Group {
        self.labels[u as usize]
    }

    pub fn labels(&self) -> &[Group] {
        &self.labels
    }

    pub fn minority_count(&self) -> usize {
        self.labels.iter().filter(|&&g| g == Group::Minority).count()
    }

    /// Fraction of nodes labeled minority.
    pub fn minority_share(&self) -> f64 {
        self.minority_count() as f64 / self.node_count() as f64
    }

    /// Iterate over edges as canonical `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count() as NodeId)
            .flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Degree centrality of every node: `degree / (n - 1)`.
    pub fn degree_centrality(&self) -> Result<Vec<f64>, GraphError> {
        let n = self.node_count();
        if n < 2 {
            return Err(GraphError::DegenerateGraph(n));
        }
        let denom = (n - 1) as f64;
        Ok((0..n as NodeId).map(|u| self.degree(u) as f64 / denom).collect())
    }

    /// Fraction of edges connecting two nodes of the same group.
    pub fn same_group_edge_fraction(&self) -> Result<f64, GraphError> {
        if self.edge_count == 0 {
            return Err(GraphError::NoEdges);
        }
        let same = self
            .edges()
            .filter(|&(u, v)| self.label(u) == self.label(v))
            .count();
        Ok(same as f64 / self.edge_count as f64)
    }

    /// Subgraph on `nodes` containing every original edge between them.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Result<SampledGraph, GraphError> {
        let mut nodes = nodes.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        let n = self.node_count();
        if let Some(&bad) = nodes.iter().find(|&&u| u as usize >= n) {
            return Err(GraphError::UnknownNode(bad, n));
        }

        let mut member = vec![false; n];
        for &u in &nodes {
            member[u as usize] = true;
        }
        let mut edges = Vec::new();
        for &u in &nodes {
            for &v in self.neighbors(u) {
                if u < v && member[v as usize] {
                    edges.push((u, v));
                }
            }
        }

        let actual = nodes.len();
        Ok(SampledGraph {
            nodes,
            edges,
            provenance: Provenance {
                method: Origin::Induced,
                requested_k: actual,
                actual_nodes: actual,
                seed: 0,
            },
        })
    }

    /// Subgraph retaining exactly the given edges over exactly the given
    /// nodes; nodes with no retained edge stay as isolated members.
    pub fn partial_subgraph(
        &self,
        nodes: &[NodeId],
        edges: &[(NodeId, NodeId)],
    ) -> Result<SampledGraph, GraphError> {
        let mut nodes = nodes.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        let n = self.node_count();
        if let Some(&bad) = nodes.iter().find(|&&u| u as usize >= n) {
            return Err(GraphError::UnknownNode(bad, n));
        }
        let mut member = vec![false; n];
        for &u in &nodes {
            member[u as usize] = true;
        }

        let mut canonical = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            let (a, b) = if u <= v { (u, v) } else { (v, u) };
            if a as usize >= n || b as usize >= n || !self.has_edge(a, b) {
                return Err(GraphError::EdgeNotInParent(a, b));
            }
            if !member[a as usize] || !member[b as usize] {
                return Err(GraphError::EndpointOutsideNodes(a, b));
            }
            canonical.push((a, b));
        }
        canonical.sort_unstable();
        canonical.dedup();

        let actual = nodes.len();
        Ok(SampledGraph {
            nodes,
            edges: canonical,
            provenance: Provenance {
                method: Origin::Partial,
                requested_k: actual,
                actual_nodes: actual,
                seed: 0,
            },
        })
    }
}

/// A node/edge subset of a parent [`AttributedGraph`].
///
/// Node ids refer to the parent graph. For node, random-walk, and snowball
/// samples the edge set is the full induced set; for edge samples it is the
/// drawn edges only, which is what makes edge sampling distinctive.
#[derive(Debug, Clone)]
pub struct SampledGraph {
    nodes: Vec<NodeId>,
    edges: Vec<(NodeId, NodeId)>,
    provenance: Provenance,
}

impl SampledGraph {
    pub(crate) fn new(
        mut nodes: Vec<NodeId>,
        mut edges: Vec<(NodeId, NodeId)>,
        provenance: Provenance,
    ) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        edges.sort_unstable();
        Self { nodes, edges, provenance }
    }

    /// Sampled node ids, ascending (parent ids).
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Retained edges as canonical `(u, v)` pairs, `u < v`, sorted.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn contains(&self, u: NodeId) -> bool {
        self.nodes.binary_search(&u).is_ok()
    }

    /// Degree of every sampled node *within the sample*, as
    /// `(parent id, degree)` pairs in ascending id order.
    pub fn degrees(&self) -> Vec<(NodeId, usize)> {
        let mut idx = std::collections::HashMap::with_capacity(self.nodes.len());
        for (i, &u) in self.nodes.iter().enumerate() {
            idx.insert(u, i);
        }
        let mut deg = vec![0usize; self.nodes.len()];
        for &(u, v) in &self.edges {
            deg[idx[&u]] += 1;
            deg[idx[&v]] += 1;
        }
        self.nodes.iter().copied().zip(deg).collect()
    }
}
