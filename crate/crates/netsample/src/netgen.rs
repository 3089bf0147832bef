//! Synthetic attributed networks grown by homophily-modulated preferential
//! attachment.
//!
//! New nodes attach to existing node `j` with probability proportional to
//! `h_eff * (degree(j) + 1)`, where `h_eff` is the homophily parameter `h`
//! for same-group pairs and `1 - h` for cross-group pairs. `h = 0.5` makes
//! attachment label-blind, `h = 1` pure homophily, `h = 0` pure heterophily.
//!
//! The growth starts from `2m` isolated seed nodes, `m` per group. Seeding
//! both groups with `m` nodes guarantees every incoming node finds `m`
//! distinct positive-weight targets even at `h = 0` and `h = 1`, so the
//! extreme settings produce exactly pure (fraction 1.0) and exactly
//! bipartite (fraction 0.0) mixtures with no forced edges.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{AttributedGraph, Group, NodeId};

/// Parameters of the growth model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    /// Total node count.
    pub n: usize,
    /// Edges added per incoming node.
    pub m: usize,
    /// Minority fraction, in `(0, 0.5]`.
    pub minority_fraction: f64,
    /// Homophily parameter, in `[0, 1]`.
    pub homophily: f64,
    pub seed: u64,
}

impl GenParams {
    /// Number of minority nodes: `round(f * n)`, capped at `n / 2` so the
    /// minority never outnumbers the majority.
    pub fn minority_count(&self) -> usize {
        let rounded = (self.minority_fraction * self.n as f64).round() as usize;
        rounded.min(self.n / 2)
    }

    fn validate(&self) -> Result<(), NetgenError> {
        if !(0.0..=1.0).contains(&self.homophily) {
            return Err(NetgenError::InvalidHomophily(self.homophily));
        }
        if !(self.minority_fraction > 0.0 && self.minority_fraction <= 0.5) {
            return Err(NetgenError::InvalidMinorityFraction(self.minority_fraction));
        }
        if self.m < 1 || self.n <= 2 * self.m {
            return Err(NetgenError::InvalidSize { n: self.n, m: self.m });
        }
        if self.minority_count() < self.m {
            return Err(NetgenError::MinorityTooSmall {
                minority: self.minority_count(),
                m: self.m,
            });
        }
        Ok(())
    }
}

/// Per-run bookkeeping of the growth process.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GenDiagnostics {
    /// Edges placed by the uniform fallback because every attachment weight
    /// was zero. Stays 0 for every valid parameter set; audited by tests.
    pub forced_edges: usize,
}

#[derive(Debug, Error)]
pub enum NetgenError {
    #[error("homophily must lie in [0, 1], got {0}")]
    InvalidHomophily(f64),
    #[error("minority fraction must lie in (0, 0.5], got {0}")]
    InvalidMinorityFraction(f64),
    #[error("need n > 2m and m >= 1, got n = {n}, m = {m}")]
    InvalidSize { n: usize, m: usize },
    #[error("minority count {minority} is smaller than m = {m}; the seed set cannot cover both groups")]
    MinorityTooSmall { minority: usize, m: usize },
    #[error("group {0} has no nodes")]
    EmptyGroup(Group),
}

/// Fenwick tree over per-node attachment weights (`degree + 1`), one per
/// group, so a weighted pick is O(log n).
struct WeightIndex {
    len: usize,
    mask: usize,
    tree: Vec<u64>,
}

impl WeightIndex {
    fn new(len: usize) -> Self {
        let mut mask = 1usize;
        while mask * 2 <= len {
            mask *= 2;
        }
        Self { len, mask, tree: vec![0; len + 1] }
    }

    fn add(&mut self, idx: usize, delta: u64) {
        let mut i = idx + 1;
        while i <= self.len {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    fn sub(&mut self, idx: usize, delta: u64) {
        let mut i = idx + 1;
        while i <= self.len {
            self.tree[i] -= delta;
            i += i & i.wrapping_neg();
        }
    }

    fn total(&self) -> u64 {
        let mut i = self.len;
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        sum
    }

    /// Index of the element containing position `target` in the cumulative
    /// weight, i.e. the smallest `i` with `prefix(i) > target`.
    fn find(&self, target: u64) -> usize {
        debug_assert!(target < self.total());
        let mut pos = 0usize;
        let mut rem = target;
        let mut step = self.mask;
        while step > 0 {
            let next = pos + step;
            if next <= self.len && self.tree[next] <= rem {
                rem -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos
    }
}

/// Grow a network from `params`, discarding diagnostics.
pub fn generate(params: &GenParams) -> Result<AttributedGraph, NetgenError> {
    generate_with_diagnostics(params).map(|(g, _)| g)
}

/// Grow a network from `params`. Deterministic: identical params (including
/// the seed) produce a bit-identical edge list.
pub fn generate_with_diagnostics(
    params: &GenParams,
) -> Result<(AttributedGraph, GenDiagnostics), NetgenError> {
    params.validate()?;
    let n = params.n;
    let m = params.m;
    let m0 = 2 * m;
    let h = params.homophily;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    // Seed nodes 0..2m carry m labels of each group; the remaining labels
    // are a shuffled fixed-count multiset so the minority count is exact.
    let minority_total = params.minority_count();
    let mut labels = Vec::with_capacity(n);
    labels.extend(std::iter::repeat_n(Group::Minority, m));
    labels.extend(std::iter::repeat_n(Group::Majority, m));
    let mut rest = Vec::with_capacity(n - m0);
    rest.extend(std::iter::repeat_n(Group::Minority, minority_total - m));
    rest.extend(std::iter::repeat_n(Group::Majority, n - m0 - (minority_total - m)));
    rest.shuffle(&mut rng);
    labels.extend(rest);

    let mut weights = [WeightIndex::new(n), WeightIndex::new(n)];
    let group_idx = |g: Group| match g {
        Group::Minority => 0usize,
        Group::Majority => 1usize,
    };
    for seed_node in 0..m0 {
        weights[group_idx(labels[seed_node])].add(seed_node, 1);
    }

    let mut degrees = vec![0usize; n];
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity((n - m0) * m);
    let mut diagnostics = GenDiagnostics::default();
    let mut picks: Vec<(usize, u64)> = Vec::with_capacity(m);

    for source in m0..n {
        let own = group_idx(labels[source]);
        let other = 1 - own;
        let h_same = h;
        let h_cross = 1.0 - h;
        picks.clear();

        for _ in 0..m {
            let s_same = weights[own].total();
            let s_cross = weights[other].total();
            let w_same = h_same * s_same as f64;
            let w_cross = h_cross * s_cross as f64;
            let total = w_same + w_cross;

            let target = if total > 0.0 {
                let x: f64 = rng.random_range(0.0..total);
                let (tree, pool) = if x < w_same {
                    (&weights[own], s_same)
                } else {
                    (&weights[other], s_cross)
                };
                tree.find(rng.random_range(0..pool))
            } else {
                fallback_target(source, &labels, &picks, h, &mut rng, &mut diagnostics)
            };

            let removed = (degrees[target] + 1) as u64;
            weights[group_idx(labels[target])].sub(target, removed);
            picks.push((target, removed));
        }

        for &(target, removed) in &picks {
            weights[group_idx(labels[target])].add(target, removed + 1);
            degrees[target] += 1;
            edges.push((target as NodeId, source as NodeId));
        }
        degrees[source] = m;
        weights[own].add(source, (m + 1) as u64);
    }

    let graph = AttributedGraph::from_edges(labels, &edges)
        .expect("generated edge list is simple by construction");
    Ok((graph, diagnostics))
}

/// Uniform fallback when every attachment weight is zero: prefer candidates
/// whose pairing weight `h_eff` is positive, then any unpicked existing node.
/// Unreachable for valid params because the seed set covers both groups with
/// `m` nodes each; kept so the growth loop can never stall.
fn fallback_target(
    source: usize,
    labels: &[Group],
    picks: &[(usize, u64)],
    h: f64,
    rng: &mut ChaCha8Rng,
    diagnostics: &mut GenDiagnostics,
) -> usize {
    let picked = |j: usize| picks.iter().any(|&(t, _)| t == j);
    let compatible: Vec<usize> = (0..source)
        .filter(|&j| !picked(j))
        .filter(|&j| {
            let h_eff = if labels[j] == labels[source] { h } else { 1.0 - h };
            h_eff > 0.0
        })
        .collect();
    if !compatible.is_empty() {
        return compatible[rng.random_range(0..compatible.len())];
    }
    let any: Vec<usize> = (0..source).filter(|&j| !picked(j)).collect();
    diagnostics.forced_edges += 1;
    any[rng.random_range(0..any.len())]
}

/// Complementary cumulative degree distribution of one group: ascending
/// `(degree, fraction of the group with degree >= that)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct Ccdf {
    points: Vec<(usize, f64)>,
}

impl Ccdf {
    fn from_degrees(mut degrees: Vec<usize>) -> Self {
        let total = degrees.len() as f64;
        degrees.sort_unstable();
        let mut points = Vec::new();
        let mut i = 0;
        while i < degrees.len() {
            let d = degrees[i];
            // everything at index >= i has degree >= d
            points.push((d, (degrees.len() - i) as f64 / total));
            while i < degrees.len() && degrees[i] == d {
                i += 1;
            }
        }
        Self { points }
    }

    pub fn points(&self) -> &[(usize, f64)] {
        &self.points
    }

    /// Fraction of the group with degree >= `d`.
    pub fn eval(&self, d: usize) -> f64 {
        match self.points.partition_point(|&(deg, _)| deg < d) {
            i if i == self.points.len() => 0.0,
            i => self.points[i].1,
        }
    }
}

/// CCDF of the given group's degrees.
pub fn degree_ccdf(graph: &AttributedGraph, group: Group) -> Result<Ccdf, NetgenError> {
    let degrees: Vec<usize> = (0..graph.node_count() as NodeId)
        .filter(|&u| graph.label(u) == group)
        .map(|u| graph.degree(u))
        .collect();
    if degrees.is_empty() {
        return Err(NetgenError::EmptyGroup(group));
    }
    Ok(Ccdf::from_degrees(degrees))
}

/// Degree CCDFs of (minority, majority); errors if either group is empty.
pub fn group_degree_distribution(graph: &AttributedGraph) -> Result<(Ccdf, Ccdf), NetgenError> {
    Ok((
        degree_ccdf(graph, Group::Minority)?,
        degree_ccdf(graph, Group::Majority)?,
    ))
}

/// Maximum pointwise gap between two CCDFs (a two-sample KS statistic over
/// degrees).
pub fn ccdf_divergence(a: &Ccdf, b: &Ccdf) -> f64 {
    a.points
        .iter()
        .chain(b.points.iter())
        .map(|&(d, _)| (a.eval(d) - b.eval(d)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, m: usize, f: f64, h: f64, seed: u64) -> GenParams {
        GenParams { n, m, minority_fraction: f, homophily: h, seed }
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(generate(&params(100, 2, 0.2, 1.5, 0)).is_err());
        assert!(generate(&params(100, 2, 0.0, 0.5, 0)).is_err());
        assert!(generate(&params(100, 2, 0.7, 0.5, 0)).is_err());
        assert!(generate(&params(4, 2, 0.5, 0.5, 0)).is_err());
        // round(0.1 * 50) = 5 < m = 8: seed set cannot cover the minority
        assert!(matches!(
            generate(&params(50, 8, 0.1, 0.5, 0)),
            Err(NetgenError::MinorityTooSmall { .. })
        ));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let p = params(400, 3, 0.2, 0.3, 99);
        let a = generate(&p).unwrap();
        let b = generate(&p).unwrap();
        assert_eq!(a.labels(), b.labels());
        assert!(a.edges().eq(b.edges()));
        let c = generate(&params(400, 3, 0.2, 0.3, 100)).unwrap();
        assert!(!a.edges().eq(c.edges()));
    }

    #[test]
    fn structural_invariants() {
        let p = params(500, 4, 0.25, 0.6, 7);
        let g = generate(&p).unwrap();
        assert_eq!(g.node_count(), 500);
        assert_eq!(g.edge_count(), (500 - 8) * 4);
        assert_eq!(g.minority_count(), p.minority_count());
        for u in (2 * p.m)..p.n {
            assert!(g.degree(u as NodeId) >= p.m, "non-seed node {u} has degree < m");
        }
    }

    #[test]
    fn pure_homophily_yields_only_same_group_edges() {
        for seed in 0..5 {
            let (g, diag) =
                generate_with_diagnostics(&params(1000, 2, 0.2, 1.0, seed)).unwrap();
            assert_eq!(g.same_group_edge_fraction().unwrap(), 1.0);
            assert_eq!(diag.forced_edges, 0);
        }
    }

    #[test]
    fn pure_heterophily_yields_bipartite_graph() {
        for seed in 0..5 {
            let (g, diag) =
                generate_with_diagnostics(&params(1000, 2, 0.2, 0.0, seed)).unwrap();
            assert_eq!(g.same_group_edge_fraction().unwrap(), 0.0);
            assert_eq!(diag.forced_edges, 0);
        }
    }

    #[test]
    fn neutral_homophily_tracks_group_sizes() {
        // Label-blind attachment: same-group share ~ f^2 + (1-f)^2 = 0.68.
        let mut acc = 0.0;
        let seeds = 10;
        for seed in 0..seeds {
            let g = generate(&params(2000, 5, 0.2, 0.5, seed)).unwrap();
            acc += g.same_group_edge_fraction().unwrap();
        }
        let mean = acc / seeds as f64;
        assert!((mean - 0.68).abs() < 0.03, "mean same-group share {mean}");
    }

    #[test]
    fn ccdf_single_degree_is_step_function() {
        // K3, one group: every node has degree 2.
        let g = AttributedGraph::from_edges(
            vec![Group::Majority; 3],
            &[(0, 1), (0, 2), (1, 2)],
        )
        .unwrap();
        let ccdf = degree_ccdf(&g, Group::Majority).unwrap();
        assert_eq!(ccdf.points(), &[(2, 1.0)]);
        assert_eq!(ccdf.eval(1), 1.0);
        assert_eq!(ccdf.eval(2), 1.0);
        assert_eq!(ccdf.eval(3), 0.0);
    }

    #[test]
    fn ccdf_star_all_minority() {
        let g = AttributedGraph::from_edges(
            vec![Group::Minority; 4],
            &[(0, 1), (0, 2), (0, 3)],
        )
        .unwrap();
        let ccdf = degree_ccdf(&g, Group::Minority).unwrap();
        assert_eq!(ccdf.points(), &[(1, 1.0), (3, 0.25)]);
        assert!(matches!(
            degree_ccdf(&g, Group::Majority),
            Err(NetgenError::EmptyGroup(Group::Majority))
        ));
    }

    #[test]
    fn ccdf_divergence_of_identical_groups_is_zero() {
        let g = AttributedGraph::from_edges(
            vec![Group::Minority, Group::Majority, Group::Minority, Group::Majority],
            &[(0, 1), (2, 3)],
        )
        .unwrap();
        let (mi, ma) = group_degree_distribution(&g).unwrap();
        assert_eq!(ccdf_divergence(&mi, &ma), 0.0);
    }

    #[test]
    fn weight_index_sampling_matches_prefix_sums() {
        let mut w = WeightIndex::new(7);
        let values = [3u64, 0, 5, 1, 0, 2, 4];
        for (i, &v) in values.iter().enumerate() {
            w.add(i, v);
        }
        assert_eq!(w.total(), 15);
        let mut expect = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            for _ in 0..v {
                expect.push(i);
            }
        }
        let got: Vec<usize> = (0..15).map(|t| w.find(t)).collect();
        assert_eq!(got, expect);
        w.sub(2, 5);
        assert_eq!(w.total(), 10);
        assert_eq!(w.find(3), 3);
    }
}
