//! The shared graph data model: node and edge records plus the immutable
//! `DepGraph` used by every analysis layer (module graph, declaration
//! graph, namespace graph, build graph, file-aggregated graph).
//!
//! Edges are always stored citer -> cited: the importer points at the
//! imported module, a proof points at its premises. Node ids are dense and
//! assigned in input order; iteration is deterministic in ascending id.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::name::DottedName;

pub type NodeId = u32;

/// The declaration kinds plus the two aggregate layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeclKind {
    Theorem,
    Definition,
    Abbrev,
    Constructor,
    Inductive,
    Opaque,
    Quotient,
    Axiom,
    Module,
    Namespace,
}

impl DeclKind {
    pub const ALL: [DeclKind; 10] = [
        DeclKind::Theorem,
        DeclKind::Definition,
        DeclKind::Abbrev,
        DeclKind::Constructor,
        DeclKind::Inductive,
        DeclKind::Opaque,
        DeclKind::Quotient,
        DeclKind::Axiom,
        DeclKind::Module,
        DeclKind::Namespace,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            DeclKind::Theorem => "theorem",
            DeclKind::Definition => "definition",
            DeclKind::Abbrev => "abbrev",
            DeclKind::Constructor => "constructor",
            DeclKind::Inductive => "inductive",
            DeclKind::Opaque => "opaque",
            DeclKind::Quotient => "quotient",
            DeclKind::Axiom => "axiom",
            DeclKind::Module => "module",
            DeclKind::Namespace => "namespace",
        }
    }
}

impl FromStr for DeclKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DeclKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown kind {s:?}"))
    }
}

impl fmt::Display for DeclKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which part of a declaration an edge originates from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeOrigin {
    Statement,
    Proof,
    Both,
    #[default]
    Unknown,
}

impl EdgeOrigin {
    pub fn as_str(&self) -> &'static str {
        match self {
            EdgeOrigin::Statement => "statement",
            EdgeOrigin::Proof => "proof",
            EdgeOrigin::Both => "both",
            EdgeOrigin::Unknown => "unknown",
        }
    }
}

/// Boolean-or-unknown edge flags (synthesized, auto-derived).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tristate {
    Yes,
    No,
    #[default]
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Private,
}

/// Definitional-height metadata for `definition` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DefHeight {
    /// Semireducible definition with a numeric unfolding depth.
    Regular(u32),
    /// Always unfolded; carries no height.
    Abbreviation,
    /// Never unfolded.
    Opaque,
}

pub const MAX_DEF_HEIGHT: u32 = 10_000;

/// One declaration or module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: NodeId,
    pub name: DottedName,
    pub kind: DeclKind,
    pub module: Option<DottedName>,
    pub attributes: Vec<String>,
    pub def_height: Option<DefHeight>,
    pub tactics: Option<Vec<String>>,
    pub marker: Option<String>,
}

impl NodeRecord {
    pub fn new(id: NodeId, name: DottedName, kind: DeclKind) -> Self {
        NodeRecord {
            id,
            name,
            kind,
            module: None,
            attributes: Vec::new(),
            def_height: None,
            tactics: None,
            marker: None,
        }
    }
}

/// One directed dependency with its origin and mechanism flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub src: NodeId,
    pub dst: NodeId,
    pub origin: EdgeOrigin,
    pub synthesized: Tristate,
    pub auto: Tristate,
    pub visibility: Option<Visibility>,
    pub weight: f64,
}

impl EdgeRecord {
    pub fn new(src: NodeId, dst: NodeId) -> Self {
        EdgeRecord {
            src,
            dst,
            origin: EdgeOrigin::Unknown,
            synthesized: Tristate::Unknown,
            auto: Tristate::Unknown,
            visibility: None,
            weight: 1.0,
        }
    }

    pub fn with_origin(mut self, origin: EdgeOrigin) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge {index} endpoint out of range: ({src}, {dst}) with {node_count} nodes")]
    DanglingEndpoint {
        index: usize,
        src: NodeId,
        dst: NodeId,
        node_count: usize,
    },
    #[error("duplicate edge ({src}, {dst})")]
    DuplicateEdge { src: NodeId, dst: NodeId },
    #[error("self edge at node {0}")]
    SelfEdge(NodeId),
    #[error("node record {found} at position {expected} (ids must be dense and in order)")]
    NodeIdMismatch { expected: NodeId, found: NodeId },
    #[error("graph contains a cycle: {}", format_cycle(.0))]
    Cycle(Vec<NodeId>),
    #[error("negative edge weight {weight} on edge ({src}, {dst})")]
    NegativeWeight { src: NodeId, dst: NodeId, weight: f64 },
}

fn format_cycle(cycle: &[NodeId]) -> String {
    let mut s = cycle
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" -> ");
    if let Some(first) = cycle.first() {
        s.push_str(&format!(" -> {first}"));
    }
    s
}

/// Immutable directed graph over dense node ids with attribute tables.
///
/// Out- and in-adjacency are CSR arrays sorted per node; the in-adjacency
/// is the exact transpose of the out-adjacency. The canonical edge order
/// is (src, dst) ascending, and every per-edge attribute table is aligned
/// with it.
#[derive(Debug, Clone)]
pub struct DepGraph {
    nodes: Vec<NodeRecord>,
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    /// Canonical edge index of each in-adjacency slot.
    in_edge_ids: Vec<u32>,
    origins: Vec<EdgeOrigin>,
    synthesized: Vec<Tristate>,
    auto: Vec<Tristate>,
    visibility: Vec<Option<Visibility>>,
    weights: Vec<f64>,
}

impl DepGraph {
    /// Builds an immutable graph, validating endpoints, uniqueness, and the
    /// no-self-edge invariant.
    pub fn build(nodes: Vec<NodeRecord>, edges: Vec<EdgeRecord>) -> Result<Self, GraphError> {
        let n = nodes.len();
        for (i, rec) in nodes.iter().enumerate() {
            if rec.id as usize != i {
                return Err(GraphError::NodeIdMismatch {
                    expected: i as NodeId,
                    found: rec.id,
                });
            }
        }
        for (index, e) in edges.iter().enumerate() {
            if (e.src as usize) >= n || (e.dst as usize) >= n {
                return Err(GraphError::DanglingEndpoint {
                    index,
                    src: e.src,
                    dst: e.dst,
                    node_count: n,
                });
            }
            if e.src == e.dst {
                return Err(GraphError::SelfEdge(e.src));
            }
            if e.weight < 0.0 || !e.weight.is_finite() {
                return Err(GraphError::NegativeWeight {
                    src: e.src,
                    dst: e.dst,
                    weight: e.weight,
                });
            }
        }

        let mut order: Vec<u32> = (0..edges.len() as u32).collect();
        order.sort_unstable_by_key(|&i| {
            let e = &edges[i as usize];
            (e.src, e.dst)
        });
        for w in order.windows(2) {
            let a = &edges[w[0] as usize];
            let b = &edges[w[1] as usize];
            if a.src == b.src && a.dst == b.dst {
                return Err(GraphError::DuplicateEdge { src: a.src, dst: a.dst });
            }
        }

        let m = edges.len();
        let mut out_offsets = vec![0usize; n + 1];
        for e in &edges {
            out_offsets[e.src as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
        }
        let mut out_targets = vec![0 as NodeId; m];
        let mut origins = vec![EdgeOrigin::Unknown; m];
        let mut synthesized = vec![Tristate::Unknown; m];
        let mut auto = vec![Tristate::Unknown; m];
        let mut visibility = vec![None; m];
        let mut weights = vec![0.0f64; m];
        for (slot, &i) in order.iter().enumerate() {
            let e = &edges[i as usize];
            out_targets[slot] = e.dst;
            origins[slot] = e.origin;
            synthesized[slot] = e.synthesized;
            auto[slot] = e.auto;
            visibility[slot] = e.visibility;
            weights[slot] = e.weight;
        }

        let mut in_offsets = vec![0usize; n + 1];
        for &dst in &out_targets {
            in_offsets[dst as usize + 1] += 1;
        }
        for i in 0..n {
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0 as NodeId; m];
        let mut in_edge_ids = vec![0u32; m];
        for v in 0..n {
            for eid in out_offsets[v]..out_offsets[v + 1] {
                let dst = out_targets[eid] as usize;
                let slot = cursor[dst];
                in_sources[slot] = v as NodeId;
                in_edge_ids[slot] = eid as u32;
                cursor[dst] += 1;
            }
        }

        Ok(DepGraph {
            nodes,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            in_edge_ids,
            origins,
            synthesized,
            auto,
            visibility,
            weights,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn node(&self, v: NodeId) -> &NodeRecord {
        &self.nodes[v as usize]
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        0..self.nodes.len() as NodeId
    }

    /// Cited nodes, ascending.
    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    /// Citing nodes, ascending.
    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_neighbors(v).len()
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_neighbors(v).len()
    }

    /// Canonical edge indices of `v`'s out-edges.
    pub fn out_edge_ids(&self, v: NodeId) -> std::ops::Range<usize> {
        let v = v as usize;
        self.out_offsets[v]..self.out_offsets[v + 1]
    }

    /// Canonical edge indices of `v`'s in-edges (paired with `in_neighbors`).
    pub fn in_edge_ids(&self, v: NodeId) -> &[u32] {
        let v = v as usize;
        &self.in_edge_ids[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// (src, dst) of a canonical edge index.
    pub fn edge_endpoints(&self, edge: usize) -> (NodeId, NodeId) {
        let src = match self.out_offsets.binary_search(&edge) {
            Ok(mut i) => {
                while i + 1 < self.out_offsets.len() && self.out_offsets[i + 1] == edge {
                    i += 1;
                }
                i
            }
            Err(i) => i - 1,
        };
        (src as NodeId, self.out_targets[edge])
    }

    /// Canonical index of the edge (src, dst), if present.
    pub fn edge_index(&self, src: NodeId, dst: NodeId) -> Option<usize> {
        let range = self.out_edge_ids(src);
        let slice = &self.out_targets[range.clone()];
        slice.binary_search(&dst).ok().map(|i| range.start + i)
    }

    pub fn has_edge(&self, src: NodeId, dst: NodeId) -> bool {
        self.edge_index(src, dst).is_some()
    }

    pub fn origin(&self, edge: usize) -> EdgeOrigin {
        self.origins[edge]
    }

    pub fn synthesized(&self, edge: usize) -> Tristate {
        self.synthesized[edge]
    }

    pub fn auto(&self, edge: usize) -> Tristate {
        self.auto[edge]
    }

    pub fn visibility(&self, edge: usize) -> Option<Visibility> {
        self.visibility[edge]
    }

    pub fn weight(&self, edge: usize) -> f64 {
        self.weights[edge]
    }

    /// Iterates all edges in canonical (src, dst) order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, NodeId, NodeId)> + '_ {
        (0..self.node_count()).flat_map(move |v| {
            self.out_edge_ids(v as NodeId)
                .map(move |e| (e, v as NodeId, self.out_targets[e]))
        })
    }

    /// Reconstructs the edge record at a canonical index.
    pub fn edge_record(&self, edge: usize) -> EdgeRecord {
        let (src, dst) = self.edge_endpoints(edge);
        EdgeRecord {
            src,
            dst,
            origin: self.origins[edge],
            synthesized: self.synthesized[edge],
            auto: self.auto[edge],
            visibility: self.visibility[edge],
            weight: self.weights[edge],
        }
    }

    /// The graph with every edge reversed; attributes carried over.
    pub fn transpose(&self) -> DepGraph {
        let nodes = self.nodes.clone();
        let edges: Vec<EdgeRecord> = self
            .edges()
            .map(|(e, src, dst)| {
                let mut rec = self.edge_record(e);
                rec.src = dst;
                rec.dst = src;
                rec
            })
            .collect();
        DepGraph::build(nodes, edges).expect("transpose preserves validity")
    }
}

/// Summary statistics over one degree direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeStats {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub max: usize,
    pub zero_count: usize,
    /// degree -> node count, ascending by degree.
    pub histogram: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
}

/// Population statistics of the in- or out-degree distribution.
///
/// The median of an even-length sample is the lower median, matching the
/// integer medians used throughout the reports.
pub fn degree_stats(g: &DepGraph, direction: Direction) -> DegreeStats {
    let degrees: Vec<usize> = g
        .node_ids()
        .map(|v| match direction {
            Direction::In => g.in_degree(v),
            Direction::Out => g.out_degree(v),
        })
        .collect();
    let n = degrees.len();
    if n == 0 {
        return DegreeStats {
            mean: 0.0,
            median: 0.0,
            std: 0.0,
            max: 0,
            zero_count: 0,
            histogram: BTreeMap::new(),
        };
    }
    let mut histogram = BTreeMap::new();
    for &d in &degrees {
        *histogram.entry(d).or_insert(0usize) += 1;
    }
    let sum: usize = degrees.iter().sum();
    let mean = sum as f64 / n as f64;
    let var = degrees
        .iter()
        .map(|&d| {
            let diff = d as f64 - mean;
            diff * diff
        })
        .sum::<f64>()
        / n as f64;
    let mut sorted = degrees.clone();
    sorted.sort_unstable();
    let median = sorted[(n - 1) / 2] as f64;
    DegreeStats {
        mean,
        median,
        std: var.sqrt(),
        max: *sorted.last().unwrap(),
        zero_count: degrees.iter().filter(|&&d| d == 0).count(),
        histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn simple_nodes(n: usize) -> Vec<NodeRecord> {
        (0..n)
            .map(|i| {
                NodeRecord::new(
                    i as NodeId,
                    DottedName::parse(&format!("N{i}")).unwrap(),
                    DeclKind::Theorem,
                )
            })
            .collect()
    }

    pub(crate) fn graph_from_pairs(n: usize, pairs: &[(NodeId, NodeId)]) -> DepGraph {
        let edges = pairs.iter().map(|&(s, d)| EdgeRecord::new(s, d)).collect();
        DepGraph::build(simple_nodes(n), edges).unwrap()
    }

    #[test]
    fn empty_graph_builds() {
        let g = DepGraph::build(vec![], vec![]).unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn five_node_fragment_builds() {
        // succ_eq_add_one, zero_add, add_comm, add_left_comm, Eq.refl
        let g = graph_from_pairs(5, &[(3, 2), (0, 2), (2, 4), (3, 4), (0, 4), (1, 4)]);
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.in_degree(4), 4);
        assert_eq!(g.out_neighbors(3), &[2, 4]);
        assert_eq!(g.in_neighbors(2), &[0, 3]);
    }

    #[test]
    fn dangling_endpoint_reports_edge_index() {
        let err = DepGraph::build(simple_nodes(3), vec![EdgeRecord::new(3, 7)]).unwrap_err();
        assert_eq!(
            err,
            GraphError::DanglingEndpoint {
                index: 0,
                src: 3,
                dst: 7,
                node_count: 3
            }
        );
    }

    #[test]
    fn duplicate_and_self_edges_rejected() {
        let err = DepGraph::build(
            simple_nodes(2),
            vec![EdgeRecord::new(0, 1), EdgeRecord::new(0, 1)],
        )
        .unwrap_err();
        assert_eq!(err, GraphError::DuplicateEdge { src: 0, dst: 1 });
        let err = DepGraph::build(simple_nodes(2), vec![EdgeRecord::new(1, 1)]).unwrap_err();
        assert_eq!(err, GraphError::SelfEdge(1));
    }

    #[test]
    fn transpose_swaps_adjacency() {
        let g = graph_from_pairs(4, &[(0, 1), (0, 2), (2, 3)]);
        let t = g.transpose();
        assert_eq!(t.out_neighbors(1), &[0]);
        assert_eq!(t.out_neighbors(3), &[2]);
        assert_eq!(t.in_neighbors(0), &[1, 2]);
    }

    #[test]
    fn edge_lookup_and_endpoints_agree() {
        let g = graph_from_pairs(4, &[(0, 1), (0, 3), (2, 1)]);
        for (e, src, dst) in g.edges() {
            assert_eq!(g.edge_endpoints(e), (src, dst));
            assert_eq!(g.edge_index(src, dst), Some(e));
        }
        assert_eq!(g.edge_index(1, 0), None);
    }

    #[test]
    fn degree_stats_on_empty_graph_are_zero() {
        let g = DepGraph::build(vec![], vec![]).unwrap();
        let s = degree_stats(&g, Direction::In);
        assert_eq!(s.mean, 0.0);
        assert_eq!(s.max, 0);
        assert!(s.histogram.is_empty());
    }

    #[test]
    fn degree_stats_star() {
        // 3 leaves all citing node 0
        let g = graph_from_pairs(4, &[(1, 0), (2, 0), (3, 0)]);
        let s = degree_stats(&g, Direction::In);
        assert_eq!(s.max, 3);
        assert_eq!(s.zero_count, 3);
        assert_eq!(s.mean, 0.75);
        assert_eq!(s.median, 0.0);
        assert_eq!(s.histogram[&0], 3);
        assert_eq!(s.histogram[&3], 1);
    }
}
