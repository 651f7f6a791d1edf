//! Statistics over the mechanism decompositions: edge-origin and
//! synthesis partitions, predicate-filtered subgraphs, attribute
//! prevalence, definitional-height stats, tactic profiles with
//! Jensen-Shannon divergence, and the inter-kind edge flow matrix.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::graph::{
    DeclKind, DefHeight, DepGraph, EdgeOrigin, EdgeRecord, NodeId, NodeRecord, Tristate,
    Visibility,
};
use crate::partition::Grouping;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OriginStats {
    pub statement_only: usize,
    pub proof_only: usize,
    pub mixed: usize,
    pub unknown: usize,
    /// Fractions over known-origin edges; sum to 1 when any are known.
    pub statement_fraction: f64,
    pub proof_fraction: f64,
    pub mixed_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthesisStats {
    pub synthesized: usize,
    pub explicit: usize,
    pub unknown: usize,
    /// sigma = synthesized / known.
    pub synthesis_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AutoStats {
    pub auto: usize,
    pub human: usize,
    pub unknown: usize,
    pub auto_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgePartitionStats {
    pub origin: OriginStats,
    pub synthesis: SynthesisStats,
    pub auto: AutoStats,
    pub total_edges: usize,
}

/// Counts and fractions per edge-flag axis; unknown flags are excluded
/// from each axis's denominator and reported separately.
pub fn edge_partition_stats(g: &DepGraph) -> EdgePartitionStats {
    let mut o = [0usize; 4];
    let mut s = [0usize; 3];
    let mut a = [0usize; 3];
    for e in 0..g.edge_count() {
        match g.origin(e) {
            EdgeOrigin::Statement => o[0] += 1,
            EdgeOrigin::Proof => o[1] += 1,
            EdgeOrigin::Both => o[2] += 1,
            EdgeOrigin::Unknown => o[3] += 1,
        }
        match g.synthesized(e) {
            Tristate::Yes => s[0] += 1,
            Tristate::No => s[1] += 1,
            Tristate::Unknown => s[2] += 1,
        }
        match g.auto(e) {
            Tristate::Yes => a[0] += 1,
            Tristate::No => a[1] += 1,
            Tristate::Unknown => a[2] += 1,
        }
    }
    let o_known = (o[0] + o[1] + o[2]).max(1) as f64;
    let s_known = (s[0] + s[1]).max(1) as f64;
    let a_known = (a[0] + a[1]).max(1) as f64;
    EdgePartitionStats {
        origin: OriginStats {
            statement_only: o[0],
            proof_only: o[1],
            mixed: o[2],
            unknown: o[3],
            statement_fraction: o[0] as f64 / o_known,
            proof_fraction: o[1] as f64 / o_known,
            mixed_fraction: o[2] as f64 / o_known,
        },
        synthesis: SynthesisStats {
            synthesized: s[0],
            explicit: s[1],
            unknown: s[2],
            synthesis_ratio: s[0] as f64 / s_known,
        },
        auto: AutoStats {
            auto: a[0],
            human: a[1],
            unknown: a[2],
            auto_fraction: a[0] as f64 / a_known,
        },
        total_edges: g.edge_count(),
    }
}

/// Edge attributes handed to subgraph predicates.
#[derive(Debug, Clone, Copy)]
pub struct EdgeView<'a> {
    pub src: &'a NodeRecord,
    pub dst: &'a NodeRecord,
    pub origin: EdgeOrigin,
    pub synthesized: Tristate,
    pub auto: Tristate,
    pub visibility: Option<Visibility>,
    pub weight: f64,
}

/// Induced subgraph on nodes passing `node_pred`, keeping edges that pass
/// `edge_pred` and have both endpoints retained. Node ids are re-densified;
/// the second return value maps new ids back to the original ones.
pub fn subgraph_by_predicate(
    g: &DepGraph,
    node_pred: impl Fn(&NodeRecord) -> bool,
    edge_pred: impl Fn(EdgeView<'_>) -> bool,
) -> (DepGraph, Vec<NodeId>) {
    let mut keep: Vec<Option<NodeId>> = vec![None; g.node_count()];
    let mut original = Vec::new();
    let mut nodes = Vec::new();
    for v in g.node_ids() {
        let rec = g.node(v);
        if node_pred(rec) {
            let new_id = nodes.len() as NodeId;
            keep[v as usize] = Some(new_id);
            let mut r = rec.clone();
            r.id = new_id;
            nodes.push(r);
            original.push(v);
        }
    }
    let mut edges = Vec::new();
    for (e, src, dst) in g.edges() {
        if let (Some(ns), Some(nd)) = (keep[src as usize], keep[dst as usize]) {
            let view = EdgeView {
                src: g.node(src),
                dst: g.node(dst),
                origin: g.origin(e),
                synthesized: g.synthesized(e),
                auto: g.auto(e),
                visibility: g.visibility(e),
                weight: g.weight(e),
            };
            if edge_pred(view) {
                let mut rec = g.edge_record(e);
                rec.src = ns;
                rec.dst = nd;
                edges.push(rec);
            }
        }
    }
    let sub = DepGraph::build(nodes, edges).expect("induced subgraph is valid");
    (sub, original)
}

/// Longest finite shortest-path length over ordered reachable pairs;
/// 0 for edgeless graphs. BFS from every node, so meant for small
/// mechanism subgraphs.
pub fn diameter(g: &DepGraph) -> usize {
    let n = g.node_count();
    assert!(n >= 1);
    let mut best = 0usize;
    let mut dist = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for s in 0..n as NodeId {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        dist[s as usize] = 0;
        queue.clear();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &w in g.out_neighbors(v) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[v as usize] + 1;
                    best = best.max(dist[w as usize] as usize);
                    queue.push_back(w);
                }
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeStats {
    /// Node count of the attribute universe.
    pub universe: usize,
    /// (attribute, count, share-of-universe), count descending, ties by name.
    pub per_attribute: Vec<(String, usize, f64)>,
    pub any_attribute: usize,
    pub any_attribute_share: f64,
    /// Nodes tagged `to_additive`.
    pub flattening_tagged: usize,
    /// flattening ratio: to_additive-tagged / universe.
    pub flattening_ratio: f64,
}

pub const FLATTENING_ATTRIBUTE: &str = "to_additive";

/// Attribute prevalence over the given node universe.
pub fn attribute_stats(nodes: &[NodeRecord]) -> AttributeStats {
    let universe = nodes.len();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut any = 0usize;
    for n in nodes {
        if !n.attributes.is_empty() {
            any += 1;
        }
        for a in &n.attributes {
            *counts.entry(a.as_str()).or_insert(0) += 1;
        }
    }
    let flattening_tagged = counts.get(FLATTENING_ATTRIBUTE).copied().unwrap_or(0);
    let denom = universe.max(1) as f64;
    let mut per_attribute: Vec<(String, usize, f64)> = counts
        .into_iter()
        .map(|(a, c)| (a.to_owned(), c, c as f64 / denom))
        .collect();
    per_attribute.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
    AttributeStats {
        universe,
        per_attribute,
        any_attribute: any,
        any_attribute_share: any as f64 / denom,
        flattening_tagged,
        flattening_ratio: flattening_tagged as f64 / denom,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefHeightStats {
    pub regular: usize,
    pub abbreviation: usize,
    pub opaque: usize,
    /// Stats over regular heights only.
    pub median: f64,
    pub mean: f64,
    pub max: u32,
    /// p10..p90 of regular heights.
    pub deciles: Vec<u32>,
}

pub fn def_height_stats(nodes: &[NodeRecord]) -> DefHeightStats {
    let mut heights: Vec<u32> = Vec::new();
    let mut abbreviation = 0usize;
    let mut opaque = 0usize;
    for n in nodes {
        match n.def_height {
            Some(DefHeight::Regular(h)) => heights.push(h),
            Some(DefHeight::Abbreviation) => abbreviation += 1,
            Some(DefHeight::Opaque) => opaque += 1,
            None => {}
        }
    }
    heights.sort_unstable();
    let count = heights.len();
    let (median, mean, max, deciles) = if count == 0 {
        (0.0, 0.0, 0, Vec::new())
    } else {
        let median = heights[(count - 1) / 2] as f64;
        let mean = heights.iter().map(|&h| h as f64).sum::<f64>() / count as f64;
        let deciles = (1..=9)
            .map(|d| heights[(d * (count - 1)) / 10])
            .collect();
        (median, mean, *heights.last().unwrap(), deciles)
    };
    DefHeightStats {
        regular: count,
        abbreviation,
        opaque,
        median,
        mean,
        max,
        deciles,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreqProfile {
    /// (label, count), count descending, ties by name.
    pub counts: Vec<(String, u64)>,
    pub total: u64,
}

impl FreqProfile {
    fn from_map(map: BTreeMap<String, u64>) -> Self {
        let total = map.values().sum();
        let mut counts: Vec<(String, u64)> = map.into_iter().collect();
        counts.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
        FreqProfile { counts, total }
    }

    /// Probability of a label under this profile.
    pub fn probability(&self, label: &str) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts
            .iter()
            .find(|(l, _)| l == label)
            .map_or(0.0, |(_, c)| *c as f64 / self.total as f64)
    }
}

/// Jensen-Shannon divergence in log base 2, so the value lies in [0, 1].
pub fn jensen_shannon_divergence(p: &FreqProfile, q: &FreqProfile) -> f64 {
    if p.total == 0 || q.total == 0 {
        return 0.0;
    }
    let mut labels: Vec<&str> = p
        .counts
        .iter()
        .chain(q.counts.iter())
        .map(|(l, _)| l.as_str())
        .collect();
    labels.sort_unstable();
    labels.dedup();
    let mut jsd = 0.0;
    for l in labels {
        let pp = p.probability(l);
        let pq = q.probability(l);
        let m = 0.5 * (pp + pq);
        if pp > 0.0 {
            jsd += 0.5 * pp * (pp / m).log2();
        }
        if pq > 0.0 {
            jsd += 0.5 * pq * (pq / m).log2();
        }
    }
    jsd.max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepsPerProof {
    pub median: f64,
    pub mean: f64,
    pub iqr: (f64, f64),
    pub max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TacticStats {
    pub global: FreqProfile,
    /// Tactic-mode proofs (nonempty tactic list).
    pub proofs: usize,
    pub steps: usize,
    pub steps_per_proof: StepsPerProof,
    /// Per-group profiles, group name ascending.
    pub per_group: Vec<(String, FreqProfile)>,
    /// Pairwise JSD over the per-group profiles, (a, b) with a < b.
    pub jsd: Vec<(String, String, f64)>,
}

/// Tactic frequency profiles and the pairwise divergence matrix over the
/// given grouping. A node counts as a tactic-mode proof when its tactic
/// list is present and nonempty.
pub fn tactic_stats(nodes: &[NodeRecord], grouping: &Grouping) -> TacticStats {
    let mut global: BTreeMap<String, u64> = BTreeMap::new();
    let mut per_group_maps: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    let mut lengths: Vec<usize> = Vec::new();
    for (i, n) in nodes.iter().enumerate() {
        let Some(tactics) = n.tactics.as_ref().filter(|t| !t.is_empty()) else {
            continue;
        };
        lengths.push(tactics.len());
        let group = grouping
            .group_of(i as NodeId)
            .map(|g| grouping.name_of(g).to_owned());
        for t in tactics {
            *global.entry(t.clone()).or_insert(0) += 1;
            if let Some(g) = &group {
                *per_group_maps
                    .entry(g.clone())
                    .or_default()
                    .entry(t.clone())
                    .or_insert(0) += 1;
            }
        }
    }
    lengths.sort_unstable();
    let count = lengths.len();
    let steps: usize = lengths.iter().sum();
    let quantile = |q: f64| -> f64 {
        if count == 0 {
            return 0.0;
        }
        let pos = q * (count - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        lengths[lo] as f64 + (lengths[hi] as f64 - lengths[lo] as f64) * (pos - lo as f64)
    };
    let steps_per_proof = StepsPerProof {
        median: if count == 0 { 0.0 } else { lengths[(count - 1) / 2] as f64 },
        mean: if count == 0 { 0.0 } else { steps as f64 / count as f64 },
        iqr: (quantile(0.25), quantile(0.75)),
        max: lengths.last().copied().unwrap_or(0),
    };
    let per_group: Vec<(String, FreqProfile)> = per_group_maps
        .into_iter()
        .map(|(g, m)| (g, FreqProfile::from_map(m)))
        .collect();
    let mut jsd = Vec::new();
    for i in 0..per_group.len() {
        for j in (i + 1)..per_group.len() {
            jsd.push((
                per_group[i].0.clone(),
                per_group[j].0.clone(),
                jensen_shannon_divergence(&per_group[i].1, &per_group[j].1),
            ));
        }
    }
    TacticStats {
        global: FreqProfile::from_map(global),
        proofs: count,
        steps,
        steps_per_proof,
        per_group,
        jsd,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KindFlow {
    /// Kinds present in the graph, in enumeration order.
    pub kinds: Vec<DeclKind>,
    /// matrix[i][j] = edges from kind i to kind j.
    pub matrix: Vec<Vec<u64>>,
}

impl KindFlow {
    pub fn total(&self) -> u64 {
        self.matrix.iter().flatten().sum()
    }

    pub fn row_total(&self, kind: DeclKind) -> u64 {
        self.kinds
            .iter()
            .position(|&k| k == kind)
            .map_or(0, |i| self.matrix[i].iter().sum())
    }
}

/// Edge counts by (source kind, target kind).
pub fn inter_kind_flow(g: &DepGraph) -> KindFlow {
    let mut present = [false; DeclKind::ALL.len()];
    for n in g.nodes() {
        present[DeclKind::ALL.iter().position(|&k| k == n.kind).unwrap()] = true;
    }
    let kinds: Vec<DeclKind> = DeclKind::ALL
        .iter()
        .copied()
        .filter(|k| present[DeclKind::ALL.iter().position(|x| x == k).unwrap()])
        .collect();
    let index: BTreeMap<DeclKind, usize> =
        kinds.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let mut matrix = vec![vec![0u64; kinds.len()]; kinds.len()];
    for (_, src, dst) in g.edges() {
        let a = index[&g.node(src).kind];
        let b = index[&g.node(dst).kind];
        matrix[a][b] += 1;
    }
    KindFlow { kinds, matrix }
}

/// Convenience predicate pair accepting everything.
pub fn accept_all_edges(_: EdgeView<'_>) -> bool {
    true
}

/// Keeps the full edge record shape available to callers assembling
/// filtered graphs from records rather than predicates.
pub fn edge_records(g: &DepGraph) -> Vec<EdgeRecord> {
    (0..g.edge_count()).map(|e| g.edge_record(e)).collect()
}
