//! Louvain community detection with modularity, and the partition
//! comparison suite (entropy, mutual information, NMI, ARI).
//!
//! Modularity of a weighted undirected graph under partition c:
//!
//! ```text
//! Q = (1/2m) * sum_ij [A_ij - gamma * k_i * k_j / 2m] * delta(c_i, c_j)
//! ```
//!
//! with k_i the weighted degree (a self-loop contributes twice) and
//! 2m the total degree. Entropies use the natural log; NMI = 2I/(H_A+H_B)
//! with two identical one-cluster partitions defined as 1.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{DepGraph, NodeId};
use crate::partition::Partition;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CommunityError {
    #[error("total edge weight is zero")]
    ZeroWeight,
    #[error("partition covers {partition} nodes but graph has {graph}")]
    PartitionMismatch { partition: usize, graph: usize },
    #[error("partitions compare different node sets ({a} vs {b} nodes)")]
    MismatchedNodeSets { a: usize, b: usize },
}

/// Weighted undirected graph; parallel contributions are merged and
/// self-loops are kept separately.
#[derive(Debug, Clone)]
pub struct UndirectedGraph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    weights: Vec<f64>,
    loops: Vec<f64>,
}

impl UndirectedGraph {
    /// Builds from (u, v, w) triples; (u,v) and (v,u) accumulate into one
    /// undirected edge, u = v into a self-loop.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId, f64)>) -> Self {
        let mut merged: HashMap<(NodeId, NodeId), f64> = HashMap::new();
        let mut loops = vec![0.0f64; n];
        for (u, v, w) in edges {
            if u == v {
                loops[u as usize] += w;
            } else {
                let key = if u < v { (u, v) } else { (v, u) };
                *merged.entry(key).or_insert(0.0) += w;
            }
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in merged.keys() {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut neighbors = vec![0 as NodeId; offsets[n]];
        let mut weights = vec![0.0f64; offsets[n]];
        let mut cursor = offsets.clone();
        let mut pairs: Vec<((NodeId, NodeId), f64)> = merged.into_iter().collect();
        pairs.sort_unstable_by_key(|&(k, _)| k);
        for ((u, v), w) in pairs {
            for (a, b) in [(u, v), (v, u)] {
                neighbors[cursor[a as usize]] = b;
                weights[cursor[a as usize]] = w;
                cursor[a as usize] += 1;
            }
        }
        UndirectedGraph {
            offsets,
            neighbors,
            weights,
            loops,
        }
    }

    pub fn node_count(&self) -> usize {
        self.loops.len()
    }

    /// Number of undirected edges (self-loops included).
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2 + self.loops.iter().filter(|&&w| w != 0.0).count()
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let r = self.offsets[v as usize]..self.offsets[v as usize + 1];
        self.neighbors[r.clone()]
            .iter()
            .copied()
            .zip(self.weights[r].iter().copied())
    }

    pub fn loop_weight(&self, v: NodeId) -> f64 {
        self.loops[v as usize]
    }

    /// Weighted degree; a self-loop counts twice.
    pub fn degree(&self, v: NodeId) -> f64 {
        let r = self.offsets[v as usize]..self.offsets[v as usize + 1];
        self.weights[r].iter().sum::<f64>() + 2.0 * self.loops[v as usize]
    }

    /// Total edge weight m (each undirected edge once, self-loops once).
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum::<f64>() / 2.0 + self.loops.iter().sum::<f64>()
    }
}

/// Forgets orientation: weight(u, v) = sum of the directed weights in both
/// directions.
pub fn undirected_projection(g: &DepGraph) -> UndirectedGraph {
    UndirectedGraph::from_edges(
        g.node_count(),
        g.edges().map(|(e, src, dst)| (src, dst, g.weight(e))),
    )
}

/// Modularity of a partition at the given resolution.
pub fn modularity(
    ug: &UndirectedGraph,
    partition: &Partition,
    resolution: f64,
) -> Result<f64, CommunityError> {
    if partition.len() != ug.node_count() {
        return Err(CommunityError::PartitionMismatch {
            partition: partition.len(),
            graph: ug.node_count(),
        });
    }
    let m = ug.total_weight();
    if m <= 0.0 {
        return Err(CommunityError::ZeroWeight);
    }
    let gc = partition.group_count();
    let mut internal = vec![0.0f64; gc];
    let mut degree = vec![0.0f64; gc];
    for v in 0..ug.node_count() as NodeId {
        let c = partition.group_of(v) as usize;
        degree[c] += ug.degree(v);
        internal[c] += ug.loop_weight(v);
        for (w, wt) in ug.neighbors(v) {
            if w > v && partition.group_of(w) as usize == c {
                internal[c] += wt;
            }
        }
    }
    let mut q = 0.0;
    for c in 0..gc {
        q += internal[c] / m - resolution * (degree[c] / (2.0 * m)).powi(2);
    }
    Ok(q)
}

#[derive(Debug, Clone, Serialize)]
pub struct CommunityResult {
    pub partition: Partition,
    pub modularity: f64,
    pub passes: usize,
    pub seed: u64,
    pub resolution: f64,
}

const GAIN_THRESHOLD: f64 = 1e-12;
const MAX_PASSES: usize = 100;

/// Louvain: alternating local-move and aggregation phases until no move
/// gains more than 1e-12 modularity. Node visit order is shuffled by the
/// seed; ties in the gain break toward the lowest community id, and the
/// result is deterministic per seed. The returned Q is recomputed from the
/// final partition.
pub fn louvain(
    ug: &UndirectedGraph,
    seed: u64,
    resolution: f64,
) -> Result<CommunityResult, CommunityError> {
    let m = ug.total_weight();
    if m <= 0.0 {
        return Err(CommunityError::ZeroWeight);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n0 = ug.node_count();
    // membership of original nodes, refined level by level
    let mut assignment: Vec<u32> = (0..n0 as u32).collect();
    let mut level = LevelGraph::from_undirected(ug);
    let mut passes = 0usize;

    loop {
        passes += 1;
        let moved = level.local_moves(&mut rng, m, resolution);
        let comms = level.compact_communities();
        for a in assignment.iter_mut() {
            *a = comms[*a as usize];
        }
        let group_count = level.community_count;
        if !moved || group_count == level.size || passes >= MAX_PASSES {
            break;
        }
        level = level.aggregate();
    }

    let partition =
        Partition::from_dense_labels(assignment, level.community_count).canonicalize();
    let q = modularity(ug, &partition, resolution)?;
    Ok(CommunityResult {
        partition,
        modularity: q,
        passes,
        seed,
        resolution,
    })
}

/// Working graph for one Louvain level: adjacency maps plus community
/// bookkeeping.
struct LevelGraph {
    size: usize,
    adj: Vec<Vec<(u32, f64)>>,
    loops: Vec<f64>,
    degree: Vec<f64>,
    comm_of: Vec<u32>,
    comm_total: Vec<f64>,
    community_count: usize,
}

impl LevelGraph {
    fn from_undirected(ug: &UndirectedGraph) -> Self {
        let n = ug.node_count();
        let adj: Vec<Vec<(u32, f64)>> = (0..n as NodeId)
            .map(|v| ug.neighbors(v).collect())
            .collect();
        let loops: Vec<f64> = (0..n as NodeId).map(|v| ug.loop_weight(v)).collect();
        let degree: Vec<f64> = (0..n as NodeId).map(|v| ug.degree(v)).collect();
        LevelGraph {
            size: n,
            comm_of: (0..n as u32).collect(),
            comm_total: degree.clone(),
            adj,
            loops,
            degree,
            community_count: n,
        }
    }

    /// Sweeps nodes in shuffled order until no positive gain remains.
    /// Returns whether any move happened.
    fn local_moves(&mut self, rng: &mut ChaCha8Rng, m: f64, resolution: f64) -> bool {
        let mut order: Vec<u32> = (0..self.size as u32).collect();
        order.shuffle(rng);
        let mut moved_any = false;
        let mut weights_to: HashMap<u32, f64> = HashMap::new();
        loop {
            let mut moved_this_sweep = false;
            for &v in &order {
                let vc = self.comm_of[v as usize];
                let k_v = self.degree[v as usize];
                weights_to.clear();
                for &(w, wt) in &self.adj[v as usize] {
                    if w != v {
                        *weights_to.entry(self.comm_of[w as usize]).or_insert(0.0) += wt;
                    }
                }
                // gain of moving v into c, relative to staying isolated:
                // k_{v,c} - gamma * k_v * tot_c / 2m
                let base_total = self.comm_total[vc as usize] - k_v;
                let stay_gain = weights_to.get(&vc).copied().unwrap_or(0.0)
                    - resolution * k_v * base_total / (2.0 * m);
                let mut best_comm = vc;
                let mut best_gain = stay_gain;
                // ascending candidate order: requiring a strictly larger
                // gain breaks ties toward the lowest community id
                let mut candidates: Vec<u32> = weights_to.keys().copied().collect();
                candidates.sort_unstable();
                for c in candidates {
                    if c == vc {
                        continue;
                    }
                    let gain = weights_to[&c]
                        - resolution * k_v * self.comm_total[c as usize] / (2.0 * m);
                    if gain > best_gain + GAIN_THRESHOLD {
                        best_gain = gain;
                        best_comm = c;
                    }
                }
                if best_comm != vc {
                    self.comm_of[v as usize] = best_comm;
                    self.comm_total[vc as usize] -= k_v;
                    self.comm_total[best_comm as usize] += k_v;
                    moved_this_sweep = true;
                    moved_any = true;
                }
            }
            if !moved_this_sweep {
                break;
            }
        }
        moved_any
    }

    /// Renumbers communities densely (ascending old id) and returns the
    /// node -> dense community map.
    fn compact_communities(&mut self) -> Vec<u32> {
        let mut remap: HashMap<u32, u32> = HashMap::new();
        let mut sorted: Vec<u32> = self.comm_of.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for (i, c) in sorted.iter().enumerate() {
            remap.insert(*c, i as u32);
        }
        self.community_count = remap.len();
        for c in self.comm_of.iter_mut() {
            *c = remap[c];
        }
        self.comm_of.clone()
    }

    /// Contracts communities into super-nodes; intra-community weight
    /// becomes a self-loop.
    fn aggregate(&self) -> LevelGraph {
        let n = self.community_count;
        let mut merged: Vec<HashMap<u32, f64>> = vec![HashMap::new(); n];
        let mut loops = vec![0.0f64; n];
        for v in 0..self.size {
            let cv = self.comm_of[v];
            loops[cv as usize] += self.loops[v];
            for &(w, wt) in &self.adj[v] {
                let cw = self.comm_of[w as usize];
                if cv == cw {
                    // each undirected edge appears in both endpoint lists
                    if (w as usize) > v {
                        loops[cv as usize] += wt;
                    }
                } else {
                    *merged[cv as usize].entry(cw).or_insert(0.0) += wt;
                }
            }
        }
        let adj: Vec<Vec<(u32, f64)>> = merged
            .into_iter()
            .map(|map| {
                let mut list: Vec<(u32, f64)> = map.into_iter().collect();
                list.sort_unstable_by_key(|&(w, _)| w);
                list
            })
            .collect();
        let degree: Vec<f64> = (0..n)
            .map(|v| adj[v].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * loops[v])
            .collect();
        LevelGraph {
            size: n,
            comm_of: (0..n as u32).collect(),
            comm_total: degree.clone(),
            adj,
            loops,
            degree,
            community_count: n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionComparison {
    pub h_a: f64,
    pub h_b: f64,
    pub mutual_information: f64,
    pub nmi: f64,
    pub ari: f64,
}

/// Entropy (natural log), mutual information, NMI, and ARI of two
/// partitions over the same node set.
pub fn compare_partitions(
    a: &Partition,
    b: &Partition,
) -> Result<PartitionComparison, CommunityError> {
    if a.len() != b.len() {
        return Err(CommunityError::MismatchedNodeSets {
            a: a.len(),
            b: b.len(),
        });
    }
    let n = a.len();
    if n == 0 {
        return Err(CommunityError::MismatchedNodeSets { a: 0, b: 0 });
    }
    let nf = n as f64;

    let entropy = |p: &Partition| -> f64 {
        p.group_sizes()
            .iter()
            .filter(|&&s| s > 0)
            .map(|&s| {
                let q = s as f64 / nf;
                -q * q.ln()
            })
            .sum()
    };
    let h_a = entropy(a);
    let h_b = entropy(b);

    let mut joint: HashMap<(u32, u32), u64> = HashMap::new();
    for v in 0..n as NodeId {
        *joint.entry((a.group_of(v), b.group_of(v))).or_insert(0) += 1;
    }
    let mut mi = 0.0;
    for (&(ga, gb), &c) in &joint {
        let p = c as f64 / nf;
        let pa = a.group_size(ga) as f64 / nf;
        let pb = b.group_size(gb) as f64 / nf;
        mi += p * (p / (pa * pb)).ln();
    }
    let mi = mi.max(0.0);
    let nmi = if h_a + h_b == 0.0 {
        1.0
    } else {
        2.0 * mi / (h_a + h_b)
    };

    // ARI via pair counting with the hypergeometric chance correction
    let choose2 = |x: u64| -> f64 { (x * x.saturating_sub(1)) as f64 / 2.0 };
    let sum_ij: f64 = joint.values().map(|&c| choose2(c)).sum();
    let sum_a: f64 = a.group_sizes().iter().map(|&s| choose2(s as u64)).sum();
    let sum_b: f64 = b.group_sizes().iter().map(|&s| choose2(s as u64)).sum();
    let total = choose2(n as u64);
    let ari = if total == 0.0 {
        1.0
    } else {
        let expected = sum_a * sum_b / total;
        let max_index = 0.5 * (sum_a + sum_b);
        if (max_index - expected).abs() < 1e-15 {
            1.0
        } else {
            (sum_ij - expected) / (max_index - expected)
        }
    };

    Ok(PartitionComparison {
        h_a,
        h_b,
        mutual_information: mi,
        nmi,
        ari,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle_projects_to_single_edge() {
        use crate::graph::{DeclKind, DepGraph, EdgeRecord, NodeRecord};
        use crate::name::DottedName;
        let nodes = (0..2)
            .map(|i| {
                NodeRecord::new(
                    i as NodeId,
                    DottedName::parse(&format!("N{i}")).unwrap(),
                    DeclKind::Theorem,
                )
            })
            .collect();
        let g = DepGraph::build(
            nodes,
            vec![EdgeRecord::new(0, 1), EdgeRecord::new(1, 0)],
        )
        .unwrap();
        let ug = undirected_projection(&g);
        assert_eq!(ug.edge_count(), 1);
        let (w, wt) = ug.neighbors(0).next().unwrap();
        assert_eq!(w, 1);
        assert_eq!(wt, 2.0);
    }

    #[test]
    fn empty_projection() {
        use crate::graph::DepGraph;
        let g = DepGraph::build(vec![], vec![]).unwrap();
        let ug = undirected_projection(&g);
        assert_eq!(ug.node_count(), 0);
        assert_eq!(ug.edge_count(), 0);
    }

    fn triangle_pair() -> UndirectedGraph {
        UndirectedGraph::from_edges(
            6,
            [
                (0, 1, 1.0),
                (1, 2, 1.0),
                (2, 0, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (5, 3, 1.0),
            ],
        )
    }

    #[test]
    fn two_triangles_split_has_q_half() {
        let ug = triangle_pair();
        let p = Partition::from_dense_labels(vec![0, 0, 0, 1, 1, 1], 2);
        let q = modularity(&ug, &p, 1.0).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_isolated_edges_natural_split_has_q_half() {
        let ug = UndirectedGraph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]);
        let p = Partition::from_dense_labels(vec![0, 0, 1, 1], 2);
        let q = modularity(&ug, &p, 1.0).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_weight_graph_is_an_error() {
        let ug = UndirectedGraph::from_edges(3, []);
        let p = Partition::from_dense_labels(vec![0, 1, 2], 3);
        assert_eq!(
            modularity(&ug, &p, 1.0),
            Err(CommunityError::ZeroWeight)
        );
    }

    fn two_cliques(k: usize) -> UndirectedGraph {
        let mut edges = Vec::new();
        for offset in [0, k] {
            for i in 0..k {
                for j in (i + 1)..k {
                    edges.push(((offset + i) as NodeId, (offset + j) as NodeId, 1.0));
                }
            }
        }
        edges.push((0, k as NodeId, 1.0));
        UndirectedGraph::from_edges(2 * k, edges)
    }

    #[test]
    fn louvain_recovers_joined_cliques() {
        let ug = two_cliques(5);
        let r = louvain(&ug, 42, 1.0).unwrap();
        assert_eq!(r.partition.group_count(), 2);
        for v in 0..5u32 {
            assert_eq!(r.partition.group_of(v), r.partition.group_of(0));
            assert_eq!(r.partition.group_of(v + 5), r.partition.group_of(5));
        }
        assert_ne!(r.partition.group_of(0), r.partition.group_of(5));
        let q = modularity(&ug, &r.partition, 1.0).unwrap();
        assert!((q - r.modularity).abs() < 1e-12);
    }

    #[test]
    fn louvain_deterministic_per_seed() {
        let ug = two_cliques(6);
        let a = louvain(&ug, 7, 1.0).unwrap();
        let b = louvain(&ug, 7, 1.0).unwrap();
        assert_eq!(a.partition.labels(), b.partition.labels());
        assert_eq!(a.modularity, b.modularity);
    }

    #[test]
    fn louvain_q_never_below_singletons() {
        let ug = triangle_pair();
        let singletons = Partition::from_dense_labels((0..6).collect(), 6);
        let q0 = modularity(&ug, &singletons, 1.0).unwrap();
        let r = louvain(&ug, 3, 1.0).unwrap();
        assert!(r.modularity >= q0);
        assert!((r.modularity - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identical_partitions_compare_to_one() {
        let p = Partition::from_dense_labels(vec![0, 0, 1, 1, 2], 3);
        let c = compare_partitions(&p, &p).unwrap();
        assert!((c.nmi - 1.0).abs() < 1e-12);
        assert!((c.ari - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_cluster_pair_defined_as_one() {
        let p = Partition::from_dense_labels(vec![0, 0, 0], 1);
        let c = compare_partitions(&p, &p).unwrap();
        assert_eq!(c.nmi, 1.0);
        assert_eq!(c.ari, 1.0);
    }

    #[test]
    fn mi_is_symmetric_and_bounded() {
        let a = Partition::from_dense_labels(vec![0, 0, 1, 1, 2, 2], 3);
        let b = Partition::from_dense_labels(vec![0, 1, 0, 1, 0, 1], 2);
        let ab = compare_partitions(&a, &b).unwrap();
        let ba = compare_partitions(&b, &a).unwrap();
        assert!((ab.nmi - ba.nmi).abs() < 1e-12);
        assert!((ab.ari - ba.ari).abs() < 1e-12);
        assert!(ab.nmi >= 0.0 && ab.nmi <= 1.0);
        assert!(ab.ari <= 1.0);
    }

    #[test]
    fn mismatched_lengths_error() {
        let a = Partition::from_dense_labels(vec![0, 0], 1);
        let b = Partition::from_dense_labels(vec![0, 0, 0], 1);
        assert!(compare_partitions(&a, &b).is_err());
    }
}
