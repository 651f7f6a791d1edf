//! Connectivity degradation under single-node, top-k, and progressive
//! random or targeted node removal.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::graph::{DepGraph, NodeId};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemovalMeasure {
    pub wcc_count: usize,
    pub gcc_size: usize,
    /// Surviving nodes outside the giant component.
    pub disconnected_count: usize,
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    components: usize,
    max_size: u32,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            components: 0,
            max_size: 0,
        }
    }

    fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            self.parent[v as usize] = self.parent[self.parent[v as usize] as usize];
            v = self.parent[v as usize];
        }
        v
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        self.max_size = self.max_size.max(self.size[ra as usize]);
        self.components -= 1;
    }

    fn activate(&mut self) {
        self.components += 1;
        self.max_size = self.max_size.max(1);
    }
}

/// Weak-connectivity measures of the subgraph induced by dropping `remove`.
pub fn remove_and_measure(g: &DepGraph, remove: &[bool]) -> RemovalMeasure {
    assert_eq!(remove.len(), g.node_count());
    let n = g.node_count();
    let mut uf = UnionFind::new(n);
    let mut alive = 0usize;
    for &gone in remove {
        if !gone {
            uf.activate();
            alive += 1;
        }
    }
    for (_, src, dst) in g.edges() {
        if !remove[src as usize] && !remove[dst as usize] {
            uf.union(src, dst);
        }
    }
    let gcc_size = uf.max_size as usize;
    RemovalMeasure {
        wcc_count: uf.components,
        gcc_size,
        disconnected_count: alive - gcc_size,
    }
}

/// For each candidate alone: how many other nodes fall out of the giant
/// component when it is removed. Removing a leaf scores 0.
pub fn single_node_impact(g: &DepGraph, candidates: &[NodeId]) -> Vec<(NodeId, usize)> {
    let baseline = remove_and_measure(g, &vec![false; g.node_count()]);
    candidates
        .iter()
        .map(|&c| {
            let mut remove = vec![false; g.node_count()];
            remove[c as usize] = true;
            let after = remove_and_measure(g, &remove);
            let severed = (baseline.gcc_size - 1).saturating_sub(after.gcc_size);
            (c, severed)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum RemovalStrategy<'a> {
    /// Seeded random orders, averaged over trials.
    Random { seed: u64 },
    /// Highest score first, computed once on the intact graph; ties break
    /// toward the smaller id.
    Targeted { scores: &'a [f64] },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemovalCurve {
    pub fractions: Vec<f64>,
    /// Mean fraction of all nodes remaining in the giant component.
    pub gcc_fraction: Vec<f64>,
    /// Per-fraction standard deviation across trials.
    pub std: Vec<f64>,
    pub strategy: String,
    pub trials: usize,
    pub seed: Option<u64>,
}

/// Progressive removal curve. Each trial adds nodes back from a fully
/// removed graph, so one pass over the edges covers every fraction.
pub fn removal_curve(
    g: &DepGraph,
    strategy: RemovalStrategy<'_>,
    fractions: &[f64],
    trials: usize,
) -> RemovalCurve {
    assert!(trials >= 1);
    assert!(
        fractions.windows(2).all(|w| w[0] <= w[1]),
        "fractions must ascend"
    );
    let n = g.node_count();
    let (label, seed, orders): (String, Option<u64>, Vec<Vec<NodeId>>) = match strategy {
        RemovalStrategy::Targeted { scores } => {
            assert_eq!(scores.len(), n);
            let mut order: Vec<NodeId> = (0..n as NodeId).collect();
            order.sort_by(|&a, &b| {
                scores[b as usize]
                    .total_cmp(&scores[a as usize])
                    .then(a.cmp(&b))
            });
            ("targeted".into(), None, vec![order])
        }
        RemovalStrategy::Random { seed } => {
            let orders = (0..trials as u64)
                .map(|t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(t);
                    let mut order: Vec<NodeId> = (0..n as NodeId).collect();
                    order.shuffle(&mut rng);
                    order
                })
                .collect();
            ("random".into(), Some(seed), orders)
        }
    };

    let per_trial: Vec<Vec<f64>> = orders
        .par_iter()
        .map(|order| curve_for_order(g, order, fractions))
        .collect();

    let t = per_trial.len() as f64;
    let mut means = vec![0.0f64; fractions.len()];
    for trial in &per_trial {
        for (m, v) in means.iter_mut().zip(trial) {
            *m += v / t;
        }
    }
    let mut std = vec![0.0f64; fractions.len()];
    for trial in &per_trial {
        for ((s, v), m) in std.iter_mut().zip(trial).zip(&means) {
            *s += (v - m) * (v - m) / t;
        }
    }
    for s in std.iter_mut() {
        *s = s.sqrt();
    }

    RemovalCurve {
        fractions: fractions.to_vec(),
        gcc_fraction: means,
        std,
        strategy: label,
        trials: per_trial.len(),
        seed,
    }
}

/// GCC fraction at each requested removal fraction for one removal order,
/// evaluated by re-adding nodes from the fully removed end.
fn curve_for_order(g: &DepGraph, order: &[NodeId], fractions: &[f64]) -> Vec<f64> {
    let n = g.node_count();
    let mut alive = vec![false; n];
    let mut uf = UnionFind::new(n);
    let mut results = vec![0.0f64; fractions.len()];

    // descending fraction = ascending survivor count
    let mut added = 0usize; // nodes re-added from the tail of `order`
    for (fi, &f) in fractions.iter().enumerate().rev() {
        let removed = ((f * n as f64).round() as usize).min(n);
        let survivors = n - removed;
        while added < survivors {
            let v = order[n - 1 - added];
            alive[v as usize] = true;
            uf.activate();
            for &w in g.out_neighbors(v).iter().chain(g.in_neighbors(v)) {
                if alive[w as usize] {
                    uf.union(v, w);
                }
            }
            added += 1;
        }
        results[fi] = if n == 0 {
            0.0
        } else {
            uf.max_size as f64 / n as f64
        };
    }
    results
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DeclKind, EdgeRecord, NodeRecord};
    use crate::name::DottedName;

    fn graph(n: usize, pairs: &[(NodeId, NodeId)]) -> DepGraph {
        let nodes = (0..n)
            .map(|i| {
                NodeRecord::new(
                    i as NodeId,
                    DottedName::parse(&format!("N{i}")).unwrap(),
                    DeclKind::Module,
                )
            })
            .collect();
        let edges = pairs.iter().map(|&(s, d)| EdgeRecord::new(s, d)).collect();
        DepGraph::build(nodes, edges).unwrap()
    }

    #[test]
    fn removing_nothing_matches_components() {
        let g = graph(5, &[(0, 1), (1, 2), (3, 4)]);
        let m = remove_and_measure(&g, &vec![false; 5]);
        let p = crate::components::connected_components(
            &g,
            crate::components::ComponentMode::Weak,
        );
        assert_eq!(m.wcc_count, p.group_count());
        assert_eq!(m.gcc_size, p.group_size(0));
        assert_eq!(m.disconnected_count, 2);
    }

    #[test]
    fn removing_hub_fragments_star() {
        let g = graph(5, &[(1, 0), (2, 0), (3, 0), (4, 0)]);
        let mut remove = vec![false; 5];
        remove[0] = true;
        let m = remove_and_measure(&g, &remove);
        assert_eq!(m.wcc_count, 4);
        assert_eq!(m.gcc_size, 1);
        assert_eq!(m.disconnected_count, 3);
    }

    #[test]
    fn leaf_removal_has_zero_impact() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let impact = single_node_impact(&g, &[3, 1]);
        assert_eq!(impact[0], (3, 0));
        // removing node 1 leaves {0} and {2,3}: one node falls out of the
        // new giant component
        assert_eq!(impact[1], (1, 1));
    }

    #[test]
    fn barbell_cut_vertex_severs_one_bell() {
        // bells {0,1,2} and {4,5,6} joined through 3
        let g = graph(
            7,
            &[
                (0, 1),
                (1, 2),
                (2, 0),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 4),
            ],
        );
        let impact = single_node_impact(&g, &[3]);
        assert_eq!(impact[0].1, 3);
    }

    #[test]
    fn curve_is_monotone_and_hits_zero() {
        let g = graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]);
        let fractions = [0.0, 0.2, 0.5, 0.8, 1.0];
        let scores: Vec<f64> = (0..6).map(|v| 6.0 - v as f64).collect();
        let c = removal_curve(&g, RemovalStrategy::Targeted { scores: &scores }, &fractions, 1);
        for w in c.gcc_fraction.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert_eq!(c.gcc_fraction[0], 1.0);
        assert_eq!(*c.gcc_fraction.last().unwrap(), 0.0);
    }

    #[test]
    fn random_curve_deterministic_per_seed() {
        let g = graph(20, &(0..19).map(|i| (i as NodeId, i as NodeId + 1)).collect::<Vec<_>>());
        let f = [0.1, 0.3, 0.5];
        let a = removal_curve(&g, RemovalStrategy::Random { seed: 11 }, &f, 5);
        let b = removal_curve(&g, RemovalStrategy::Random { seed: 11 }, &f, 5);
        assert_eq!(a.gcc_fraction, b.gcc_fraction);
        assert_eq!(a.std, b.std);
    }

    #[test]
    fn zero_fraction_reports_intact_gcc() {
        let g = graph(5, &[(0, 1), (2, 3)]);
        let scores = vec![1.0; 5];
        let c = removal_curve(&g, RemovalStrategy::Targeted { scores: &scores }, &[0.0], 1);
        assert_eq!(c.gcc_fraction[0], 2.0 / 5.0);
    }
}
