//! Shared fixtures and independent oracles for the integration suites.
//!
//! Every oracle here recomputes its quantity through a different route
//! than the library: boolean-matrix closure for reachability, dense power
//! iteration for PageRank, sigma-product counting for betweenness, direct
//! pair loops for ARI.

use std::collections::HashMap;

use deplens_core::graph::{DeclKind, DepGraph, EdgeRecord, NodeId, NodeRecord};
use deplens_core::name::DottedName;
use deplens_core::partition::Partition;
use rand::Rng;

pub fn graph_from_pairs(n: usize, pairs: &[(NodeId, NodeId)]) -> DepGraph {
    let nodes = (0..n)
        .map(|i| {
            NodeRecord::new(
                i as NodeId,
                DottedName::parse(&format!("N{i}")).unwrap(),
                DeclKind::Theorem,
            )
        })
        .collect();
    let edges = pairs.iter().map(|&(s, d)| EdgeRecord::new(s, d)).collect();
    DepGraph::build(nodes, edges).unwrap()
}

/// Random DAG: edges only from lower to higher id, each present with
/// probability `p`.
pub fn random_dag(n: usize, p: f64, rng: &mut impl Rng) -> DepGraph {
    let mut pairs = Vec::new();
    for i in 0..n as NodeId {
        for j in (i + 1)..n as NodeId {
            if rng.random::<f64>() < p {
                pairs.push((i, j));
            }
        }
    }
    graph_from_pairs(n, &pairs)
}

/// Random digraph with roughly `m` edges, no self loops or duplicates.
pub fn random_digraph(n: usize, m: usize, rng: &mut impl Rng) -> DepGraph {
    let mut seen = std::collections::HashSet::new();
    let mut pairs = Vec::new();
    let mut attempts = 0;
    while pairs.len() < m && attempts < 50 * m {
        attempts += 1;
        let s = rng.random_range(0..n) as NodeId;
        let d = rng.random_range(0..n) as NodeId;
        if s != d && seen.insert((s, d)) {
            pairs.push((s, d));
        }
    }
    graph_from_pairs(n, &pairs)
}

/// Reachability closure by repeated boolean-matrix squaring.
pub fn closure_by_squaring(g: &DepGraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut m = vec![vec![false; n]; n];
    for (_, s, d) in g.edges() {
        m[s as usize][d as usize] = true;
    }
    // (A + I)^k by squaring until fixpoint
    for i in 0..n {
        m[i][i] = true;
    }
    loop {
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for k in 0..n {
                if m[i][k] {
                    for j in 0..n {
                        if m[k][j] {
                            next[i][j] = true;
                        }
                    }
                }
            }
        }
        if next == m {
            break;
        }
        m = next;
    }
    for i in 0..n {
        m[i][i] = false;
    }
    m
}

/// Dense PageRank power iteration with uniform dangling redistribution,
/// run to a much tighter tolerance than the implementation under test.
pub fn dense_pagerank(g: &DepGraph, alpha: f64) -> Vec<f64> {
    let n = g.node_count();
    let mut p = vec![vec![0.0f64; n]; n];
    for u in 0..n {
        let deg = g.out_degree(u as NodeId);
        if deg == 0 {
            for v in 0..n {
                p[u][v] = 1.0 / n as f64;
            }
        } else {
            for &v in g.out_neighbors(u as NodeId) {
                p[u][v as usize] = 1.0 / deg as f64;
            }
        }
    }
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..10_000 {
        let mut next = vec![(1.0 - alpha) / n as f64; n];
        for u in 0..n {
            for v in 0..n {
                if p[u][v] > 0.0 {
                    next[v] += alpha * x[u] * p[u][v];
                }
            }
        }
        let delta: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if delta < 1e-15 {
            break;
        }
    }
    x
}

/// Exact betweenness via the sigma-product identity:
/// c_B(v) = sum over s,t of sigma(s,v) * sigma(v,t) / sigma(s,t)
/// whenever d(s,v) + d(v,t) = d(s,t).
pub fn bruteforce_betweenness(g: &DepGraph) -> Vec<f64> {
    let n = g.node_count();
    let mut dist = vec![vec![u32::MAX; n]; n];
    let mut sigma = vec![vec![0.0f64; n]; n];
    for s in 0..n {
        let (d, sg) = bfs_counts(g, s as NodeId);
        dist[s] = d;
        sigma[s] = sg;
    }
    let mut score = vec![0.0f64; n];
    for s in 0..n {
        for t in 0..n {
            if s == t || sigma[s][t] == 0.0 {
                continue;
            }
            for v in 0..n {
                if v == s || v == t {
                    continue;
                }
                if dist[s][v] != u32::MAX
                    && dist[v][t] != u32::MAX
                    && dist[s][v] + dist[v][t] == dist[s][t]
                {
                    score[v] += sigma[s][v] * sigma[v][t] / sigma[s][t];
                }
            }
        }
    }
    score
}

fn bfs_counts(g: &DepGraph, s: NodeId) -> (Vec<u32>, Vec<f64>) {
    let n = g.node_count();
    let mut dist = vec![u32::MAX; n];
    let mut sigma = vec![0.0f64; n];
    dist[s as usize] = 0;
    sigma[s as usize] = 1.0;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &w in g.out_neighbors(v) {
            let wi = w as usize;
            if dist[wi] == u32::MAX {
                dist[wi] = dist[v as usize] + 1;
                queue.push_back(w);
            }
            if dist[wi] == dist[v as usize] + 1 {
                sigma[wi] += sigma[v as usize];
            }
        }
    }
    (dist, sigma)
}

/// All partitions of n elements as restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fn rec(current: &mut Vec<u32>, i: usize, max_used: u32, out: &mut Vec<Vec<u32>>) {
        if i == current.len() {
            out.push(current.clone());
            return;
        }
        for label in 0..=max_used + 1 {
            current[i] = label;
            rec(current, i + 1, max_used.max(label), out);
        }
    }
    if n > 0 {
        rec(&mut current, 1, 0, &mut out);
    } else {
        out.push(Vec::new());
    }
    out
}

pub fn partition_from_labels(labels: &[u32]) -> Partition {
    Partition::normalize(labels)
}

/// Brute-force entropy, MI (via the joint), NMI, and ARI (via direct pair
/// loops and the 2(ad - bc) identity).
pub fn bruteforce_compare(a: &[u32], b: &[u32]) -> (f64, f64, f64, f64, f64) {
    let n = a.len();
    let nf = n as f64;
    let entropy_of = |labels: &[u32]| -> f64 {
        let mut counts: HashMap<u32, usize> = HashMap::new();
        for &l in labels {
            *counts.entry(l).or_insert(0) += 1;
        }
        counts
            .values()
            .map(|&c| {
                let p = c as f64 / nf;
                -p * p.ln()
            })
            .sum()
    };
    let h_a = entropy_of(a);
    let h_b = entropy_of(b);
    let mut joint_counts: HashMap<(u32, u32), usize> = HashMap::new();
    for i in 0..n {
        *joint_counts.entry((a[i], b[i])).or_insert(0) += 1;
    }
    let h_joint: f64 = joint_counts
        .values()
        .map(|&c| {
            let p = c as f64 / nf;
            -p * p.ln()
        })
        .sum();
    let mi = (h_a + h_b - h_joint).max(0.0);
    let nmi = if h_a + h_b == 0.0 { 1.0 } else { 2.0 * mi / (h_a + h_b) };

    // direct pair classification
    let (mut aa, mut ab, mut ac, mut ad) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..n {
        for j in (i + 1)..n {
            let same_a = a[i] == a[j];
            let same_b = b[i] == b[j];
            match (same_a, same_b) {
                (true, true) => aa += 1.0,
                (true, false) => ab += 1.0,
                (false, true) => ac += 1.0,
                (false, false) => ad += 1.0,
            }
        }
    }
    let denom = (aa + ab) * (ab + ad) + (aa + ac) * (ac + ad);
    let ari = if denom == 0.0 {
        1.0
    } else {
        2.0 * (aa * ad - ab * ac) / denom
    };
    (h_a, h_b, mi, nmi, ari)
}

/// Directed preferential-attachment style graph: each new node cites `m`
/// earlier nodes picked with probability proportional to in-degree + 1.
pub fn preferential_attachment(n: usize, m: usize, rng: &mut impl Rng) -> DepGraph {
    let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
    let mut in_degree = vec![0usize; n];
    for v in 1..n {
        let mut targets = std::collections::BTreeSet::new();
        let total: usize = in_degree[..v].iter().sum::<usize>() + v;
        for _ in 0..m.min(v) {
            let mut pick = rng.random_range(0..total);
            let mut chosen = 0usize;
            for (u, &d) in in_degree[..v].iter().enumerate() {
                let mass = d + 1;
                if pick < mass {
                    chosen = u;
                    break;
                }
                pick -= mass;
            }
            targets.insert(chosen as NodeId);
        }
        for t in targets {
            pairs.push((v as NodeId, t));
            in_degree[t as usize] += 1;
        }
    }
    graph_from_pairs(n, &pairs)
}
