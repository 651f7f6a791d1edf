//! PageRank, Brandes betweenness (exact or pivot-sampled), ranking tables,
//! and labeled group comparisons.
//!
//! Both walks follow the stored citer -> cited orientation, so rank
//! accumulates on foundational nodes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::graph::{DepGraph, NodeId};
use crate::partition::Grouping;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreMeta {
    pub measure: String,
    pub parameters: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub converged: bool,
}

/// A per-node score map with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreVector {
    pub scores: Vec<f64>,
    pub meta: ScoreMeta,
}

impl ScoreVector {
    pub fn score(&self, v: NodeId) -> f64 {
        self.scores[v as usize]
    }
}

/// Power iteration for
/// `PR(v) = (1 - alpha)/N + alpha * sum_{u -> v} PR(u)/outdeg(u)`,
/// with dangling mass redistributed uniformly. Stops when the L1 change
/// drops below `tol`; if `max_iter` is exhausted the best iterate is
/// returned with `converged = false`.
pub fn pagerank(g: &DepGraph, alpha: f64, tol: f64, max_iter: usize) -> ScoreVector {
    let n = g.node_count();
    assert!(n >= 1, "pagerank requires at least one node");
    let mut x = vec![1.0 / n as f64; n];
    let mut next = vec![0.0f64; n];
    let mut converged = false;
    let mut iterations = 0usize;

    for it in 0..max_iter {
        iterations = it + 1;
        let mut dangling = 0.0;
        for v in 0..n {
            if g.out_degree(v as NodeId) == 0 {
                dangling += x[v];
            }
        }
        let base = (1.0 - alpha) / n as f64 + alpha * dangling / n as f64;
        next.iter_mut().for_each(|t| *t = base);
        for u in 0..n {
            let deg = g.out_degree(u as NodeId);
            if deg == 0 {
                continue;
            }
            let share = alpha * x[u] / deg as f64;
            for &v in g.out_neighbors(u as NodeId) {
                next[v as usize] += share;
            }
        }
        let l1: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if l1 < tol {
            converged = true;
            break;
        }
    }

    ScoreVector {
        scores: x,
        meta: ScoreMeta {
            measure: "pagerank".into(),
            parameters: vec![
                ("alpha".into(), format!("{alpha}")),
                ("tol".into(), format!("{tol}")),
                ("max_iter".into(), format!("{max_iter}")),
                ("iterations".into(), format!("{iterations}")),
            ],
            seed: None,
            converged,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetweennessMode {
    Exact,
    /// Brandes accumulation from `k` sources sampled uniformly without
    /// replacement, scaled by |V|/k.
    Pivots { k: usize, seed: u64 },
}

/// Directed betweenness with unit edge lengths. Normalization divides by
/// (N-1)(N-2), the number of ordered source/target pairs avoiding v.
pub fn betweenness(g: &DepGraph, mode: BetweennessMode, normalized: bool) -> ScoreVector {
    let n = g.node_count();
    let (sources, scale, seed): (Vec<NodeId>, f64, Option<u64>) = match mode {
        BetweennessMode::Exact => ((0..n as NodeId).collect(), 1.0, None),
        BetweennessMode::Pivots { k, seed } => {
            assert!(k <= n, "pivot count exceeds node count");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked = rand::seq::index::sample(&mut rng, n, k).into_vec();
            picked.sort_unstable();
            (
                picked.into_iter().map(|i| i as NodeId).collect(),
                n as f64 / k as f64,
                Some(seed),
            )
        }
    };

    // per-source passes in parallel; chunked ordered reduction keeps the
    // summation order fixed regardless of thread count
    let mut scores = vec![0.0f64; n];
    for chunk in sources.chunks(16) {
        let partials: Vec<Vec<f64>> = chunk
            .par_iter()
            .map(|&s| brandes_single_source(g, s))
            .collect();
        for partial in partials {
            for (acc, d) in scores.iter_mut().zip(&partial) {
                *acc += d;
            }
        }
    }
    for s in scores.iter_mut() {
        *s *= scale;
    }
    if normalized && n > 2 {
        let norm = ((n - 1) * (n - 2)) as f64;
        for s in scores.iter_mut() {
            *s /= norm;
        }
    }

    ScoreVector {
        scores,
        meta: ScoreMeta {
            measure: "betweenness".into(),
            parameters: vec![
                ("mode".into(), match mode {
                    BetweennessMode::Exact => "exact".into(),
                    BetweennessMode::Pivots { k, .. } => format!("pivots:{k}"),
                }),
                ("normalized".into(), format!("{normalized}")),
            ],
            seed,
            converged: true,
        },
    }
}

/// One Brandes BFS pass: dependency accumulation of shortest paths from s.
fn brandes_single_source(g: &DepGraph, s: NodeId) -> Vec<f64> {
    let n = g.node_count();
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut preds: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut order: Vec<NodeId> = Vec::new();
    let mut queue = std::collections::VecDeque::new();

    sigma[s as usize] = 1.0;
    dist[s as usize] = 0;
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        let dv = dist[v as usize];
        for &w in g.out_neighbors(v) {
            let wi = w as usize;
            if dist[wi] < 0 {
                dist[wi] = dv + 1;
                queue.push_back(w);
            }
            if dist[wi] == dv + 1 {
                sigma[wi] += sigma[v as usize];
                preds[wi].push(v);
            }
        }
    }

    let mut delta = vec![0.0f64; n];
    for &w in order.iter().rev() {
        let wi = w as usize;
        let coeff = (1.0 + delta[wi]) / sigma[wi];
        for &v in &preds[wi] {
            delta[v as usize] += sigma[v as usize] * coeff;
        }
    }
    delta[s as usize] = 0.0;
    delta
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedRow {
    pub rank: usize,
    pub label: String,
    pub score: f64,
}

/// Top-k table: descending by score, ties by label.
pub fn top_k(scores: &[f64], k: usize, labels: &[String]) -> Vec<RankedRow> {
    assert!(k >= 1);
    assert_eq!(scores.len(), labels.len());
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then_with(|| labels[a].cmp(&labels[b]))
    });
    idx.truncate(k);
    idx.into_iter()
        .enumerate()
        .map(|(rank, i)| RankedRow {
            rank: rank + 1,
            label: labels[i].clone(),
            score: scores[i],
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupStats {
    pub label: String,
    pub count: usize,
    pub mean_in_degree: f64,
    pub zero_citation_rate: f64,
    pub mean_pagerank: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupCompare {
    /// One row per label, ordered by count descending, ties by name.
    pub rows: Vec<GroupStats>,
    /// first/second mean ratios when exactly two labels are present.
    pub in_degree_ratio: Option<f64>,
    pub pagerank_ratio: Option<f64>,
}

/// Compares marker-labeled node groups (e.g. source keyword `theorem` vs
/// `lemma`) on citation structure; unlabeled nodes are excluded.
pub fn group_compare(g: &DepGraph, marker: &Grouping, pagerank: &ScoreVector) -> GroupCompare {
    let gc = marker.group_count();
    let mut count = vec![0usize; gc];
    let mut in_sum = vec![0f64; gc];
    let mut zero = vec![0usize; gc];
    let mut pr_sum = vec![0f64; gc];
    for v in g.node_ids() {
        if let Some(l) = marker.group_of(v) {
            let li = l as usize;
            count[li] += 1;
            let d = g.in_degree(v);
            in_sum[li] += d as f64;
            zero[li] += (d == 0) as usize;
            pr_sum[li] += pagerank.score(v);
        }
    }
    let mut rows: Vec<GroupStats> = (0..gc)
        .filter(|&l| count[l] > 0)
        .map(|l| GroupStats {
            label: marker.name_of(l as u32).to_owned(),
            count: count[l],
            mean_in_degree: in_sum[l] / count[l] as f64,
            zero_citation_rate: zero[l] as f64 / count[l] as f64,
            mean_pagerank: pr_sum[l] / count[l] as f64,
        })
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.label.cmp(&b.label)));
    let (in_degree_ratio, pagerank_ratio) = if rows.len() == 2 && rows[1].mean_in_degree > 0.0 {
        (
            Some(rows[0].mean_in_degree / rows[1].mean_in_degree),
            (rows[1].mean_pagerank > 0.0).then(|| rows[0].mean_pagerank / rows[1].mean_pagerank),
        )
    } else {
        (None, None)
    };
    GroupCompare {
        rows,
        in_degree_ratio,
        pagerank_ratio,
    }
}
