//! Multi-snapshot and co-modification analyses: growth indicators, hub
//! turnover, community persistence, and the co-modification graph with
//! its overlap against the import graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::community::compare_partitions;
use crate::graph::{DepGraph, NodeId};
use crate::ingest::ComodRecord;
use crate::name::DottedName;
use crate::partition::Partition;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    #[error("empty snapshot series")]
    EmptySeries,
    #[error("snapshots share no node names")]
    EmptyIntersection,
    #[error("hub turnover needs k >= 2, got {0}")]
    BadK(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotStat {
    pub label: String,
    pub declarations: usize,
    pub modules: usize,
    pub edges: usize,
    /// |E| / |D|.
    pub edge_density: f64,
}

/// One row per snapshot: node count, distinct module count, edge density.
pub fn growth_indicators(
    series: &[(String, &DepGraph)],
) -> Result<Vec<SnapshotStat>, EvolutionError> {
    if series.is_empty() {
        return Err(EvolutionError::EmptySeries);
    }
    Ok(series
        .iter()
        .map(|(label, g)| {
            let modules: BTreeSet<&str> = g
                .nodes()
                .iter()
                .filter_map(|n| n.module.as_ref().map(DottedName::as_str))
                .collect();
            SnapshotStat {
                label: label.clone(),
                declarations: g.node_count(),
                modules: modules.len(),
                edges: g.edge_count(),
                edge_density: if g.node_count() == 0 {
                    0.0
                } else {
                    g.edge_count() as f64 / g.node_count() as f64
                },
            }
        })
        .collect())
}

/// Average ranks of values sorted descending; ties share the mean rank.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0.0f64; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && values[idx[j]] == values[idx[i]] {
            j += 1;
        }
        let mean_rank = (i + j - 1) as f64 / 2.0 + 1.0;
        for &k in &idx[i..j] {
            ranks[k] = mean_rank;
        }
        i = j;
    }
    ranks
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let n = ra.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return 1.0;
    }
    cov / (va * vb).sqrt()
}

/// Spearman rank correlation of in-degree over the union of both
/// snapshots' top-k sets; nodes are matched by fully qualified name and
/// restricted to the shared name universe.
pub fn hub_turnover(ga: &DepGraph, gb: &DepGraph, k: usize) -> Result<f64, EvolutionError> {
    if k < 2 {
        return Err(EvolutionError::BadK(k));
    }
    let index_b: HashMap<&str, NodeId> = gb
        .nodes()
        .iter()
        .map(|n| (n.name.as_str(), n.id))
        .collect();
    // shared universe with in-degrees from both sides
    let mut shared: Vec<(&str, f64, f64)> = ga
        .nodes()
        .iter()
        .filter_map(|n| {
            index_b.get(n.name.as_str()).map(|&vb| {
                (
                    n.name.as_str(),
                    ga.in_degree(n.id) as f64,
                    gb.in_degree(vb) as f64,
                )
            })
        })
        .collect();
    if shared.is_empty() {
        return Err(EvolutionError::EmptyIntersection);
    }
    shared.sort_by(|x, y| x.0.cmp(y.0));

    let top_of = |side: fn(&(&str, f64, f64)) -> f64| -> BTreeSet<usize> {
        let mut idx: Vec<usize> = (0..shared.len()).collect();
        idx.sort_by(|&a, &b| {
            side(&shared[b])
                .total_cmp(&side(&shared[a]))
                .then_with(|| shared[a].0.cmp(shared[b].0))
        });
        idx.into_iter().take(k).collect()
    };
    let union: BTreeSet<usize> = top_of(|t| t.1).union(&top_of(|t| t.2)).copied().collect();
    let a_deg: Vec<f64> = union.iter().map(|&i| shared[i].1).collect();
    let b_deg: Vec<f64> = union.iter().map(|&i| shared[i].2).collect();
    Ok(spearman(&a_deg, &b_deg))
}

/// NMI of two community assignments restricted to the shared node names.
pub fn community_persistence(
    ga: &DepGraph,
    pa: &Partition,
    gb: &DepGraph,
    pb: &Partition,
) -> Result<f64, EvolutionError> {
    let index_b: HashMap<&str, NodeId> = gb
        .nodes()
        .iter()
        .map(|n| (n.name.as_str(), n.id))
        .collect();
    let mut ids_a = Vec::new();
    let mut ids_b = Vec::new();
    for n in ga.nodes() {
        if let Some(&vb) = index_b.get(n.name.as_str()) {
            ids_a.push(n.id);
            ids_b.push(vb);
        }
    }
    if ids_a.is_empty() {
        return Err(EvolutionError::EmptyIntersection);
    }
    let ra = pa.restricted_to(&ids_a);
    let rb = pb.restricted_to(&ids_b);
    let cmp = compare_partitions(&ra, &rb).expect("restrictions share length");
    Ok(cmp.nmi)
}

/// Weighted undirected co-modification graph over module names.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComodGraph {
    /// Sorted module names.
    pub modules: Vec<String>,
    /// (a, b) -> PR count, a < b by index.
    pub pair_weights: BTreeMap<(u32, u32), u32>,
}

impl ComodGraph {
    pub fn edge_count(&self) -> usize {
        self.pair_weights.len()
    }

    pub fn name(&self, i: u32) -> &str {
        &self.modules[i as usize]
    }
}

/// w(mi, mj) = number of PRs touching both files.
pub fn build_comod_graph(prs: &[ComodRecord]) -> ComodGraph {
    let mut names: Vec<String> = prs
        .iter()
        .flat_map(|p| p.files.iter().map(|f| f.as_str().to_owned()))
        .collect();
    names.sort_unstable();
    names.dedup();
    let index: HashMap<&str, u32> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i as u32))
        .collect();
    let mut pair_weights: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for pr in prs {
        let mut ids: Vec<u32> = pr.files.iter().map(|f| index[f.as_str()]).collect();
        ids.sort_unstable();
        ids.dedup();
        for i in 0..ids.len() {
            for j in (i + 1)..ids.len() {
                *pair_weights.entry((ids[i], ids[j])).or_insert(0) += 1;
            }
        }
    }
    ComodGraph {
        modules: names,
        pair_weights,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverlapPair {
    pub a: String,
    pub b: String,
    pub comod_weight: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComodOverlap {
    /// Pairs present in both graphs.
    pub both: Vec<OverlapPair>,
    /// Co-modified with no import edge in either direction: hidden
    /// dependencies.
    pub comod_only: Vec<OverlapPair>,
    /// Import pairs never co-modified (names as in the module graph).
    pub import_only: Vec<(String, String)>,
}

/// Compares the co-modification pairs against the undirected import
/// pairs.
pub fn comod_vs_imports(comod: &ComodGraph, gm: &DepGraph) -> ComodOverlap {
    let mut import_pairs: BTreeSet<(String, String)> = BTreeSet::new();
    for (_, src, dst) in gm.edges() {
        let (mut a, mut b) = (
            gm.node(src).name.as_str().to_owned(),
            gm.node(dst).name.as_str().to_owned(),
        );
        if b < a {
            std::mem::swap(&mut a, &mut b);
        }
        import_pairs.insert((a, b));
    }
    let mut both = Vec::new();
    let mut comod_only = Vec::new();
    for (&(i, j), &w) in &comod.pair_weights {
        let (mut a, mut b) = (comod.name(i).to_owned(), comod.name(j).to_owned());
        if b < a {
            std::mem::swap(&mut a, &mut b);
        }
        let pair = OverlapPair {
            a: a.clone(),
            b: b.clone(),
            comod_weight: w,
        };
        if import_pairs.remove(&(a, b)) {
            both.push(pair);
        } else {
            comod_only.push(pair);
        }
    }
    ComodOverlap {
        both,
        comod_only,
        import_only: import_pairs.into_iter().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DeclKind, EdgeRecord, NodeRecord};

    fn named_graph(names: &[&str], pairs: &[(NodeId, NodeId)]) -> DepGraph {
        let nodes = names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                NodeRecord::new(i as NodeId, DottedName::parse(name).unwrap(), DeclKind::Theorem)
            })
            .collect();
        let edges = pairs.iter().map(|&(s, d)| EdgeRecord::new(s, d)).collect();
        DepGraph::build(nodes, edges).unwrap()
    }

    fn pr(id: &str, files: &[&str]) -> ComodRecord {
        ComodRecord {
            pr_id: id.to_owned(),
            files: files.iter().map(|f| DottedName::parse(f).unwrap()).collect(),
        }
    }

    #[test]
    fn growth_rows() {
        let g = named_graph(&["a", "b"], &[(0, 1)]);
        let rows = growth_indicators(&[("t1".into(), &g)]).unwrap();
        assert_eq!(rows[0].declarations, 2);
        assert_eq!(rows[0].edges, 1);
        assert_eq!(rows[0].edge_density, 0.5);
        assert!(growth_indicators(&[]).is_err());
        let empty = DepGraph::build(vec![], vec![]).unwrap();
        let rows = growth_indicators(&[("e".into(), &empty)]).unwrap();
        assert_eq!(rows[0].edge_density, 0.0);
    }

    #[test]
    fn identical_graphs_have_turnover_one() {
        let g = named_graph(&["a", "b", "c"], &[(0, 2), (1, 2)]);
        assert_eq!(hub_turnover(&g, &g, 2).unwrap(), 1.0);
    }

    #[test]
    fn inverted_in_degrees_give_minus_one() {
        // in-degrees a: [4,3,2,1,0] over d0..d4, b: reversed
        let names = ["d0", "d1", "d2", "d3", "d4"];
        let mut pairs_a = Vec::new();
        let mut pairs_b = Vec::new();
        // extra citer nodes provide the in-degrees
        let mut all_names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        for i in 0..10 {
            all_names.push(format!("src{i}"));
        }
        let name_refs: Vec<&str> = all_names.iter().map(|s| s.as_str()).collect();
        let mut next_src = 5u32;
        for (i, _) in names.iter().enumerate() {
            for _ in 0..(4 - i) {
                pairs_a.push((next_src % 15, i as u32));
                next_src += 1;
            }
        }
        next_src = 5;
        for (i, _) in names.iter().enumerate() {
            for _ in 0..i {
                pairs_b.push((next_src % 15, i as u32));
                next_src += 1;
            }
        }
        let ga = named_graph(&name_refs, &pairs_a);
        let gb = named_graph(&name_refs, &pairs_b);
        let rho = hub_turnover(&ga, &gb, 5).unwrap();
        assert!((rho + 1.0).abs() < 1e-12, "rho = {rho}");
        // disjoint name sets error
        let gc = named_graph(&["x", "y"], &[(0, 1)]);
        assert_eq!(
            hub_turnover(&ga, &gc, 2),
            Err(EvolutionError::EmptyIntersection)
        );
    }

    #[test]
    fn persistence_of_identical_partitions_is_one() {
        let g = named_graph(&["a", "b", "c", "d"], &[(0, 1), (2, 3)]);
        let p = Partition::from_dense_labels(vec![0, 0, 1, 1], 2);
        let nmi = community_persistence(&g, &p, &g, &p).unwrap();
        assert!((nmi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refinement_nmi_matches_hand_formula() {
        // 8 nodes: coarse 2 groups of 4, fine 4 groups of 2
        let g = named_graph(
            &["a", "b", "c", "d", "e", "f", "g", "h"],
            &[(0, 1)],
        );
        let coarse = Partition::from_dense_labels(vec![0, 0, 0, 0, 1, 1, 1, 1], 2);
        let fine = Partition::from_dense_labels(vec![0, 0, 1, 1, 2, 2, 3, 3], 4);
        let nmi = community_persistence(&g, &coarse, &g, &fine).unwrap();
        // MI = H(coarse) for a refinement, so NMI = 2 H_c / (H_c + H_f)
        let hc = (2f64).ln();
        let hf = (4f64).ln();
        let expected = 2.0 * hc / (hc + hf);
        assert!((nmi - expected).abs() < 1e-12);
    }

    #[test]
    fn comod_fixture_weights() {
        let prs = vec![
            pr("18042", &["Data.Nat.Defs", "Data.Nat.Order", "Data.Int.Defs"]),
            pr("18107", &["Data.Nat.Defs", "Data.Int.Defs"]),
            pr("18253", &["Algebra.Group.Defs", "Data.Nat.Order"]),
        ];
        let g = build_comod_graph(&prs);
        assert_eq!(g.edge_count(), 4);
        let weight_of = |a: &str, b: &str| -> u32 {
            let ia = g.modules.iter().position(|m| m == a).unwrap() as u32;
            let ib = g.modules.iter().position(|m| m == b).unwrap() as u32;
            let key = if ia < ib { (ia, ib) } else { (ib, ia) };
            g.pair_weights[&key]
        };
        assert_eq!(weight_of("Data.Nat.Defs", "Data.Int.Defs"), 2);
        assert_eq!(weight_of("Data.Nat.Defs", "Data.Nat.Order"), 1);
        assert_eq!(weight_of("Data.Int.Defs", "Data.Nat.Order"), 1);
        assert_eq!(weight_of("Algebra.Group.Defs", "Data.Nat.Order"), 1);
    }

    #[test]
    fn single_file_prs_give_empty_graph() {
        let g = build_comod_graph(&[pr("1", &["A"]), pr("2", &["B"])]);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn one_pr_with_three_files_is_a_triangle() {
        let g = build_comod_graph(&[pr("1", &["A", "B", "C"])]);
        assert_eq!(g.edge_count(), 3);
        assert!(g.pair_weights.values().all(|&w| w == 1));
    }

    #[test]
    fn hidden_dependency_detected() {
        let prs = vec![
            pr("18042", &["Data.Nat.Defs", "Data.Nat.Order", "Data.Int.Defs"]),
            pr("18107", &["Data.Nat.Defs", "Data.Int.Defs"]),
            pr("18253", &["Algebra.Group.Defs", "Data.Nat.Order"]),
        ];
        let comod = build_comod_graph(&prs);
        // imports: Order -> Nat.Defs, Order -> Int.Defs, Int.Defs -> Nat.Defs
        let gm = named_graph(
            &["Algebra.Group.Defs", "Data.Int.Defs", "Data.Nat.Defs", "Data.Nat.Order"],
            &[(3, 2), (3, 1), (1, 2)],
        );
        let overlap = comod_vs_imports(&comod, &gm);
        assert_eq!(overlap.both.len(), 3);
        assert_eq!(overlap.comod_only.len(), 1);
        assert_eq!(overlap.comod_only[0].a, "Algebra.Group.Defs");
        assert_eq!(overlap.comod_only[0].b, "Data.Nat.Order");
        assert!(overlap.import_only.is_empty());
    }

    #[test]
    fn empty_comod_leaves_all_imports() {
        let comod = build_comod_graph(&[]);
        let gm = named_graph(&["A", "B"], &[(0, 1)]);
        let overlap = comod_vs_imports(&comod, &gm);
        assert!(overlap.both.is_empty());
        assert_eq!(overlap.import_only.len(), 1);
    }

    #[test]
    fn comod_weights_match_bruteforce_pair_count() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let files: Vec<String> = (0..12).map(|i| format!("M{i}")).collect();
        let prs: Vec<ComodRecord> = (0..60)
            .map(|i| {
                let count = rng.random_range(1..=5);
                let mut picked: Vec<usize> =
                    rand::seq::index::sample(&mut rng, files.len(), count).into_vec();
                picked.sort_unstable();
                ComodRecord {
                    pr_id: format!("pr{i}"),
                    files: picked
                        .into_iter()
                        .map(|f| DottedName::parse(&files[f]).unwrap())
                        .collect(),
                }
            })
            .collect();
        let g = build_comod_graph(&prs);
        // brute force: nested loop over PRs and file pairs
        let mut brute: BTreeMap<(String, String), u32> = BTreeMap::new();
        for p in &prs {
            for i in 0..p.files.len() {
                for j in (i + 1)..p.files.len() {
                    let (mut a, mut b) = (
                        p.files[i].as_str().to_owned(),
                        p.files[j].as_str().to_owned(),
                    );
                    if b < a {
                        std::mem::swap(&mut a, &mut b);
                    }
                    *brute.entry((a, b)).or_insert(0) += 1;
                }
            }
        }
        assert_eq!(g.edge_count(), brute.len());
        for (&(i, j), &w) in &g.pair_weights {
            let key = (g.name(i).to_owned(), g.name(j).to_owned());
            assert_eq!(brute[&key], w);
        }
    }
}
