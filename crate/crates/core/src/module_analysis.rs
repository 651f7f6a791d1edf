//! Module-layer analyses: transitive reduction and redundancy, the build
//! critical path, name-prefix containment, and the cross-layer import
//! classification and utilization metrics.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::graph::{DepGraph, EdgeRecord, GraphError, NodeId};
use crate::layering::topological_levels;

/// Fixed-width bitset rows used for reachability propagation.
#[derive(Clone)]
struct BitMatrixRow(Vec<u64>);

impl BitMatrixRow {
    fn zeros(n: usize) -> Self {
        BitMatrixRow(vec![0u64; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn or_assign(&mut self, other: &BitMatrixRow) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionResult {
    #[serde(skip)]
    pub graph: DepGraph,
    /// Removed edges as (src, dst), canonical order.
    pub removed: Vec<(NodeId, NodeId)>,
    pub original_edges: usize,
    pub reduced_edges: usize,
    /// removed / original edge count.
    pub redundancy_rate: f64,
}

/// The unique minimal DAG with the same reachability relation.
///
/// An edge (u, v) is removed iff v is reachable from u via a path of
/// length >= 2. Runs one reachable-set propagation pass over a
/// topological order with bitset rows, so memory is |V|^2 / 8 bytes;
/// intended for module-scale graphs.
pub fn transitive_reduction(g: &DepGraph) -> Result<ReductionResult, GraphError> {
    let n = g.node_count();
    let levels = topological_levels(g)?;
    // Process premises before citers: ascending longest-path depth in the
    // transpose direction equals descending level on the stored graph.
    let mut order: Vec<NodeId> = (0..n as NodeId).collect();
    order.sort_unstable_by_key(|&v| std::cmp::Reverse(levels[v as usize]));

    let mut reach: Vec<BitMatrixRow> = vec![BitMatrixRow::zeros(n); n];
    let mut removed: Vec<(NodeId, NodeId)> = Vec::new();
    let mut kept: Vec<EdgeRecord> = Vec::new();

    // position in topological order: u can only reach strictly later nodes
    let mut pos = vec![0u32; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v as usize] = i as u32;
    }

    for &u in &order {
        let mut succ: Vec<NodeId> = g.out_neighbors(u).to_vec();
        // a successor w can only cover v when w -> ... -> v exists, which
        // places w later in `order`; visiting citers first folds every
        // potential coverer into `covered` before v is tested
        succ.sort_unstable_by_key(|&v| std::cmp::Reverse(pos[v as usize]));
        let mut covered = BitMatrixRow::zeros(n);
        let mut reach_u = BitMatrixRow::zeros(n);
        reach_u.set(u as usize);
        for &v in &succ {
            if covered.get(v as usize) {
                removed.push((u, v));
            } else {
                let e = g.edge_index(u, v).expect("successor edge exists");
                kept.push(g.edge_record(e));
            }
            covered.or_assign(&reach[v as usize]);
            reach_u.or_assign(&reach[v as usize]);
        }
        reach[u as usize] = reach_u;
    }

    removed.sort_unstable();
    let reduced = DepGraph::build(g.nodes().to_vec(), kept).expect("reduction is valid");
    let m = g.edge_count();
    Ok(ReductionResult {
        original_edges: m,
        reduced_edges: reduced.edge_count(),
        redundancy_rate: if m == 0 { 0.0 } else { removed.len() as f64 / m as f64 },
        graph: reduced,
        removed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPath {
    /// Node ids along the maximum-weight path, in edge direction.
    pub path: Vec<NodeId>,
    /// Sum of node weights along the path, seconds.
    pub total_weight: f64,
    /// Sum of all node weights (the sequential build time).
    pub sequential_weight: f64,
    /// sequential / total: the build-time speedup bound.
    pub speedup: f64,
    /// |V| / path node count.
    pub parallelism_ratio: f64,
}

/// The maximum node-weight directed path of an acyclic build graph.
/// Ties are broken toward the lexicographically smallest id sequence.
pub fn critical_path(g: &DepGraph, weights: &[f64]) -> Result<CriticalPath, GraphError> {
    assert_eq!(weights.len(), g.node_count());
    let n = g.node_count();
    if n == 0 {
        return Ok(CriticalPath {
            path: Vec::new(),
            total_weight: 0.0,
            sequential_weight: 0.0,
            speedup: 0.0,
            parallelism_ratio: 0.0,
        });
    }
    let levels = topological_levels(g)?;
    let mut order: Vec<NodeId> = (0..n as NodeId).collect();
    // sinks first so best[] is ready when a node is processed
    order.sort_unstable_by_key(|&v| std::cmp::Reverse(levels[v as usize]));

    let mut best = vec![0.0f64; n];
    let mut next: Vec<Option<NodeId>> = vec![None; n];
    for &v in &order {
        // out-neighbors ascend by id, so a strict comparison keeps the
        // smallest id among maximal tails
        let mut best_tail = 0.0;
        let mut best_next = None;
        for &w in g.out_neighbors(v) {
            let tail = best[w as usize];
            if best_next.is_none() || tail > best_tail {
                best_tail = tail;
                best_next = Some(w);
            }
        }
        best[v as usize] = weights[v as usize] + best_tail;
        next[v as usize] = best_next;
    }

    let mut start = 0 as NodeId;
    for v in 1..n as NodeId {
        if best[v as usize] > best[start as usize] {
            start = v;
        }
    }
    let mut path = vec![start];
    let mut v = start;
    while let Some(w) = next[v as usize] {
        path.push(w);
        v = w;
    }
    let total_weight = best[start as usize];
    let sequential_weight: f64 = weights.iter().sum();
    Ok(CriticalPath {
        speedup: if total_weight > 0.0 { sequential_weight / total_weight } else { 0.0 },
        parallelism_ratio: n as f64 / path.len() as f64,
        path,
        total_weight,
        sequential_weight,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Containment {
    pub ratio: f64,
    pub group_count: usize,
    pub intra_edges: usize,
}

/// Fraction of edges whose endpoints share their first `k` name
/// components; groups are the distinct truncations over all nodes.
pub fn module_containment(g: &DepGraph, k: usize) -> Containment {
    assert!(k >= 1);
    let trunc: Vec<_> = g.nodes().iter().map(|r| r.name.truncated(k)).collect();
    let groups: BTreeSet<_> = trunc.iter().cloned().collect();
    let intra = g
        .edges()
        .filter(|&(_, s, d)| trunc[s as usize] == trunc[d as usize])
        .count();
    let m = g.edge_count();
    Containment {
        ratio: if m == 0 { 0.0 } else { intra as f64 / m as f64 },
        group_count: groups.len(),
        intra_edges: intra,
    }
}

/// Maps each declaration of `gd` to the node id of its containing module
/// in `gm`, by module name; `None` where the record has no module or the
/// module is not a node of `gm`.
pub fn map_decls_to_modules(gd: &DepGraph, gm: &DepGraph) -> Vec<Option<NodeId>> {
    let index: HashMap<&str, NodeId> = gm
        .nodes()
        .iter()
        .map(|r| (r.name.as_str(), r.id))
        .collect();
    gd.nodes()
        .iter()
        .map(|r| r.module.as_ref().and_then(|m| index.get(m.as_str()).copied()))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ImportClassification {
    /// Import edges whose file-aggregated counterpart exists.
    pub active_imports: usize,
    /// Import edges with no declaration-level traffic.
    pub unused_imports: usize,
    /// Per-import-edge active flags, aligned with gm's canonical order.
    #[serde(skip)]
    pub active_flags: Vec<bool>,
    /// Distinct cross-file declaration dependency pairs.
    pub file_pairs: usize,
    /// Pairs backed by a direct import edge.
    pub direct: usize,
    /// Pairs reachable through the import graph but not direct.
    pub transitive: usize,
    /// Pairs not reachable at all in the import graph.
    pub unreachable: usize,
    /// Declaration edges excluded for lacking a module mapping.
    pub excluded_decl_edges: usize,
}

/// Classifies import edges as active/unused against the file-aggregated
/// graph, and cross-file declaration dependencies as direct, transitive,
/// or unreachable with respect to the import graph.
pub fn classify_import_edges(
    gm: &DepGraph,
    gd: &DepGraph,
    decl_module: &[Option<NodeId>],
) -> ImportClassification {
    let mut pairs: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    let mut excluded = 0usize;
    for (_, src, dst) in gd.edges() {
        match (decl_module[src as usize], decl_module[dst as usize]) {
            (Some(a), Some(b)) if a != b => {
                pairs.insert((a, b));
            }
            (Some(_), Some(_)) => {}
            _ => excluded += 1,
        }
    }

    let mut active_flags = Vec::with_capacity(gm.edge_count());
    let mut active = 0usize;
    for (_, src, dst) in gm.edges() {
        let is_active = pairs.contains(&(src, dst));
        active_flags.push(is_active);
        active += is_active as usize;
    }

    // full reachability of gm via reverse-topological bitset propagation;
    // gm is module-scale so |V|^2 bits is fine
    let reach = reachability_bitsets(gm);

    let mut direct = 0usize;
    let mut transitive = 0usize;
    let mut unreachable = 0usize;
    for &(a, b) in &pairs {
        if gm.has_edge(a, b) {
            direct += 1;
        } else if reach[a as usize].get(b as usize) {
            transitive += 1;
        } else {
            unreachable += 1;
        }
    }

    ImportClassification {
        active_imports: active,
        unused_imports: gm.edge_count() - active,
        active_flags,
        file_pairs: pairs.len(),
        direct,
        transitive,
        unreachable,
        excluded_decl_edges: excluded,
    }
}

/// reach[u] contains v iff a directed path u -> ... -> v exists (v != u
/// unless on a cycle). Works on cyclic graphs via SCC condensation.
fn reachability_bitsets(g: &DepGraph) -> Vec<BitMatrixRow> {
    let n = g.node_count();
    let mut reach: Vec<BitMatrixRow> = vec![BitMatrixRow::zeros(n); n];
    match topological_levels(g) {
        Ok(levels) => {
            let mut order: Vec<NodeId> = (0..n as NodeId).collect();
            order.sort_unstable_by_key(|&v| std::cmp::Reverse(levels[v as usize]));
            for &u in &order {
                let mut row = BitMatrixRow::zeros(n);
                for &v in g.out_neighbors(u) {
                    row.set(v as usize);
                    row.or_assign(&reach[v as usize]);
                }
                reach[u as usize] = row;
            }
        }
        Err(_) => {
            // cyclic input: per-node DFS (import graphs are DAGs in
            // practice; this path keeps the function total)
            for u in 0..n as NodeId {
                let mut row = BitMatrixRow::zeros(n);
                let mut stack = vec![u];
                let mut seen = vec![false; n];
                seen[u as usize] = true;
                while let Some(v) = stack.pop() {
                    for &w in g.out_neighbors(v) {
                        if !seen[w as usize] {
                            seen[w as usize] = true;
                            row.set(w as usize);
                            stack.push(w);
                        }
                    }
                }
                reach[u as usize] = row;
            }
        }
    }
    reach
}

#[derive(Debug, Clone, Serialize)]
pub struct UtilizationEdge {
    pub importer: String,
    pub imported: String,
    pub referenced: usize,
    pub defined: usize,
    pub utilization: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UtilizationSummary {
    pub per_edge: Vec<UtilizationEdge>,
    pub median: f64,
    pub mean: f64,
    pub iqr: (f64, f64),
    pub zero_count: usize,
    pub considered_edges: usize,
    /// Import edges into declaration-free modules, excluded from stats.
    pub excluded_edges: usize,
}

/// Import utilization: for each import edge (mi, mj), the fraction of
/// mj's declarations that mi's declarations actually reference.
pub fn import_utilization(
    gm: &DepGraph,
    gd: &DepGraph,
    decl_module: &[Option<NodeId>],
) -> UtilizationSummary {
    let n_mod = gm.node_count();
    let mut defined = vec![0usize; n_mod];
    for m in decl_module.iter().flatten() {
        defined[*m as usize] += 1;
    }

    // distinct premises referenced per (importer, premise module)
    let mut decls_by_module: Vec<Vec<NodeId>> = vec![Vec::new(); n_mod];
    for (d, m) in decl_module.iter().enumerate() {
        if let Some(m) = m {
            decls_by_module[*m as usize].push(d as NodeId);
        }
    }

    let mut per_edge = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut zero_count = 0usize;
    let mut excluded = 0usize;

    for mi in 0..n_mod as NodeId {
        let imports = gm.out_neighbors(mi);
        if imports.is_empty() {
            continue;
        }
        // distinct referenced declarations grouped by their module
        let mut refs_by_module: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for &d in &decls_by_module[mi as usize] {
            for &p in gd.out_neighbors(d) {
                if let Some(pm) = decl_module[p as usize] {
                    refs_by_module.entry(pm).or_default().insert(p);
                }
            }
        }
        for &mj in imports {
            if defined[mj as usize] == 0 {
                excluded += 1;
                continue;
            }
            let referenced = refs_by_module.get(&mj).map_or(0, BTreeSet::len);
            let util = referenced as f64 / defined[mj as usize] as f64;
            if util == 0.0 {
                zero_count += 1;
            }
            values.push(util);
            per_edge.push(UtilizationEdge {
                importer: gm.node(mi).name.as_str().to_owned(),
                imported: gm.node(mj).name.as_str().to_owned(),
                referenced,
                defined: defined[mj as usize],
                utilization: util,
            });
        }
    }

    values.sort_by(f64::total_cmp);
    let quantile = |q: f64| -> f64 {
        if values.is_empty() {
            return 0.0;
        }
        let pos = q * (values.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        values[lo] + (values[hi] - values[lo]) * (pos - lo as f64)
    };
    UtilizationSummary {
        median: quantile(0.5),
        mean: if values.is_empty() { 0.0 } else { values.iter().sum::<f64>() / values.len() as f64 },
        iqr: (quantile(0.25), quantile(0.75)),
        zero_count,
        considered_edges: values.len(),
        excluded_edges: excluded,
        per_edge,
    }
}
