//! Derived layers (namespace graphs at depth k, the file-aggregated graph)
//! and boundary metrics: containment, cohesion, edge breakdown, depth
//! asymmetry, cross-group pairs, zero-citation rates.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::graph::{DeclKind, DepGraph, EdgeRecord, NodeId, NodeRecord};
use crate::name::DottedName;
use crate::partition::Grouping;

/// Truncates a declaration name to its depth-`k` namespace.
///
/// A name with at least k+1 components keeps its first k; a shorter name
/// with at least one dot falls back to its full parent namespace; a
/// dotless name maps to the `_root_` sentinel.
pub fn truncate_namespace(name: &DottedName, k: usize) -> DottedName {
    debug_assert!(k >= 1);
    let depth = name.depth();
    if depth > k {
        name.truncated(k)
    } else if depth >= 2 {
        name.parent().expect("depth >= 2 has a parent")
    } else {
        DottedName::root()
    }
}

/// A namespace graph together with per-key internal edge counts.
#[derive(Debug, Clone)]
pub struct NsAggregate {
    /// Weighted graph over distinct namespace keys (`kind = namespace`).
    /// Edge weight = number of aggregated declaration edges.
    pub graph: DepGraph,
    /// internal[key node id] = declaration edges staying inside the key.
    pub internal: Vec<u64>,
    pub depth: usize,
}

impl NsAggregate {
    pub fn total_weight(&self) -> f64 {
        (0..self.graph.edge_count()).map(|e| self.graph.weight(e)).sum()
    }

    pub fn internal_total(&self) -> u64 {
        self.internal.iter().sum()
    }

    /// Node id of the `_root_` sentinel, if any declaration mapped to it.
    pub fn root_key(&self) -> Option<NodeId> {
        self.graph
            .nodes()
            .iter()
            .find(|n| n.name.is_root())
            .map(|n| n.id)
    }
}

/// Aggregates a declaration graph to depth-`k` namespaces. Nodes are the
/// distinct keys (sorted); cross-key edges carry the aggregated edge count
/// as weight; intra-key edges are tallied separately per key.
pub fn build_ns_graph(gd: &DepGraph, k: usize) -> NsAggregate {
    let keys: Vec<DottedName> = gd
        .nodes()
        .iter()
        .map(|n| truncate_namespace(&n.name, k))
        .collect();
    let mut distinct: Vec<DottedName> = keys.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let index: std::collections::HashMap<&DottedName, u32> = distinct
        .iter()
        .enumerate()
        .map(|(i, n)| (n, i as u32))
        .collect();
    let key_of: Vec<u32> = keys.iter().map(|n| index[n]).collect();

    let mut internal = vec![0u64; distinct.len()];
    let mut cross: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for (_, src, dst) in gd.edges() {
        let (a, b) = (key_of[src as usize], key_of[dst as usize]);
        if a == b {
            internal[a as usize] += 1;
        } else {
            *cross.entry((a, b)).or_insert(0.0) += 1.0;
        }
    }

    let nodes: Vec<NodeRecord> = distinct
        .iter()
        .enumerate()
        .map(|(i, name)| NodeRecord::new(i as NodeId, name.clone(), DeclKind::Namespace))
        .collect();
    let edges: Vec<EdgeRecord> = cross
        .into_iter()
        .map(|((a, b), w)| EdgeRecord::new(a, b).with_weight(w))
        .collect();
    let graph = DepGraph::build(nodes, edges).expect("aggregated graph is valid");
    NsAggregate {
        graph,
        internal,
        depth: k,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContainmentDenominator {
    /// All edges of the graph.
    All,
    /// Only edges with both endpoints mapped by the grouping.
    Covered,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentRatio {
    pub intra_edges: usize,
    pub denominator_edges: usize,
    pub ratio: f64,
}

/// Fraction of edges whose endpoints share a group.
pub fn containment_ratio(
    g: &DepGraph,
    grouping: &Grouping,
    denominator: ContainmentDenominator,
) -> ContainmentRatio {
    let mut intra = 0usize;
    let mut covered = 0usize;
    for (_, src, dst) in g.edges() {
        if let (Some(a), Some(b)) = (grouping.group_of(src), grouping.group_of(dst)) {
            covered += 1;
            if a == b {
                intra += 1;
            }
        }
    }
    let denom = match denominator {
        ContainmentDenominator::All => g.edge_count(),
        ContainmentDenominator::Covered => covered,
    };
    ContainmentRatio {
        intra_edges: intra,
        denominator_edges: denom,
        ratio: if denom == 0 { 0.0 } else { intra as f64 / denom as f64 },
    }
}

#[derive(Debug, Clone)]
pub struct FileAggregate {
    /// Weighted graph over modules; edges are distinct cross-file pairs.
    pub graph: DepGraph,
    /// Declaration edges skipped because an endpoint had no module.
    pub unmapped_edges: usize,
    /// Declaration edges staying inside one file.
    pub intra_edges: usize,
}

/// Aggregates declaration edges to their containing files, keeping
/// cross-file pairs only.
pub fn aggregate_to_files(gd: &DepGraph, modules: &Grouping) -> FileAggregate {
    let mut cross: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    let mut unmapped = 0usize;
    let mut intra = 0usize;
    for (_, src, dst) in gd.edges() {
        match (modules.group_of(src), modules.group_of(dst)) {
            (Some(a), Some(b)) if a != b => {
                *cross.entry((a, b)).or_insert(0.0) += 1.0;
            }
            (Some(_), Some(_)) => intra += 1,
            _ => unmapped += 1,
        }
    }
    let nodes: Vec<NodeRecord> = modules
        .names()
        .iter()
        .enumerate()
        .map(|(i, name)| {
            NodeRecord::new(
                i as NodeId,
                DottedName::parse(name).expect("module names are valid"),
                DeclKind::Module,
            )
        })
        .collect();
    let edges: Vec<EdgeRecord> = cross
        .into_iter()
        .map(|((a, b), w)| EdgeRecord::new(a, b).with_weight(w))
        .collect();
    FileAggregate {
        graph: DepGraph::build(nodes, edges).expect("file aggregate is valid"),
        unmapped_edges: unmapped,
        intra_edges: intra,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohesionRow {
    pub module: String,
    pub internal: usize,
    pub external: usize,
    pub cohesion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohesionTable {
    pub rows: Vec<CohesionRow>,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub max: f64,
    pub zero_count: usize,
}

/// Per-module cohesion: the fraction of a module's incident declaration
/// edges that stay inside it. External edges use exclusive-or membership;
/// a module with no incident edges has cohesion 0.
pub fn module_cohesion(gd: &DepGraph, modules: &Grouping) -> CohesionTable {
    let g_count = modules.group_count();
    let mut internal = vec![0usize; g_count];
    let mut external = vec![0usize; g_count];
    for (_, src, dst) in gd.edges() {
        match (modules.group_of(src), modules.group_of(dst)) {
            (Some(a), Some(b)) if a == b => internal[a as usize] += 1,
            (Some(a), Some(b)) => {
                external[a as usize] += 1;
                external[b as usize] += 1;
            }
            (Some(a), None) => external[a as usize] += 1,
            (None, Some(b)) => external[b as usize] += 1,
            (None, None) => {}
        }
    }
    let rows: Vec<CohesionRow> = (0..g_count)
        .map(|m| {
            let (i, e) = (internal[m], external[m]);
            CohesionRow {
                module: modules.name_of(m as u32).to_owned(),
                internal: i,
                external: e,
                cohesion: if i + e == 0 { 0.0 } else { i as f64 / (i + e) as f64 },
            }
        })
        .collect();
    let values: Vec<f64> = rows.iter().map(|r| r.cohesion).collect();
    let n = values.len();
    let (mean, median, std, max) = if n == 0 {
        (0.0, 0.0, 0.0, 0.0)
    } else {
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        (mean, sorted[(n - 1) / 2], var.sqrt(), *sorted.last().unwrap())
    };
    CohesionTable {
        zero_count: values.iter().filter(|&&v| v == 0.0).count(),
        rows,
        mean,
        median,
        std,
        max,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryBreakdown {
    pub same_module: usize,
    pub cross_module_same_namespace: usize,
    pub cross_namespace: usize,
    pub missing_info: usize,
}

impl BoundaryBreakdown {
    pub fn total(&self) -> usize {
        self.same_module + self.cross_module_same_namespace + self.cross_namespace + self.missing_info
    }
}

/// Partitions edges into {same module, cross-module same namespace,
/// cross-namespace, missing module info}; the four counts sum to |E|.
pub fn edge_boundary_breakdown(
    gd: &DepGraph,
    modules: &Grouping,
    namespaces: &Grouping,
) -> BoundaryBreakdown {
    let mut b = BoundaryBreakdown {
        same_module: 0,
        cross_module_same_namespace: 0,
        cross_namespace: 0,
        missing_info: 0,
    };
    for (_, src, dst) in gd.edges() {
        match (modules.group_of(src), modules.group_of(dst)) {
            (Some(a), Some(bm)) => {
                if a == bm {
                    b.same_module += 1;
                } else {
                    match (namespaces.group_of(src), namespaces.group_of(dst)) {
                        (Some(x), Some(y)) if x == y => b.cross_module_same_namespace += 1,
                        _ => b.cross_namespace += 1,
                    }
                }
            }
            _ => b.missing_info += 1,
        }
    }
    b
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthAsymmetry {
    pub same_pct: f64,
    pub source_deeper_pct: f64,
    pub target_deeper_pct: f64,
    pub mean_diff: f64,
    pub edges: usize,
}

/// Per-edge naming-depth comparison; diff = depth(src) - depth(dst).
pub fn depth_asymmetry(g: &DepGraph, depth: &[u32]) -> DepthAsymmetry {
    let mut same = 0usize;
    let mut deeper = 0usize;
    let mut shallower = 0usize;
    let mut sum = 0i64;
    let m = g.edge_count();
    for (_, src, dst) in g.edges() {
        let (a, b) = (depth[src as usize] as i64, depth[dst as usize] as i64);
        sum += a - b;
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => same += 1,
            std::cmp::Ordering::Greater => deeper += 1,
            std::cmp::Ordering::Less => shallower += 1,
        }
    }
    let pct = |c: usize| if m == 0 { 0.0 } else { 100.0 * c as f64 / m as f64 };
    DepthAsymmetry {
        same_pct: pct(same),
        source_deeper_pct: pct(deeper),
        target_deeper_pct: pct(shallower),
        mean_diff: if m == 0 { 0.0 } else { sum as f64 / m as f64 },
        edges: m,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthDeltaRow {
    pub group: String,
    pub modules: usize,
    pub mean_import_depth: f64,
    pub mean_use_depth: f64,
    pub mean_delta: f64,
    pub median_delta: f64,
}

/// Per-group mean "use depth minus import depth": for each module, the mean
/// naming depth of the distinct modules it imports versus the distinct
/// modules whose declarations it actually cites. Restricted to modules
/// where both means are defined.
pub fn depth_difference_by_group(
    gm: &DepGraph,
    gd: &DepGraph,
    decl_module: &[Option<NodeId>],
    module_group: &Grouping,
) -> Vec<DepthDeltaRow> {
    let n_mod = gm.node_count();
    let depth_of: Vec<f64> = gm.nodes().iter().map(|r| r.name.depth() as f64).collect();

    let mut used: Vec<std::collections::BTreeSet<NodeId>> = vec![Default::default(); n_mod];
    for (_, src, dst) in gd.edges() {
        if let (Some(a), Some(b)) = (decl_module[src as usize], decl_module[dst as usize]) {
            if a != b {
                used[a as usize].insert(b);
            }
        }
    }

    let mut deltas_by_group: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    let mut imp_by_group: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    let mut use_by_group: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for v in 0..n_mod as NodeId {
        let imports = gm.out_neighbors(v);
        let uses = &used[v as usize];
        if imports.is_empty() || uses.is_empty() {
            continue;
        }
        let Some(group) = module_group.group_of(v) else {
            continue;
        };
        let d_imp =
            imports.iter().map(|&w| depth_of[w as usize]).sum::<f64>() / imports.len() as f64;
        let d_use = uses.iter().map(|&w| depth_of[w as usize]).sum::<f64>() / uses.len() as f64;
        deltas_by_group.entry(group).or_default().push(d_use - d_imp);
        imp_by_group.entry(group).or_default().push(d_imp);
        use_by_group.entry(group).or_default().push(d_use);
    }

    deltas_by_group
        .into_iter()
        .map(|(group, mut deltas)| {
            let n = deltas.len();
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            deltas.sort_by(f64::total_cmp);
            DepthDeltaRow {
                group: module_group.name_of(group).to_owned(),
                modules: n,
                mean_import_depth: mean(&imp_by_group[&group]),
                mean_use_depth: mean(&use_by_group[&group]),
                mean_delta: mean(&deltas),
                median_delta: deltas[(n - 1) / 2],
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRow {
    pub a: String,
    pub b: String,
    pub weight: f64,
}

/// Unordered group pairs ranked by summed bidirectional weight, descending,
/// ties by name.
pub fn cross_group_pairs(wg: &DepGraph, top_k: usize) -> Vec<PairRow> {
    let mut pair_weight: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
    for (e, src, dst) in wg.edges() {
        let key = if src < dst { (src, dst) } else { (dst, src) };
        *pair_weight.entry(key).or_insert(0.0) += wg.weight(e);
    }
    let mut rows: Vec<PairRow> = pair_weight
        .into_iter()
        .map(|((a, b), weight)| {
            let (mut na, mut nb) = (
                wg.node(a).name.as_str().to_owned(),
                wg.node(b).name.as_str().to_owned(),
            );
            if nb < na {
                std::mem::swap(&mut na, &mut nb);
            }
            PairRow { a: na, b: nb, weight }
        })
        .collect();
    rows.sort_by(|x, y| {
        y.weight
            .total_cmp(&x.weight)
            .then_with(|| x.a.cmp(&y.a))
            .then_with(|| x.b.cmp(&y.b))
    });
    rows.truncate(top_k);
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroCitationRow {
    pub group: String,
    pub total: usize,
    pub zero: usize,
    pub rate: f64,
}

/// Per-group zero-citation rates among nodes passing the kind filter.
/// Groups smaller than `min_group` (after filtering) are suppressed. Rows
/// are ordered by rate descending, ties by group name.
pub fn zero_citation_by_group(
    gd: &DepGraph,
    grouping: &Grouping,
    kinds: Option<&[DeclKind]>,
    min_group: usize,
) -> Vec<ZeroCitationRow> {
    assert!(min_group >= 1);
    let mut total = vec![0usize; grouping.group_count()];
    let mut zero = vec![0usize; grouping.group_count()];
    for v in gd.node_ids() {
        if let Some(filter) = kinds {
            if !filter.contains(&gd.node(v).kind) {
                continue;
            }
        }
        let Some(g) = grouping.group_of(v) else {
            continue;
        };
        total[g as usize] += 1;
        if gd.in_degree(v) == 0 {
            zero[g as usize] += 1;
        }
    }
    let mut rows: Vec<ZeroCitationRow> = (0..grouping.group_count())
        .filter(|&g| total[g] >= min_group)
        .map(|g| ZeroCitationRow {
            group: grouping.name_of(g as u32).to_owned(),
            total: total[g],
            zero: zero[g],
            rate: zero[g] as f64 / total[g] as f64,
        })
        .collect();
    rows.sort_by(|x, y| y.rate.total_cmp(&x.rate).then_with(|| x.group.cmp(&y.group)));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeRecord, NodeRecord};

    fn decl_graph(names: &[(&str, Option<&str>)], pairs: &[(NodeId, NodeId)]) -> DepGraph {
        let nodes = names
            .iter()
            .enumerate()
            .map(|(i, (name, module))| {
                let mut r = NodeRecord::new(
                    i as NodeId,
                    DottedName::parse(name).unwrap(),
                    DeclKind::Theorem,
                );
                r.module = module.map(|m| DottedName::parse(m).unwrap());
                r
            })
            .collect();
        let edges = pairs.iter().map(|&(s, d)| EdgeRecord::new(s, d)).collect();
        DepGraph::build(nodes, edges).unwrap()
    }

    /// succ_eq_add_one, zero_add in Data.Nat.Defs; add_comm, add_left_comm
    /// in Data.Nat.Basic; Eq.refl in Init.Prelude. Six dependency edges.
    fn three_views() -> DepGraph {
        decl_graph(
            &[
                ("Nat.succ_eq_add_one", Some("Data.Nat.Defs")),
                ("Nat.zero_add", Some("Data.Nat.Defs")),
                ("Nat.add_comm", Some("Data.Nat.Basic")),
                ("Nat.add_left_comm", Some("Data.Nat.Basic")),
                ("Eq.refl", Some("Init.Prelude")),
            ],
            &[(3, 2), (0, 2), (2, 4), (3, 4), (0, 4), (1, 4)],
        )
    }

    #[test]
    fn truncation_rules() {
        let t = |s: &str, k: usize| {
            truncate_namespace(&DottedName::parse(s).unwrap(), k)
                .as_str()
                .to_owned()
        };
        assert_eq!(t("Nat.Prime.dvd_mul", 2), "Nat.Prime");
        assert_eq!(t("Nat.add_comm", 2), "Nat");
        assert_eq!(t("funext", 1), "_root_");
    }

    #[test]
    fn ns_aggregation_fixture_depth_2_and_1() {
        // add_comm, add_left_comm, Primrec.zero, succ_eq_one, zero_add
        let g = decl_graph(
            &[
                ("Nat.add_comm", None),
                ("Nat.add_left_comm", None),
                ("Nat.Primrec.zero", None),
                ("Nat.succ_eq_one", None),
                ("Nat.zero_add", None),
            ],
            &[(1, 0), (3, 0), (4, 1), (2, 0)],
        );
        let agg2 = build_ns_graph(&g, 2);
        assert_eq!(agg2.graph.node_count(), 2);
        assert_eq!(agg2.graph.edge_count(), 1);
        let (e, src, dst) = agg2.graph.edges().next().unwrap();
        assert_eq!(agg2.graph.node(src).name.as_str(), "Nat.Primrec");
        assert_eq!(agg2.graph.node(dst).name.as_str(), "Nat");
        assert_eq!(agg2.graph.weight(e), 1.0);
        assert_eq!(agg2.internal[dst as usize], 3);

        let agg1 = build_ns_graph(&g, 1);
        assert_eq!(agg1.graph.node_count(), 1);
        assert_eq!(agg1.graph.edge_count(), 0);
        assert_eq!(agg1.internal_total(), 4);
    }

    #[test]
    fn aggregation_creates_cycles() {
        let g = decl_graph(
            &[
                ("Nat.prime_iff_prime_int", None),
                ("Nat.lcm", None),
                ("Int.dvd_natAbs", None),
                ("Int.lcm_neg", None),
            ],
            &[(0, 2), (3, 1)],
        );
        assert!(crate::components::find_cycle(&g).is_none());
        let agg = build_ns_graph(&g, 2);
        assert_eq!(agg.graph.node_count(), 2);
        assert_eq!(agg.graph.edge_count(), 2);
        assert!(crate::components::find_cycle(&agg.graph).is_some());
    }

    #[test]
    fn containment_constant_grouping_is_one() {
        let g = three_views();
        let c = containment_ratio(
            &g,
            &Grouping::constant(g.node_count(), "all"),
            ContainmentDenominator::All,
        );
        assert_eq!(c.ratio, 1.0);
    }

    #[test]
    fn file_aggregation_of_three_views() {
        let g = three_views();
        let modules = Grouping::by_module(&g);
        let agg = aggregate_to_files(&g, &modules);
        assert_eq!(agg.graph.node_count(), 3);
        assert_eq!(agg.graph.edge_count(), 3);
        assert_eq!(agg.intra_edges, 1);
        let name = |v: NodeId| agg.graph.node(v).name.as_str().to_owned();
        let pairs: Vec<(String, String, f64)> = agg
            .graph
            .edges()
            .map(|(e, s, d)| (name(s), name(d), agg.graph.weight(e)))
            .collect();
        assert!(pairs.contains(&("Data.Nat.Defs".into(), "Data.Nat.Basic".into(), 1.0)));
        assert!(pairs.contains(&("Data.Nat.Basic".into(), "Init.Prelude".into(), 2.0)));
        assert!(pairs.contains(&("Data.Nat.Defs".into(), "Init.Prelude".into(), 2.0)));
    }

    #[test]
    fn all_in_one_file_aggregates_to_empty() {
        let g = decl_graph(
            &[("A.x", Some("M")), ("A.y", Some("M"))],
            &[(0, 1)],
        );
        let agg = aggregate_to_files(&g, &Grouping::by_module(&g));
        assert_eq!(agg.graph.edge_count(), 0);
        assert_eq!(agg.intra_edges, 1);
    }

    #[test]
    fn cohesion_of_three_views() {
        let g = three_views();
        let table = module_cohesion(&g, &Grouping::by_module(&g));
        let basic = table
            .rows
            .iter()
            .find(|r| r.module == "Data.Nat.Basic")
            .unwrap();
        assert_eq!(basic.internal, 1);
        assert_eq!(basic.external, 3);
        assert!((basic.cohesion - 0.25).abs() < 1e-12);
    }

    #[test]
    fn isolated_module_has_cohesion_one() {
        let g = decl_graph(&[("A.x", Some("M")), ("A.y", Some("M"))], &[(0, 1)]);
        let table = module_cohesion(&g, &Grouping::by_module(&g));
        assert_eq!(table.rows[0].cohesion, 1.0);
        assert_eq!(table.max, 1.0);
    }

    #[test]
    fn breakdown_is_exhaustive() {
        let g = three_views();
        let b = edge_boundary_breakdown(&g, &Grouping::by_module(&g), &Grouping::by_namespace(&g, 1));
        assert_eq!(b.total(), g.edge_count());
        assert_eq!(b.same_module, 1);
        // 5 cross-module edges: 1 within Nat, 4 into Eq
        assert_eq!(b.cross_module_same_namespace, 1);
        assert_eq!(b.cross_namespace, 4);
        assert_eq!(b.missing_info, 0);
    }

    #[test]
    fn breakdown_single_module_all_in_class_one() {
        let g = decl_graph(&[("A.x", Some("M")), ("A.y", Some("M"))], &[(0, 1)]);
        let b = edge_boundary_breakdown(&g, &Grouping::by_module(&g), &Grouping::by_namespace(&g, 1));
        assert_eq!(b.same_module, 1);
        assert_eq!(b.cross_module_same_namespace + b.cross_namespace + b.missing_info, 0);
    }

    #[test]
    fn breakdown_counts_missing() {
        let g = decl_graph(&[("A.x", Some("M")), ("B.y", None)], &[(0, 1)]);
        let b = edge_boundary_breakdown(&g, &Grouping::by_module(&g), &Grouping::by_namespace(&g, 1));
        assert_eq!(b.missing_info, 1);
        assert_eq!(b.total(), 1);
    }

    #[test]
    fn uniform_depth_fixture() {
        let g = three_views();
        let depth = vec![2u32; g.node_count()];
        let d = depth_asymmetry(&g, &depth);
        assert_eq!(d.same_pct, 100.0);
        assert_eq!(d.mean_diff, 0.0);
    }

    #[test]
    fn pair_weights_sum_both_directions() {
        let nodes = vec![
            NodeRecord::new(0, DottedName::parse("A").unwrap(), DeclKind::Namespace),
            NodeRecord::new(1, DottedName::parse("B").unwrap(), DeclKind::Namespace),
        ];
        let edges = vec![
            EdgeRecord::new(0, 1).with_weight(3.0),
            EdgeRecord::new(1, 0).with_weight(4.0),
        ];
        let g = DepGraph::build(nodes, edges).unwrap();
        let pairs = cross_group_pairs(&g, 5);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].weight, 7.0);
        assert_eq!((pairs[0].a.as_str(), pairs[0].b.as_str()), ("A", "B"));
    }

    #[test]
    fn single_edge_pair() {
        let g = decl_graph(&[("A.x", None), ("B.y", None)], &[(0, 1)]);
        let agg = build_ns_graph(&g, 1);
        let pairs = cross_group_pairs(&agg.graph, 1);
        assert_eq!(pairs.len(), 1);
    }

    #[test]
    fn zero_citation_star() {
        // leaves cite the center: center in-degree > 0, leaves never cited
        let g = decl_graph(
            &[("C.hub", None), ("L.a", None), ("L.b", None), ("L.c", None)],
            &[(1, 0), (2, 0), (3, 0)],
        );
        let rows = zero_citation_by_group(&g, &Grouping::by_namespace(&g, 1), None, 1);
        let get = |name: &str| rows.iter().find(|r| r.group == name).unwrap();
        assert_eq!(get("L").rate, 1.0);
        assert_eq!(get("C").rate, 0.0);
    }

    #[test]
    fn containment_antitone_in_depth() {
        let g = decl_graph(
            &[
                ("A.B.x", None),
                ("A.B.y", None),
                ("A.C.z", None),
                ("D.w", None),
            ],
            &[(0, 1), (0, 2), (1, 3), (2, 3)],
        );
        let c1 = containment_ratio(&g, &Grouping::by_namespace(&g, 1), ContainmentDenominator::All);
        let c2 = containment_ratio(&g, &Grouping::by_namespace(&g, 2), ContainmentDenominator::All);
        assert!(c2.ratio <= c1.ratio);
    }
}
