//! One function per subcommand; each returns the metric payload plus an
//! optional curve for file emission.

use anyhow::{anyhow, bail, Context as _};
use deplens_core::aggregation::{
    build_ns_graph, containment_ratio, cross_group_pairs, depth_asymmetry,
    depth_difference_by_group, edge_boundary_breakdown, module_cohesion,
    ContainmentDenominator,
};
use deplens_core::centrality::{betweenness, group_compare, pagerank, top_k, BetweennessMode};
use deplens_core::community::{compare_partitions, louvain, undirected_projection, UndirectedGraph};
use deplens_core::components::{condense, connected_components, ComponentMode};
use deplens_core::decomp::{
    attribute_stats, def_height_stats, diameter, edge_partition_stats, inter_kind_flow,
    subgraph_by_predicate, tactic_stats,
};
use deplens_core::evolution::{
    build_comod_graph, comod_vs_imports, community_persistence, growth_indicators, hub_turnover,
};
use deplens_core::graph::{degree_stats, DeclKind, DepGraph, Direction, EdgeOrigin, NodeId, Tristate, Visibility};
use deplens_core::ingest::Layer;
use deplens_core::layering::dag_depth_and_widths;
use deplens_core::module_analysis::{
    classify_import_edges, critical_path, import_utilization, map_decls_to_modules,
    module_containment, transitive_reduction,
};
use deplens_core::partition::{Grouping, Partition};
use deplens_core::robustness::{
    remove_and_measure, removal_curve, single_node_impact, RemovalStrategy,
};
use deplens_core::tail_fit::{compare_alternatives, fit_powerlaw};
use serde_json::{json, Value};

use crate::context::{Context, LayerSelector, ResolvedLayer};
use crate::envelope::Curve;

pub type CommandOutput = (Value, Option<Curve>);

pub fn validate(ctx: &mut Context) -> anyhow::Result<(CommandOutput, bool)> {
    let report = deplens_core::ingest::validate(ctx.manifests());
    let accepted = report.accepted();
    Ok(((json!(report), None), accepted))
}

pub fn stats(
    ctx: &mut Context,
    selector: LayerSelector,
    snapshot: Option<&str>,
    metric: &str,
    direction: Direction,
) -> anyhow::Result<CommandOutput> {
    let resolved = ctx.resolve_graph(selector, snapshot)?;
    let g = resolved.graph();
    match metric {
        "degree" => {
            let s = degree_stats(g, direction);
            let mut curve = Curve::new("degree", "count");
            for (d, c) in &s.histogram {
                curve.push(d, c);
            }
            Ok((json!(s), Some(curve)))
        }
        "layers" => {
            // condense first when aggregation introduced cycles
            let profile = match dag_depth_and_widths(g) {
                Ok(p) => json!({"profile": p, "condensed": false}),
                Err(_) => {
                    let (cg, _) = condense(g);
                    json!({"profile": dag_depth_and_widths(&cg)?, "condensed": true})
                }
            };
            let widths = profile["profile"]["widths"]
                .as_array()
                .cloned()
                .unwrap_or_default();
            let mut curve = Curve::new("level", "width");
            for (level, w) in widths.iter().enumerate() {
                curve.push(level, w);
            }
            Ok((profile, Some(curve)))
        }
        "height" => {
            let s = def_height_stats(g.nodes());
            Ok((json!(s), None))
        }
        "attributes" => {
            let s = attribute_stats(g.nodes());
            Ok((json!(s), None))
        }
        "tactics" => {
            let grouping = Grouping::by_namespace(g, 1);
            let s = tactic_stats(g.nodes(), &grouping);
            Ok((json!(s), None))
        }
        "markers" => {
            let marker = Grouping::from_optional_names(
                g.nodes().iter().map(|n| n.marker.clone()).collect(),
            );
            if marker.group_count() == 0 {
                bail!("no nodes carry a marker");
            }
            let pr = pagerank(g, 0.85, 1e-10, 200);
            let cmp = group_compare(g, &marker, &pr);
            Ok((json!(cmp), None))
        }
        "components" => {
            let weak = connected_components(g, ComponentMode::Weak);
            let strong = connected_components(g, ComponentMode::Strong);
            let gcc = if weak.group_count() > 0 { weak.group_size(0) } else { 0 };
            Ok((
                json!({
                    "nodes": g.node_count(),
                    "edges": g.edge_count(),
                    "weak_components": weak.group_count(),
                    "gcc_size": gcc,
                    "gcc_fraction": if g.node_count() == 0 { 0.0 } else { gcc as f64 / g.node_count() as f64 },
                    "strong_components": strong.group_count(),
                }),
                None,
            ))
        }
        other => bail!("unknown stats metric {other:?}"),
    }
}

pub fn reduce(ctx: &mut Context, full: bool) -> anyhow::Result<CommandOutput> {
    let gm = &ctx.module_layer()?.graph;
    let r = transitive_reduction(gm)?;
    let mut payload = json!({
        "original_edges": r.original_edges,
        "reduced_edges": r.reduced_edges,
        "removed_edges": r.removed.len(),
        "redundancy_rate": r.redundancy_rate,
    });
    if full {
        let removed: Vec<[String; 2]> = r
            .removed
            .iter()
            .map(|&(u, v)| {
                [
                    gm.node(u).name.as_str().to_owned(),
                    gm.node(v).name.as_str().to_owned(),
                ]
            })
            .collect();
        payload["removed"] = json!(removed);
    }
    Ok((payload, None))
}

pub fn critical_path_cmd(ctx: &mut Context) -> anyhow::Result<CommandOutput> {
    let layer = ctx.module_layer()?;
    let gm = &layer.graph;
    let (weights, missing, uniform) = match &layer.weights {
        Some(map) => {
            let mut missing = 0usize;
            let weights: Vec<f64> = gm
                .nodes()
                .iter()
                .map(|n| {
                    map.get(n.name.as_str()).copied().unwrap_or_else(|| {
                        missing += 1;
                        0.0
                    })
                })
                .collect();
            (weights, missing, false)
        }
        None => (vec![1.0; gm.node_count()], 0, true),
    };
    let cp = critical_path(gm, &weights)?;
    let path: Vec<String> = cp
        .path
        .iter()
        .map(|&v| gm.node(v).name.as_str().to_owned())
        .collect();
    Ok((
        json!({
            "path": path,
            "path_len": cp.path.len(),
            "total_weight": cp.total_weight,
            "sequential_weight": cp.sequential_weight,
            "speedup": cp.speedup,
            "parallelism_ratio": cp.parallelism_ratio,
            "uniform_weights": uniform,
            "modules_without_weight": missing,
        }),
        None,
    ))
}

pub fn containment(
    ctx: &mut Context,
    selector: LayerSelector,
    snapshot: Option<&str>,
    depth: Option<usize>,
    decay: bool,
) -> anyhow::Result<CommandOutput> {
    let one = |ctx: &mut Context, k: usize| -> anyhow::Result<(usize, f64)> {
        match selector {
            LayerSelector::Module => {
                let c = module_containment(&ctx.module_layer()?.graph, k);
                Ok((c.group_count, c.ratio))
            }
            LayerSelector::Namespace(_) | LayerSelector::Declaration => {
                let gd = &ctx.decl_layer(snapshot)?.graph;
                let grouping = Grouping::by_namespace(gd, k);
                let c = containment_ratio(gd, &grouping, ContainmentDenominator::All);
                Ok((grouping.group_count(), c.ratio))
            }
            LayerSelector::File => {
                let gd = &ctx.decl_layer(snapshot)?.graph;
                let grouping = Grouping::by_module(gd);
                let c = containment_ratio(gd, &grouping, ContainmentDenominator::Covered);
                Ok((grouping.group_count(), c.ratio))
            }
        }
    };
    if decay {
        let max_k = match selector {
            LayerSelector::Module => ctx
                .module_layer()?
                .graph
                .nodes()
                .iter()
                .map(|n| n.name.depth())
                .max()
                .unwrap_or(1),
            _ => 6,
        };
        let mut rows = Vec::new();
        let mut curve = Curve::new("depth", "containment");
        for k in 1..=max_k {
            let (groups, ratio) = one(ctx, k)?;
            curve.push(k, ratio);
            rows.push(json!({"depth": k, "groups": groups, "containment": ratio}));
        }
        Ok((json!({ "decay": rows }), Some(curve)))
    } else {
        let k = match (depth, selector) {
            (Some(k), _) => k,
            (None, LayerSelector::Namespace(k)) => k,
            (None, LayerSelector::File) => 1,
            (None, _) => bail!("containment needs --depth or --decay"),
        };
        let (groups, ratio) = one(ctx, k)?;
        Ok((
            json!({"depth": k, "groups": groups, "containment": ratio}),
            None,
        ))
    }
}

pub fn cohesion(ctx: &mut Context, snapshot: Option<&str>) -> anyhow::Result<CommandOutput> {
    let gd = &ctx.decl_layer(snapshot)?.graph;
    let modules = Grouping::by_module(gd);
    let table = module_cohesion(gd, &modules);
    Ok((
        json!({
            "modules": table.rows.len(),
            "mean": table.mean,
            "median": table.median,
            "std": table.std,
            "max": table.max,
            "zero_cohesion_modules": table.zero_count,
            "zero_cohesion_share": if table.rows.is_empty() { 0.0 } else { table.zero_count as f64 / table.rows.len() as f64 },
        }),
        None,
    ))
}

pub fn utilization(ctx: &mut Context, snapshot: Option<&str>) -> anyhow::Result<CommandOutput> {
    let gm = ctx.module_layer()?.graph.clone();
    let gd = &ctx.decl_layer(snapshot)?.graph;
    let map = map_decls_to_modules(gd, &gm);
    let u = import_utilization(&gm, gd, &map);
    Ok((
        json!({
            "considered_edges": u.considered_edges,
            "excluded_edges": u.excluded_edges,
            "median": u.median,
            "mean": u.mean,
            "iqr": u.iqr,
            "zero_count": u.zero_count,
        }),
        None,
    ))
}

pub fn classify_imports(ctx: &mut Context, snapshot: Option<&str>) -> anyhow::Result<CommandOutput> {
    let gm = ctx.module_layer()?.graph.clone();
    let gd = &ctx.decl_layer(snapshot)?.graph;
    let map = map_decls_to_modules(gd, &gm);
    let c = classify_import_edges(&gm, gd, &map);
    let depth_rows = depth_difference_by_group(&gm, gd, &map, &Grouping::by_top_directory(&gm));
    let import_edges = gm.edge_count();
    let pct = |x: usize, d: usize| if d == 0 { 0.0 } else { 100.0 * x as f64 / d as f64 };
    Ok((
        json!({
            "import_edges": import_edges,
            "active_imports": c.active_imports,
            "unused_imports": c.unused_imports,
            "active_pct": pct(c.active_imports, import_edges),
            "file_pairs": c.file_pairs,
            "direct": c.direct,
            "transitive": c.transitive,
            "unreachable": c.unreachable,
            "direct_pct": pct(c.direct, c.file_pairs),
            "transitive_pct": pct(c.transitive, c.file_pairs),
            "unreachable_pct": pct(c.unreachable, c.file_pairs),
            "excluded_decl_edges": c.excluded_decl_edges,
            "depth_difference_by_directory": depth_rows,
        }),
        None,
    ))
}

pub fn aggregate_ns(
    ctx: &mut Context,
    snapshot: Option<&str>,
    depth: usize,
) -> anyhow::Result<CommandOutput> {
    let gd = &ctx.decl_layer(snapshot)?.graph;
    let agg = build_ns_graph(gd, depth);
    let breakdown = edge_boundary_breakdown(
        gd,
        &Grouping::by_module(gd),
        &Grouping::by_namespace(gd, depth),
    );
    let decl_depth: Vec<u32> = gd
        .nodes()
        .iter()
        .map(|n| (n.name.depth() - 1) as u32)
        .collect();
    let asym = depth_asymmetry(gd, &decl_depth);
    Ok((
        json!({
            "depth": depth,
            "namespaces": agg.graph.node_count(),
            "edges": agg.graph.edge_count(),
            "total_weight": agg.total_weight(),
            "internal_edges": agg.internal_total(),
            "root_namespace_present": agg.root_key().is_some(),
            "boundary_breakdown": breakdown,
            "depth_asymmetry": asym,
        }),
        None,
    ))
}

#[allow(clippy::too_many_arguments)]
pub fn centrality(
    ctx: &mut Context,
    selector: LayerSelector,
    snapshot: Option<&str>,
    measure: &str,
    alpha: f64,
    pivots: Option<usize>,
    seed: Option<u64>,
    k: usize,
) -> anyhow::Result<CommandOutput> {
    let resolved = ctx.resolve_graph(selector, snapshot)?;
    let g = resolved.graph();
    if g.node_count() == 0 {
        bail!("empty graph");
    }
    let labels: Vec<String> = g
        .nodes()
        .iter()
        .map(|n| n.name.as_str().to_owned())
        .collect();
    let (scores, meta) = match measure {
        "pagerank" => {
            let pr = pagerank(g, alpha, 1e-10, 200);
            (pr.scores, json!({"converged": pr.meta.converged, "alpha": alpha}))
        }
        "betweenness" => {
            let mode = match pivots {
                None => BetweennessMode::Exact,
                Some(kp) => {
                    let seed =
                        seed.ok_or_else(|| anyhow!("--pivots requires an explicit --seed"))?;
                    BetweennessMode::Pivots { k: kp, seed }
                }
            };
            let b = betweenness(g, mode, true);
            (b.scores, json!({"pivots": pivots, "seed": seed, "normalized": true}))
        }
        "in-degree" => {
            let scores: Vec<f64> = g.node_ids().map(|v| g.in_degree(v) as f64).collect();
            (scores, json!({}))
        }
        other => bail!("unknown centrality measure {other:?}"),
    };
    let table = top_k(&scores, k.min(labels.len()).max(1), &labels);
    Ok((json!({"measure": measure, "meta": meta, "top": table}), None))
}

pub fn community(
    ctx: &mut Context,
    selector: LayerSelector,
    snapshot: Option<&str>,
    seed: u64,
    resolution: f64,
) -> anyhow::Result<CommandOutput> {
    let resolved = ctx.resolve_graph(selector, snapshot)?;
    let g = resolved.graph();
    // weighted projection only for the aggregated namespace layer
    let ug = match &resolved {
        ResolvedLayer::Aggregated(_) => undirected_projection(g),
        ResolvedLayer::Plain(..) => UndirectedGraph::from_edges(
            g.node_count(),
            g.edges().map(|(_, s, d)| (s, d, 1.0)),
        ),
    };
    let r = louvain(&ug, seed, resolution)?;
    let mut sizes: Vec<usize> = (0..r.partition.group_count())
        .map(|c| r.partition.group_size(c as u32))
        .collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes.truncate(10);
    Ok((
        json!({
            "communities": r.partition.group_count(),
            "modularity": r.modularity,
            "passes": r.passes,
            "seed": r.seed,
            "resolution": r.resolution,
            "largest": sizes,
        }),
        None,
    ))
}

fn named_grouping(
    g: &DepGraph,
    spec: &str,
    seed: Option<u64>,
) -> anyhow::Result<Vec<Option<u32>>> {
    let grouping = match spec {
        "module" | "file" => Grouping::by_module(g),
        "dir" => Grouping::by_top_directory(g),
        "marker" => Grouping::from_optional_names(
            g.nodes().iter().map(|n| n.marker.clone()).collect(),
        ),
        "community" => {
            let seed = seed.ok_or_else(|| anyhow!("partition spec 'community' requires --seed"))?;
            let ug = UndirectedGraph::from_edges(
                g.node_count(),
                g.edges().map(|(_, s, d)| (s, d, 1.0)),
            );
            let r = louvain(&ug, seed, 1.0)?;
            return Ok(g.node_ids().map(|v| Some(r.partition.group_of(v))).collect());
        }
        other => {
            if let Some(depth) = other.strip_prefix("ns:") {
                let k: usize = depth.parse().map_err(|_| anyhow!("bad depth in {other:?}"))?;
                Grouping::by_namespace(g, k)
            } else {
                bail!("unknown partition spec {other:?}; expected community, ns:k, module, dir, or marker")
            }
        }
    };
    Ok(g.node_ids().map(|v| grouping.group_of(v)).collect())
}

pub fn compare_partitions_cmd(
    ctx: &mut Context,
    selector: LayerSelector,
    snapshot: Option<&str>,
    a_spec: &str,
    b_spec: &str,
    seed: Option<u64>,
) -> anyhow::Result<CommandOutput> {
    let resolved = ctx.resolve_graph(selector, snapshot)?;
    let g = resolved.graph();
    let a = named_grouping(g, a_spec, seed)?;
    let b = named_grouping(g, b_spec, seed)?;
    // restrict to nodes labeled on both sides
    let mut la = Vec::new();
    let mut lb = Vec::new();
    for v in 0..g.node_count() {
        if let (Some(x), Some(y)) = (a[v], b[v]) {
            la.push(x);
            lb.push(y);
        }
    }
    if la.is_empty() {
        bail!("no nodes carry both labelings");
    }
    let pa = Partition::normalize(&la);
    let pb = Partition::normalize(&lb);
    let cmp = compare_partitions(&pa, &pb)?;
    Ok((
        json!({
            "a": a_spec,
            "b": b_spec,
            "restricted_to": la.len(),
            "comparison": cmp,
        }),
        None,
    ))
}

pub fn fit_tail(
    ctx: &mut Context,
    selector: LayerSelector,
    snapshot: Option<&str>,
    direction: Direction,
) -> anyhow::Result<CommandOutput> {
    let resolved = ctx.resolve_graph(selector, snapshot)?;
    let g = resolved.graph();
    let degrees: Vec<u64> = g
        .node_ids()
        .map(|v| match direction {
            Direction::In => g.in_degree(v) as u64,
            Direction::Out => g.out_degree(v) as u64,
        })
        .filter(|&d| d > 0)
        .collect();
    let fit = fit_powerlaw(&degrees).map_err(|e| anyhow!("tail fit failed: {e}"))?;
    let cmp = compare_alternatives(&degrees, &fit);
    let failures: Vec<(String, String)> = cmp
        .failures
        .iter()
        .map(|(a, why)| (a.as_str().to_owned(), why.clone()))
        .collect();
    Ok((
        json!({
            "fit": fit,
            "comparisons": cmp.rows,
            "failures": failures,
        }),
        None,
    ))
}

pub struct RobustnessArgs {
    pub fractions: Option<Vec<f64>>,
    pub strategy: Option<String>,
    pub trials: usize,
    pub seed: Option<u64>,
    pub rank_by: String,
    pub alpha: f64,
    pub remove_top: Option<usize>,
    pub reduced: bool,
    pub single: Option<String>,
}

fn ranking_scores(g: &DepGraph, rank_by: &str, alpha: f64) -> anyhow::Result<Vec<f64>> {
    match rank_by {
        "in-degree" => Ok(g.node_ids().map(|v| g.in_degree(v) as f64).collect()),
        "pagerank" => Ok(pagerank(g, alpha, 1e-10, 200).scores),
        "betweenness" => Ok(betweenness(g, BetweennessMode::Exact, true).scores),
        other => bail!("unknown ranking {other:?}; expected in-degree, pagerank, or betweenness"),
    }
}

pub fn robustness(
    ctx: &mut Context,
    selector: LayerSelector,
    snapshot: Option<&str>,
    args: RobustnessArgs,
) -> anyhow::Result<CommandOutput> {
    let resolved = ctx.resolve_graph(selector, snapshot)?;
    let g = resolved.graph();

    if let Some(name) = &args.single {
        let v = g
            .nodes()
            .iter()
            .find(|n| n.name.as_str() == name)
            .ok_or_else(|| anyhow!("node {name:?} not found"))?
            .id;
        let impact = single_node_impact(g, &[v]);
        return Ok((
            json!({"node": name, "disconnected": impact[0].1}),
            None,
        ));
    }

    if let Some(k) = args.remove_top {
        let base = if args.reduced {
            transitive_reduction(g)?.graph
        } else {
            g.clone()
        };
        let scores = ranking_scores(&base, &args.rank_by, args.alpha)?;
        let mut order: Vec<NodeId> = base.node_ids().collect();
        order.sort_by(|&a, &b| {
            scores[b as usize]
                .total_cmp(&scores[a as usize])
                .then(a.cmp(&b))
        });
        let mut remove = vec![false; base.node_count()];
        let removed: Vec<String> = order
            .iter()
            .take(k)
            .map(|&v| {
                remove[v as usize] = true;
                base.node(v).name.as_str().to_owned()
            })
            .collect();
        let m = remove_and_measure(&base, &remove);
        return Ok((
            json!({
                "removed": removed,
                "rank_by": args.rank_by,
                "reduced": args.reduced,
                "wcc_count": m.wcc_count,
                "gcc_size": m.gcc_size,
                "disconnected": m.disconnected_count,
            }),
            None,
        ));
    }

    let fractions = args
        .fractions
        .ok_or_else(|| anyhow!("robustness needs --fractions, --remove-top, or --single"))?;
    let strategy_name = args.strategy.as_deref().unwrap_or("targeted");
    let (curve, scores_holder);
    match strategy_name {
        "random" => {
            let seed = args
                .seed
                .ok_or_else(|| anyhow!("--strategy random requires an explicit --seed"))?;
            curve = removal_curve(g, RemovalStrategy::Random { seed }, &fractions, args.trials);
        }
        "targeted" => {
            scores_holder = ranking_scores(g, &args.rank_by, args.alpha)?;
            curve = removal_curve(
                g,
                RemovalStrategy::Targeted {
                    scores: &scores_holder,
                },
                &fractions,
                1,
            );
        }
        other => bail!("unknown strategy {other:?}"),
    }
    let mut series = Curve::new("fraction", "gcc");
    for (f, v) in curve.fractions.iter().zip(&curve.gcc_fraction) {
        series.push(f, v);
    }
    Ok((json!(curve), Some(series)))
}

pub struct DecompFilter {
    pub kinds: Option<Vec<DeclKind>>,
    pub attr: Option<String>,
    pub origin: Option<EdgeOrigin>,
    pub synth: Option<Tristate>,
    pub auto: Option<Tristate>,
    pub visibility: Option<Visibility>,
    pub with_diameter: bool,
}

impl DecompFilter {
    pub fn is_empty(&self) -> bool {
        self.kinds.is_none()
            && self.attr.is_none()
            && self.origin.is_none()
            && self.synth.is_none()
            && self.auto.is_none()
            && self.visibility.is_none()
    }
}

pub fn decomp(
    ctx: &mut Context,
    selector: LayerSelector,
    snapshot: Option<&str>,
    filter: DecompFilter,
) -> anyhow::Result<CommandOutput> {
    let resolved = ctx.resolve_graph(selector, snapshot)?;
    let g = resolved.graph();
    if filter.is_empty() {
        let stats = edge_partition_stats(g);
        let flow = inter_kind_flow(g);
        let kinds: Vec<&str> = flow.kinds.iter().map(|k| k.as_str()).collect();
        return Ok((
            json!({
                "edge_partitions": stats,
                "kind_flow": {"kinds": kinds, "matrix": flow.matrix},
            }),
            None,
        ));
    }
    let (sub, _) = subgraph_by_predicate(
        g,
        |n| {
            filter
                .kinds
                .as_ref()
                .is_none_or(|ks| ks.contains(&n.kind))
                && filter
                    .attr
                    .as_ref()
                    .is_none_or(|a| n.attributes.iter().any(|x| x == a))
        },
        |e| {
            filter.origin.is_none_or(|o| e.origin == o)
                && filter.synth.is_none_or(|s| e.synthesized == s)
                && filter.auto.is_none_or(|a| e.auto == a)
                && filter.visibility.is_none_or(|v| e.visibility == Some(v))
        },
    );
    let d = (filter.with_diameter && sub.node_count() > 0).then(|| diameter(&sub));
    Ok((
        json!({
            "nodes": sub.node_count(),
            "edges": sub.edge_count(),
            "diameter": d,
        }),
        None,
    ))
}

pub fn pairs(
    ctx: &mut Context,
    selector: LayerSelector,
    snapshot: Option<&str>,
    k: usize,
) -> anyhow::Result<CommandOutput> {
    let resolved = ctx.resolve_graph(selector, snapshot)?;
    let rows = cross_group_pairs(resolved.graph(), k.max(1));
    Ok((json!({ "pairs": rows }), None))
}

pub fn snapshot_diff(
    ctx: &mut Context,
    from: &str,
    to: &str,
    k: usize,
    seed: Option<u64>,
) -> anyhow::Result<CommandOutput> {
    let ga = ctx.decl_layer(Some(from))?.graph.clone();
    let gb = ctx.decl_layer(Some(to))?.graph.clone();
    let growth = growth_indicators(&[(from.to_owned(), &ga), (to.to_owned(), &gb)])?;
    let turnover = hub_turnover(&ga, &gb, k)?;
    let persistence = match seed {
        Some(seed) => {
            let proj = |g: &DepGraph| {
                UndirectedGraph::from_edges(g.node_count(), g.edges().map(|(_, s, d)| (s, d, 1.0)))
            };
            let pa = louvain(&proj(&ga), seed, 1.0)?.partition;
            let pb = louvain(&proj(&gb), seed, 1.0)?.partition;
            Some(community_persistence(&ga, &pa, &gb, &pb)?)
        }
        None => None,
    };
    Ok((
        json!({
            "growth": growth,
            "hub_turnover": turnover,
            "top_k": k,
            "community_persistence": persistence,
        }),
        None,
    ))
}

pub fn comod(ctx: &mut Context) -> anyhow::Result<CommandOutput> {
    let layer = ctx.module_layer()?;
    let records = layer
        .comod
        .clone()
        .context("module snapshot has no comod_path")?;
    let gm = layer.graph.clone();
    let graph = build_comod_graph(&records);
    let overlap = comod_vs_imports(&graph, &gm);
    let mut top: Vec<(String, String, u32)> = graph
        .pair_weights
        .iter()
        .map(|(&(a, b), &w)| (graph.name(a).to_owned(), graph.name(b).to_owned(), w))
        .collect();
    top.sort_by(|x, y| y.2.cmp(&x.2).then_with(|| (&x.0, &x.1).cmp(&(&y.0, &y.1))));
    top.truncate(20);
    Ok((
        json!({
            "prs": records.len(),
            "comod_pairs": graph.edge_count(),
            "top_pairs": top,
            "both": overlap.both.len(),
            "hidden": overlap.comod_only.len(),
            "import_only": overlap.import_only.len(),
            "hidden_pairs": overlap.comod_only,
        }),
        None,
    ))
}

/// The standard battery behind `report-all`: each entry is a command name
/// and its outputs, skipping steps whose inputs are absent.
pub fn report_all(
    ctx: &mut Context,
    seed: u64,
) -> anyhow::Result<Vec<(String, CommandOutput)>> {
    let mut out: Vec<(String, CommandOutput)> = Vec::new();
    let has_module = ctx
        .manifests()
        .iter()
        .any(|m| m.layer == Layer::Module);
    let has_decl = ctx
        .manifests()
        .iter()
        .any(|m| m.layer == Layer::Declaration);
    let has_comod = ctx
        .manifests()
        .iter()
        .any(|m| m.layer == Layer::Module && m.comod_path.is_some());

    let (validated, accepted) = validate(ctx)?;
    out.push(("validate".into(), validated));
    if !accepted {
        return Ok(out);
    }

    if has_module {
        for (name, dir) in [("stats-module-in", Direction::In), ("stats-module-out", Direction::Out)] {
            out.push((
                name.into(),
                stats(ctx, LayerSelector::Module, None, "degree", dir)?,
            ));
        }
        out.push((
            "layers-module".into(),
            stats(ctx, LayerSelector::Module, None, "layers", Direction::In)?,
        ));
        out.push(("reduce".into(), reduce(ctx, false)?));
        out.push(("critical-path".into(), critical_path_cmd(ctx)?));
        out.push((
            "containment-module".into(),
            containment(ctx, LayerSelector::Module, None, None, true)?,
        ));
        out.push((
            "centrality-module".into(),
            centrality(ctx, LayerSelector::Module, None, "pagerank", 0.85, None, None, 10)?,
        ));
        out.push((
            "community-module".into(),
            community(ctx, LayerSelector::Module, None, seed, 1.0)?,
        ));
    }
    if has_decl {
        out.push((
            "stats-decl-in".into(),
            stats(ctx, LayerSelector::Declaration, None, "degree", Direction::In)?,
        ));
        out.push((
            "components-decl".into(),
            stats(ctx, LayerSelector::Declaration, None, "components", Direction::In)?,
        ));
        out.push((
            "containment-ns".into(),
            containment(ctx, LayerSelector::Namespace(1), None, None, true)?,
        ));
        out.push(("decomp".into(), decomp(
            ctx,
            LayerSelector::Declaration,
            None,
            DecompFilter {
                kinds: None,
                attr: None,
                origin: None,
                synth: None,
                auto: None,
                visibility: None,
                with_diameter: false,
            },
        )?));
        out.push((
            "aggregate-ns".into(),
            aggregate_ns(ctx, None, 2)?,
        ));
        out.push((
            "pairs-ns".into(),
            pairs(ctx, LayerSelector::Namespace(1), None, 10)?,
        ));
        if has_module {
            out.push(("cohesion".into(), cohesion(ctx, None)?));
            out.push(("utilization".into(), utilization(ctx, None)?));
            out.push(("classify-imports".into(), classify_imports(ctx, None)?));
        }
        out.push((
            "community-decl".into(),
            community(ctx, LayerSelector::Declaration, None, seed, 1.0)?,
        ));
    }
    if has_comod {
        out.push(("comod".into(), comod(ctx)?));
    }
    Ok(out)
}
