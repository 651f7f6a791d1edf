//! Weak and strong connectivity, plus condensation of strongly connected
//! components into a DAG of super-nodes.

use crate::graph::{DepGraph, EdgeRecord, GraphError, NodeId, NodeRecord};
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentMode {
    Weak,
    Strong,
}

/// Connected components; component ids are ordered by size descending,
/// ties broken by smallest member id.
pub fn connected_components(g: &DepGraph, mode: ComponentMode) -> Partition {
    let raw = match mode {
        ComponentMode::Weak => weak_labels(g),
        ComponentMode::Strong => strong_labels(g),
    };
    let count = raw.iter().map(|&l| l + 1).max().unwrap_or(0) as usize;
    Partition::from_dense_labels(raw, count).canonicalize()
}

fn weak_labels(g: &DepGraph) -> Vec<u32> {
    let n = g.node_count();
    let mut label = vec![u32::MAX; n];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != u32::MAX {
            continue;
        }
        label[start] = next;
        stack.push(start as NodeId);
        while let Some(v) = stack.pop() {
            for &w in g.out_neighbors(v).iter().chain(g.in_neighbors(v)) {
                if label[w as usize] == u32::MAX {
                    label[w as usize] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    label
}

/// Iterative Tarjan; labels are assigned in completion order.
fn strong_labels(g: &DepGraph) -> Vec<u32> {
    let n = g.node_count();
    let mut index = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut label = vec![u32::MAX; n];
    let mut counter = 0u32;
    let mut comp = 0u32;
    let mut stack: Vec<NodeId> = Vec::new();
    // (node, next out-neighbor position)
    let mut call: Vec<(NodeId, usize)> = Vec::new();

    for root in 0..n as NodeId {
        if index[root as usize] != u32::MAX {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let vi = v as usize;
            if *pos == 0 {
                index[vi] = counter;
                low[vi] = counter;
                counter += 1;
                stack.push(v);
                on_stack[vi] = true;
            }
            let succ = g.out_neighbors(v);
            if *pos < succ.len() {
                let w = succ[*pos];
                *pos += 1;
                let wi = w as usize;
                if index[wi] == u32::MAX {
                    call.push((w, 0));
                } else if on_stack[wi] {
                    low[vi] = low[vi].min(index[wi]);
                }
            } else {
                if low[vi] == index[vi] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w as usize] = false;
                        label[w as usize] = comp;
                        if w == v {
                            break;
                        }
                    }
                    comp += 1;
                }
                call.pop();
                if let Some(&mut (p, _)) = call.last_mut() {
                    let pi = p as usize;
                    low[pi] = low[pi].min(low[vi]);
                }
            }
        }
    }
    label
}

/// Collapses each SCC into a super-node. The returned graph is acyclic;
/// a super-edge (A, B) exists iff some original edge crosses A -> B, with
/// weight equal to the sum of crossing edge weights. Super-nodes are
/// numbered by smallest member id ascending and take the representative
/// (smallest-id) member's record.
pub fn condense(g: &DepGraph) -> (DepGraph, Partition) {
    let raw = strong_labels(g);
    let scc_count = raw.iter().map(|&l| l + 1).max().unwrap_or(0) as usize;
    let mut min_member = vec![u32::MAX; scc_count];
    for (v, &l) in raw.iter().enumerate() {
        min_member[l as usize] = min_member[l as usize].min(v as u32);
    }
    let mut order: Vec<usize> = (0..scc_count).collect();
    order.sort_unstable_by_key(|&c| min_member[c]);
    let mut remap = vec![0u32; scc_count];
    for (new_id, &old) in order.iter().enumerate() {
        remap[old] = new_id as u32;
    }
    let labels: Vec<u32> = raw.iter().map(|&l| remap[l as usize]).collect();
    let partition = Partition::from_dense_labels(labels.clone(), scc_count);

    let nodes: Vec<NodeRecord> = order
        .iter()
        .enumerate()
        .map(|(new_id, &old)| {
            let mut rec = g.node(min_member[old]).clone();
            rec.id = new_id as NodeId;
            rec
        })
        .collect();

    let mut super_edges: std::collections::BTreeMap<(u32, u32), f64> =
        std::collections::BTreeMap::new();
    for (e, src, dst) in g.edges() {
        let (a, b) = (labels[src as usize], labels[dst as usize]);
        if a != b {
            *super_edges.entry((a, b)).or_insert(0.0) += g.weight(e);
        }
    }
    let edges: Vec<EdgeRecord> = super_edges
        .into_iter()
        .map(|((a, b), w)| EdgeRecord::new(a, b).with_weight(w))
        .collect();
    let condensed = DepGraph::build(nodes, edges).expect("condensation is a valid graph");
    (condensed, partition)
}

/// Convenience check used by validation: the cycle witness of a graph, if
/// any.
pub fn find_cycle(g: &DepGraph) -> Option<Vec<NodeId>> {
    match crate::layering::topological_levels(g) {
        Ok(_) => None,
        Err(GraphError::Cycle(c)) => Some(c),
        Err(_) => unreachable!("levels only fail with a cycle"),
    }
}
