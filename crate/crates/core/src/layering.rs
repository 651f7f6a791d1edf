//! Topological levels and the layer-width profile of acyclic graphs.
//!
//! The level of a node is the length of the longest directed path ending
//! at it, so every source (in-degree 0) sits at level 0. Applied to a
//! graph in the stored citer -> cited orientation, level 0 holds the nodes
//! nobody cites; applied to the transpose, level 0 holds the foundational
//! nodes with no premises and every citer sits strictly above everything
//! it cites.

use serde::Serialize;

use crate::graph::{DepGraph, GraphError, NodeId};

/// Longest-path-ending-at levels, or a cycle witness.
pub fn topological_levels(g: &DepGraph) -> Result<Vec<u32>, GraphError> {
    let n = g.node_count();
    let mut level = vec![0u32; n];
    let mut remaining: Vec<usize> = (0..n).map(|v| g.in_degree(v as NodeId)).collect();
    let mut queue: std::collections::VecDeque<NodeId> = (0..n as NodeId)
        .filter(|&v| remaining[v as usize] == 0)
        .collect();
    let mut seen = 0usize;
    while let Some(v) = queue.pop_front() {
        seen += 1;
        let next = level[v as usize] + 1;
        for &w in g.out_neighbors(v) {
            let wi = w as usize;
            if next > level[wi] {
                level[wi] = next;
            }
            remaining[wi] -= 1;
            if remaining[wi] == 0 {
                queue.push_back(w);
            }
        }
    }
    if seen < n {
        return Err(GraphError::Cycle(witness_cycle(g, &remaining)));
    }
    Ok(level)
}

/// One directed cycle among the nodes with unresolved in-degree.
fn witness_cycle(g: &DepGraph, remaining: &[usize]) -> Vec<NodeId> {
    let start = remaining
        .iter()
        .position(|&r| r > 0)
        .expect("cycle witness requested on acyclic graph") as NodeId;
    // Walk in-neighbors staying inside the unresolved set until a repeat.
    let mut seen_at = std::collections::HashMap::new();
    let mut path = vec![start];
    seen_at.insert(start, 0usize);
    let mut v = start;
    loop {
        let u = *g
            .in_neighbors(v)
            .iter()
            .find(|&&u| remaining[u as usize] > 0)
            .expect("unresolved node has an unresolved in-neighbor");
        if let Some(&i) = seen_at.get(&u) {
            let mut cycle: Vec<NodeId> = path[i..].to_vec();
            cycle.reverse();
            return cycle;
        }
        seen_at.insert(u, path.len());
        path.push(u);
        v = u;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerProfile {
    /// Maximum level = number of layers - 1.
    pub depth: usize,
    /// widths[i] = node count at level i; sums to |V|.
    pub widths: Vec<usize>,
}

impl LayerProfile {
    pub fn max_width(&self) -> usize {
        self.widths.iter().copied().max().unwrap_or(0)
    }

    pub fn median_width(&self) -> usize {
        if self.widths.is_empty() {
            return 0;
        }
        let mut sorted = self.widths.clone();
        sorted.sort_unstable();
        sorted[(sorted.len() - 1) / 2]
    }
}

/// DAG depth and per-layer widths; callers condense cyclic graphs first.
pub fn dag_depth_and_widths(g: &DepGraph) -> Result<LayerProfile, GraphError> {
    let levels = topological_levels(g)?;
    if levels.is_empty() {
        return Ok(LayerProfile {
            depth: 0,
            widths: Vec::new(),
        });
    }
    let depth = *levels.iter().max().unwrap() as usize;
    let mut widths = vec![0usize; depth + 1];
    for &l in &levels {
        widths[l as usize] += 1;
    }
    Ok(LayerProfile { depth, widths })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DeclKind, DepGraph, EdgeRecord, NodeRecord};
    use crate::name::DottedName;

    fn graph(n: usize, pairs: &[(NodeId, NodeId)]) -> DepGraph {
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

    #[test]
    fn chain_levels_on_premise_direction() {
        // a cites b cites c; on the transpose the foundational node c sits
        // at level 0 and the citers stack above it.
        let g = graph(3, &[(0, 1), (1, 2)]);
        let levels = topological_levels(&g.transpose()).unwrap();
        assert_eq!(levels, vec![2, 1, 0]);
        // on the stored orientation the uncited node sits at level 0
        let levels = topological_levels(&g).unwrap();
        assert_eq!(levels, vec![0, 1, 2]);
    }

    #[test]
    fn cycle_reports_witness() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]);
        let err = topological_levels(&g).unwrap_err();
        match err {
            GraphError::Cycle(c) => {
                assert_eq!(c.len(), 3);
                // witness is a real cycle
                for w in c.windows(2) {
                    assert!(g.has_edge(w[0], w[1]));
                }
                assert!(g.has_edge(*c.last().unwrap(), c[0]));
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn single_node_profile() {
        let g = graph(1, &[]);
        let p = dag_depth_and_widths(&g).unwrap();
        assert_eq!(p.depth, 0);
        assert_eq!(p.widths, vec![1]);
    }

    #[test]
    fn level_soundness_on_diamond() {
        let g = graph(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let levels = topological_levels(&g.transpose()).unwrap();
        for (_, u, v) in g.edges() {
            assert!(levels[u as usize] >= levels[v as usize] + 1);
        }
        let p = dag_depth_and_widths(&g).unwrap();
        assert_eq!(p.depth, 2);
        assert_eq!(p.widths.iter().sum::<usize>(), 4);
        assert_eq!(p.max_width(), 2);
    }
}
