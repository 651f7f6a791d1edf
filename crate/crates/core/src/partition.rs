//! Total and partial node labelings used by community detection, namespace
//! grouping, and partition comparison.

use std::collections::HashMap;

use serde::Serialize;

use crate::graph::{DepGraph, NodeId};
use crate::name::DottedName;

/// A total map node -> group id with a group-size index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    labels: Vec<u32>,
    group_sizes: Vec<u32>,
}

impl Partition {
    /// Builds a partition from dense labels in `0..group_count`.
    ///
    /// Panics if a label is out of range; callers own densification.
    pub fn from_dense_labels(labels: Vec<u32>, group_count: usize) -> Self {
        let mut group_sizes = vec![0u32; group_count];
        for &l in &labels {
            group_sizes[l as usize] += 1;
        }
        Partition {
            labels,
            group_sizes,
        }
    }

    /// Builds a partition from arbitrary labels, assigning dense group ids
    /// by first appearance.
    pub fn normalize<T: std::hash::Hash + Eq>(raw: &[T]) -> Self {
        let mut ids: HashMap<&T, u32> = HashMap::new();
        let mut labels = Vec::with_capacity(raw.len());
        for l in raw {
            let next = ids.len() as u32;
            let id = *ids.entry(l).or_insert(next);
            labels.push(id);
        }
        let count = ids.len();
        Partition::from_dense_labels(labels, count)
    }

    /// Relabels groups by (size descending, smallest member ascending).
    pub fn canonicalize(&self) -> Partition {
        let g = self.group_count();
        let mut min_member = vec![u32::MAX; g];
        for (node, &l) in self.labels.iter().enumerate() {
            min_member[l as usize] = min_member[l as usize].min(node as u32);
        }
        let mut order: Vec<usize> = (0..g).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(self.group_sizes[i]), min_member[i]));
        let mut remap = vec![0u32; g];
        for (new_id, &old_id) in order.iter().enumerate() {
            remap[old_id] = new_id as u32;
        }
        let labels = self.labels.iter().map(|&l| remap[l as usize]).collect();
        Partition::from_dense_labels(labels, g)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn group_of(&self, node: NodeId) -> u32 {
        self.labels[node as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn group_count(&self) -> usize {
        self.group_sizes.len()
    }

    pub fn group_size(&self, group: u32) -> usize {
        self.group_sizes[group as usize] as usize
    }

    pub fn group_sizes(&self) -> &[u32] {
        &self.group_sizes
    }

    /// Restricts the partition to the given nodes, renumbering groups by
    /// first appearance.
    pub fn restricted_to(&self, nodes: &[NodeId]) -> Partition {
        let raw: Vec<u32> = nodes.iter().map(|&v| self.labels[v as usize]).collect();
        Partition::normalize(&raw)
    }
}

/// A partial labeling node -> group, with stable group names.
///
/// Group ids are assigned by sorted label order, so two runs over the same
/// data produce identical numbering.
#[derive(Debug, Clone)]
pub struct Grouping {
    label_of: Vec<Option<u32>>,
    names: Vec<String>,
}

impl Grouping {
    pub fn from_optional_names(raw: Vec<Option<String>>) -> Self {
        let mut distinct: Vec<String> = raw.iter().flatten().cloned().collect();
        distinct.sort_unstable();
        distinct.dedup();
        let index: HashMap<&str, u32> = distinct
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i as u32))
            .collect();
        let label_of = raw
            .iter()
            .map(|o| o.as_deref().map(|s| index[s]))
            .collect();
        Grouping {
            label_of,
            names: distinct,
        }
    }

    /// Groups declarations by their containing module, unmapped where the
    /// record has none.
    pub fn by_module(g: &DepGraph) -> Self {
        Grouping::from_optional_names(
            g.nodes()
                .iter()
                .map(|n| n.module.as_ref().map(|m| m.as_str().to_owned()))
                .collect(),
        )
    }

    /// Groups declarations by depth-`k` namespace truncation (total).
    pub fn by_namespace(g: &DepGraph, k: usize) -> Self {
        Grouping::from_optional_names(
            g.nodes()
                .iter()
                .map(|n| {
                    Some(
                        crate::aggregation::truncate_namespace(&n.name, k)
                            .as_str()
                            .to_owned(),
                    )
                })
                .collect(),
        )
    }

    /// Groups declarations by the top-level directory of their module:
    /// the component under the `Mathlib` root, or the leading package
    /// name for modules outside it.
    pub fn by_top_directory(g: &DepGraph) -> Self {
        Grouping::from_optional_names(
            g.nodes()
                .iter()
                .map(|n| {
                    n.module.as_ref().map(|m| {
                        let mut c = m.components();
                        let first = c.next().unwrap_or("");
                        if first == "Mathlib" {
                            c.next().unwrap_or(first).to_owned()
                        } else {
                            first.to_owned()
                        }
                    })
                })
                .collect(),
        )
    }

    pub fn constant(n: usize, name: &str) -> Self {
        Grouping {
            label_of: vec![Some(0); n],
            names: vec![name.to_owned()],
        }
    }

    pub fn len(&self) -> usize {
        self.label_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.label_of.is_empty()
    }

    pub fn group_of(&self, node: NodeId) -> Option<u32> {
        self.label_of[node as usize]
    }

    pub fn group_count(&self) -> usize {
        self.names.len()
    }

    pub fn name_of(&self, group: u32) -> &str {
        &self.names[group as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn covered_count(&self) -> usize {
        self.label_of.iter().filter(|l| l.is_some()).count()
    }

    /// A total partition over the covered nodes; `None` if any node is
    /// unmapped.
    pub fn as_partition(&self) -> Option<Partition> {
        let labels: Option<Vec<u32>> = self.label_of.iter().copied().collect();
        labels.map(|l| Partition::from_dense_labels(l, self.names.len()))
    }
}

/// The namespace key of a declaration name truncated to depth `k`.
pub type NamespaceKey = DottedName;
