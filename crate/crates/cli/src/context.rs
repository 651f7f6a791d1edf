//! Manifest-driven dataset access: lazy per-layer loading, layer-flag
//! parsing, and the derived namespace graphs.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail};
use deplens_core::aggregation::{build_ns_graph, NsAggregate};
use deplens_core::graph::DepGraph;
use deplens_core::ingest::{self, DatasetManifest, Layer, LayerData};

/// Which graph a command operates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerSelector {
    Module,
    Declaration,
    /// Namespace aggregation of the declaration layer at depth k.
    Namespace(usize),
    /// Declarations grouped by containing file.
    File,
}

impl LayerSelector {
    pub fn parse(s: &str) -> anyhow::Result<Self> {
        match s {
            "module" => Ok(LayerSelector::Module),
            "decl" | "declaration" => Ok(LayerSelector::Declaration),
            "file" => Ok(LayerSelector::File),
            "ns" => Ok(LayerSelector::Namespace(1)),
            other => {
                if let Some(depth) = other.strip_prefix("ns:") {
                    let k: usize = depth
                        .parse()
                        .map_err(|_| anyhow!("bad namespace depth in --layer {other:?}"))?;
                    if k == 0 {
                        bail!("namespace depth must be at least 1");
                    }
                    Ok(LayerSelector::Namespace(k))
                } else {
                    bail!("unknown layer {other:?}; expected module, decl, ns[:k], or file")
                }
            }
        }
    }
}

pub struct Context {
    manifests: Vec<DatasetManifest>,
    module: Option<LayerData>,
    decl: BTreeMap<String, LayerData>,
    combined_hash: Option<String>,
}

impl Context {
    pub fn open(manifest_path: &Path) -> anyhow::Result<Self> {
        let manifests = ingest::load_manifest(manifest_path)?;
        if manifests.is_empty() {
            bail!("manifest {} lists no snapshots", manifest_path.display());
        }
        Ok(Context {
            manifests,
            module: None,
            decl: BTreeMap::new(),
            combined_hash: None,
        })
    }

    pub fn manifests(&self) -> &[DatasetManifest] {
        &self.manifests
    }

    /// sha256 over the per-snapshot content hashes, in manifest order.
    pub fn manifest_hash(&mut self) -> anyhow::Result<String> {
        if let Some(h) = &self.combined_hash {
            return Ok(h.clone());
        }
        let mut parts = Vec::new();
        for m in &self.manifests {
            parts.push(ingest::compute_hash(m)?);
        }
        let h = ingest::combine_hashes(&parts);
        self.combined_hash = Some(h.clone());
        Ok(h)
    }

    fn find(&self, layer: Layer, snapshot: Option<&str>) -> anyhow::Result<DatasetManifest> {
        self.manifests
            .iter()
            .find(|m| m.layer == layer && snapshot.is_none_or(|s| m.snapshot_label == s))
            .cloned()
            .ok_or_else(|| match snapshot {
                Some(s) => anyhow!("manifest has no {layer:?} snapshot labeled {s:?}"),
                None => anyhow!("manifest has no {layer:?} snapshot"),
            })
    }

    pub fn module_layer(&mut self) -> anyhow::Result<&LayerData> {
        if self.module.is_none() {
            let m = self.find(Layer::Module, None)?;
            self.module = Some(ingest::load_layer(&m)?);
        }
        Ok(self.module.as_ref().unwrap())
    }

    pub fn decl_layer(&mut self, snapshot: Option<&str>) -> anyhow::Result<&LayerData> {
        let m = self.find(Layer::Declaration, snapshot)?;
        let key = m.snapshot_label.clone();
        if !self.decl.contains_key(&key) {
            self.decl.insert(key.clone(), ingest::load_layer(&m)?);
        }
        Ok(&self.decl[&key])
    }

    /// The graph a selector refers to; namespace layers aggregate the
    /// declaration snapshot on the fly.
    pub fn resolve_graph(
        &mut self,
        selector: LayerSelector,
        snapshot: Option<&str>,
    ) -> anyhow::Result<ResolvedLayer> {
        match selector {
            LayerSelector::Module => Ok(ResolvedLayer::Plain(self.module_layer()?.graph.clone())),
            LayerSelector::Declaration | LayerSelector::File => {
                Ok(ResolvedLayer::Plain(self.decl_layer(snapshot)?.graph.clone()))
            }
            LayerSelector::Namespace(k) => {
                let gd = &self.decl_layer(snapshot)?.graph;
                Ok(ResolvedLayer::Aggregated(build_ns_graph(gd, k)))
            }
        }
    }
}

pub enum ResolvedLayer {
    Plain(DepGraph),
    Aggregated(NsAggregate),
}

impl ResolvedLayer {
    pub fn graph(&self) -> &DepGraph {
        match self {
            ResolvedLayer::Plain(g) => g,
            ResolvedLayer::Aggregated(a) => &a.graph,
        }
    }
}

