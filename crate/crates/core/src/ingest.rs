//! Loading, validation, and normalization of the on-disk dataset: node
//! tables (JSON lines), edge tables (CSV), build weights, PR
//! co-modification records, and snapshot manifests.
//!
//! Node ids are assigned densely in file order. Unresolvable edge
//! endpoints, self edges, and duplicate rows are skipped with accounting
//! rather than failing the load; structurally malformed rows reject the
//! file with one issue per offending line.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::components::connected_components;
use crate::components::ComponentMode;
use crate::graph::{
    DeclKind, DefHeight, DepGraph, EdgeOrigin, EdgeRecord, NodeId, NodeRecord, Tristate,
    Visibility, MAX_DEF_HEIGHT,
};
use crate::name::DottedName;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub line: Option<usize>,
    pub code: String,
    pub message: String,
}

impl Issue {
    fn new(line: usize, code: &str, message: impl Into<String>) -> Self {
        Issue {
            line: Some(line),
            code: code.to_owned(),
            message: message.into(),
        }
    }

    fn global(code: &str, message: impl Into<String>) -> Self {
        Issue {
            line: None,
            code: code.to_owned(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: rejected with {} error(s); first: {}", issues.len(), first_issue(issues))]
    Rejected { path: PathBuf, issues: Vec<Issue> },
    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("content hash mismatch for snapshot {label}: stored {stored}, computed {computed}")]
    HashMismatch {
        label: String,
        stored: String,
        computed: String,
    },
}

fn first_issue(issues: &[Issue]) -> String {
    issues
        .first()
        .map(|i| match i.line {
            Some(l) => format!("line {l}: [{}] {}", i.code, i.message),
            None => format!("[{}] {}", i.code, i.message),
        })
        .unwrap_or_default()
}

impl IngestError {
    pub fn issues(&self) -> &[Issue] {
        match self {
            IngestError::Rejected { issues, .. } => issues,
            _ => &[],
        }
    }
}

fn open(path: &Path) -> Result<BufReader<fs::File>, IngestError> {
    fs::File::open(path)
        .map(BufReader::new)
        .map_err(|source| IngestError::Io {
            path: path.to_owned(),
            source,
        })
}

// ---------------------------------------------------------------------
// node table

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawHeight {
    Num(i64),
    Tag(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    name: String,
    kind: String,
    #[serde(default)]
    module: Option<String>,
    #[serde(default)]
    attributes: Option<Vec<String>>,
    #[serde(default)]
    def_height: Option<RawHeight>,
    #[serde(default)]
    tactics: Option<Vec<String>>,
    #[serde(default)]
    marker: Option<String>,
}

#[derive(Debug)]
pub struct NodeLoad {
    pub records: Vec<NodeRecord>,
    pub warnings: Vec<Issue>,
}

/// Loads a line-delimited node table; ids are assigned in file order.
pub fn load_nodes(path: &Path) -> Result<NodeLoad, IngestError> {
    let reader = open(path)?;
    let mut records = Vec::new();
    let mut issues = Vec::new();
    let warnings = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|source| IngestError::Io {
            path: path.to_owned(),
            source,
        })?;
        if line.trim().is_empty() {
            issues.push(Issue::new(lineno, "malformed-line", "blank line"));
            continue;
        }
        let raw: RawNode = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                issues.push(Issue::new(lineno, "malformed-line", e.to_string()));
                continue;
            }
        };
        let kind: DeclKind = match raw.kind.parse() {
            Ok(k) => k,
            Err(e) => {
                issues.push(Issue::new(lineno, "unknown-kind", e));
                continue;
            }
        };
        let name = match DottedName::parse(&raw.name) {
            Ok(n) => n,
            Err(e) => {
                issues.push(Issue::new(lineno, "bad-name", e.to_string()));
                continue;
            }
        };
        if !seen.insert(raw.name.clone()) {
            issues.push(Issue::new(lineno, "duplicate-name", raw.name.clone()));
            continue;
        }
        let module = match raw.module {
            Some(m) => match DottedName::parse(&m) {
                Ok(m) => Some(m),
                Err(e) => {
                    issues.push(Issue::new(lineno, "bad-module", e.to_string()));
                    continue;
                }
            },
            None => None,
        };
        let def_height = match raw.def_height {
            None => None,
            Some(RawHeight::Num(h)) if (0..=MAX_DEF_HEIGHT as i64).contains(&h) => {
                Some(DefHeight::Regular(h as u32))
            }
            Some(RawHeight::Num(h)) => {
                issues.push(Issue::new(
                    lineno,
                    "bad-height",
                    format!("height {h} out of range"),
                ));
                continue;
            }
            Some(RawHeight::Tag(t)) => match t.as_str() {
                "abbrev" | "abbreviation" => Some(DefHeight::Abbreviation),
                "opaque" => Some(DefHeight::Opaque),
                other => {
                    issues.push(Issue::new(
                        lineno,
                        "bad-height",
                        format!("unknown height tag {other:?}"),
                    ));
                    continue;
                }
            },
        };
        let mut attributes = raw.attributes.unwrap_or_default();
        attributes.sort_unstable();
        attributes.dedup();
        records.push(NodeRecord {
            id: records.len() as NodeId,
            name,
            kind,
            module,
            attributes,
            def_height,
            tactics: raw.tactics,
            marker: raw.marker,
        });
    }

    if !issues.is_empty() {
        return Err(IngestError::Rejected {
            path: path.to_owned(),
            issues,
        });
    }
    Ok(NodeLoad { records, warnings })
}

/// name -> dense id lookup for edge resolution.
pub fn name_index(records: &[NodeRecord]) -> HashMap<String, NodeId> {
    records
        .iter()
        .map(|r| (r.name.as_str().to_owned(), r.id))
        .collect()
}

// ---------------------------------------------------------------------
// edge table

/// Column-name mapping for the edge CSV header. The published dataset's
/// exact column names may differ from the defaults; remap them here
/// instead of editing the data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdgeColumns {
    pub src: String,
    pub dst: String,
    pub origin: String,
    pub synth: String,
    pub auto: String,
    pub visibility: String,
    pub weight: String,
}

impl Default for EdgeColumns {
    fn default() -> Self {
        EdgeColumns {
            src: "src".into(),
            dst: "dst".into(),
            origin: "origin".into(),
            synth: "synth".into(),
            auto: "auto".into(),
            visibility: "visibility".into(),
            weight: "weight".into(),
        }
    }
}

#[derive(Debug, Default, Clone, PartialEq, Serialize)]
pub struct EdgeLoadStats {
    pub rows: usize,
    pub resolved: usize,
    pub unresolved: usize,
    pub self_edges: usize,
    pub duplicates: usize,
}

#[derive(Debug)]
pub struct EdgeLoad {
    pub edges: Vec<EdgeRecord>,
    pub stats: EdgeLoadStats,
    pub warnings: Vec<Issue>,
}

fn parse_tristate(s: &str) -> Result<Tristate, String> {
    match s {
        "1" => Ok(Tristate::Yes),
        "0" => Ok(Tristate::No),
        "?" | "" => Ok(Tristate::Unknown),
        other => Err(format!("expected 0, 1, or ?, got {other:?}")),
    }
}

fn parse_origin(s: &str) -> Result<EdgeOrigin, String> {
    match s {
        "statement" => Ok(EdgeOrigin::Statement),
        "proof" => Ok(EdgeOrigin::Proof),
        "both" => Ok(EdgeOrigin::Both),
        "unknown" | "?" | "" => Ok(EdgeOrigin::Unknown),
        other => Err(format!("unknown origin {other:?}")),
    }
}

/// Loads a comma-separated edge table, resolving endpoint names through
/// `id_index`. Unresolvable endpoints, self edges, and duplicate pairs are
/// skipped and counted; malformed rows and negative weights reject the
/// file.
pub fn load_edges(
    path: &Path,
    id_index: &HashMap<String, NodeId>,
    columns: &EdgeColumns,
) -> Result<EdgeLoad, IngestError> {
    let reader = open(path)?;
    let mut lines = reader.lines().enumerate();

    let header = match lines.next() {
        Some((_, Ok(h))) => h,
        Some((_, Err(source))) => {
            return Err(IngestError::Io {
                path: path.to_owned(),
                source,
            })
        }
        None => {
            return Err(IngestError::Rejected {
                path: path.to_owned(),
                issues: vec![Issue::new(1, "bad-header", "empty edge file")],
            })
        }
    };
    let fields: Vec<&str> = header.split(',').map(str::trim).collect();
    let col = |name: &str| fields.iter().position(|f| *f == name);
    let (Some(src_col), Some(dst_col)) = (col(&columns.src), col(&columns.dst)) else {
        return Err(IngestError::Rejected {
            path: path.to_owned(),
            issues: vec![Issue::new(
                1,
                "bad-header",
                format!(
                    "header {header:?} lacks required columns {:?} and {:?}",
                    columns.src, columns.dst
                ),
            )],
        });
    };
    let origin_col = col(&columns.origin);
    let synth_col = col(&columns.synth);
    let auto_col = col(&columns.auto);
    let vis_col = col(&columns.visibility);
    let weight_col = col(&columns.weight);

    let mut issues = Vec::new();
    let mut warnings = Vec::new();
    let mut stats = EdgeLoadStats::default();
    let mut edges: Vec<EdgeRecord> = Vec::new();

    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(|source| IngestError::Io {
            path: path.to_owned(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        stats.rows += 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != fields.len() {
            issues.push(Issue::new(
                lineno,
                "malformed-row",
                format!("{} columns, header has {}", cells.len(), fields.len()),
            ));
            continue;
        }
        let get = |c: Option<usize>| c.and_then(|i| cells.get(i)).copied().unwrap_or("");

        let (src_name, dst_name) = (get(Some(src_col)), get(Some(dst_col)));
        let origin = match parse_origin(get(origin_col)) {
            Ok(o) => o,
            Err(e) => {
                issues.push(Issue::new(lineno, "malformed-row", e));
                continue;
            }
        };
        let synthesized = match parse_tristate(get(synth_col)) {
            Ok(t) => t,
            Err(e) => {
                issues.push(Issue::new(lineno, "malformed-row", e));
                continue;
            }
        };
        let auto = match parse_tristate(get(auto_col)) {
            Ok(t) => t,
            Err(e) => {
                issues.push(Issue::new(lineno, "malformed-row", e));
                continue;
            }
        };
        let visibility = match get(vis_col) {
            "" | "?" => None,
            "public" => Some(Visibility::Public),
            "private" => Some(Visibility::Private),
            other => {
                issues.push(Issue::new(
                    lineno,
                    "malformed-row",
                    format!("unknown visibility {other:?}"),
                ));
                continue;
            }
        };
        let weight = match get(weight_col) {
            "" => 1.0,
            w => match w.parse::<f64>() {
                Ok(w) if w >= 0.0 && w.is_finite() => w,
                Ok(w) => {
                    issues.push(Issue::new(
                        lineno,
                        "negative-weight",
                        format!("weight {w} must be nonnegative"),
                    ));
                    continue;
                }
                Err(e) => {
                    issues.push(Issue::new(lineno, "malformed-row", e.to_string()));
                    continue;
                }
            },
        };

        let (Some(&src), Some(&dst)) = (id_index.get(src_name), id_index.get(dst_name)) else {
            stats.unresolved += 1;
            continue;
        };
        if src == dst {
            stats.self_edges += 1;
            continue;
        }
        edges.push(EdgeRecord {
            src,
            dst,
            origin,
            synthesized,
            auto,
            visibility,
            weight,
        });
    }

    if !issues.is_empty() {
        return Err(IngestError::Rejected {
            path: path.to_owned(),
            issues,
        });
    }

    // drop duplicate (src, dst) pairs, keeping the first occurrence
    let mut order: Vec<u32> = (0..edges.len() as u32).collect();
    order.sort_by_key(|&i| {
        let e = &edges[i as usize];
        (e.src, e.dst, i)
    });
    let mut drop = vec![false; edges.len()];
    for w in order.windows(2) {
        let (a, b) = (&edges[w[0] as usize], &edges[w[1] as usize]);
        if a.src == b.src && a.dst == b.dst {
            drop[w[1] as usize] = true;
        }
    }
    stats.duplicates = drop.iter().filter(|&&d| d).count();
    if stats.duplicates > 0 {
        warnings.push(Issue::global(
            "duplicate-edges",
            format!("{} duplicate rows dropped", stats.duplicates),
        ));
    }
    let edges: Vec<EdgeRecord> = edges
        .into_iter()
        .zip(drop)
        .filter_map(|(e, d)| (!d).then_some(e))
        .collect();
    stats.resolved = edges.len();
    if stats.unresolved > 0 {
        warnings.push(Issue::global(
            "unresolved-endpoints",
            format!("{} rows with unresolvable endpoints skipped", stats.unresolved),
        ));
    }
    if stats.self_edges > 0 {
        warnings.push(Issue::global(
            "self-edges",
            format!("{} self-edge rows skipped", stats.self_edges),
        ));
    }

    Ok(EdgeLoad {
        edges,
        stats,
        warnings,
    })
}

// ---------------------------------------------------------------------
// build weights and co-modification records

#[derive(Debug)]
pub struct WeightLoad {
    pub weights: BTreeMap<String, f64>,
    pub warnings: Vec<Issue>,
}

/// Loads "module,seconds" rows; a literal header row is skipped.
pub fn load_build_weights(path: &Path) -> Result<WeightLoad, IngestError> {
    let reader = open(path)?;
    let mut weights = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut issues = Vec::new();
    let mut rows = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|source| IngestError::Io {
            path: path.to_owned(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || (lineno == 1 && trimmed == "module,seconds") {
            continue;
        }
        let Some((module, value)) = trimmed.split_once(',') else {
            issues.push(Issue::new(lineno, "malformed-row", "expected module,seconds"));
            continue;
        };
        match value.trim().parse::<f64>() {
            Ok(w) if w >= 0.0 && w.is_finite() => {
                rows += 1;
                weights.insert(module.trim().to_owned(), w);
            }
            Ok(w) => issues.push(Issue::new(
                lineno,
                "negative-weight",
                format!("weight {w} must be nonnegative"),
            )),
            Err(e) => issues.push(Issue::new(lineno, "malformed-row", e.to_string())),
        }
    }
    if !issues.is_empty() {
        return Err(IngestError::Rejected {
            path: path.to_owned(),
            issues,
        });
    }
    if rows == 0 {
        warnings.push(Issue::global("empty-weights", "no build weights present"));
    }
    Ok(WeightLoad { weights, warnings })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComodRecord {
    pub pr_id: String,
    pub files: Vec<DottedName>,
}

#[derive(Debug, Deserialize)]
struct RawComod {
    pr_id: serde_json::Value,
    files: Vec<String>,
}

/// Loads line-delimited {pr_id, files[]} records; a PR must list at least
/// one file.
pub fn load_comod(path: &Path) -> Result<Vec<ComodRecord>, IngestError> {
    let reader = open(path)?;
    let mut records = Vec::new();
    let mut issues = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|source| IngestError::Io {
            path: path.to_owned(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawComod = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                issues.push(Issue::new(lineno, "malformed-line", e.to_string()));
                continue;
            }
        };
        if raw.files.is_empty() {
            issues.push(Issue::new(lineno, "empty-file-list", "PR lists no files"));
            continue;
        }
        let mut files = Vec::with_capacity(raw.files.len());
        let mut ok = true;
        for f in &raw.files {
            match DottedName::parse(f) {
                Ok(n) => files.push(n),
                Err(e) => {
                    issues.push(Issue::new(lineno, "bad-name", e.to_string()));
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let pr_id = match &raw.pr_id {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        records.push(ComodRecord { pr_id, files });
    }
    if !issues.is_empty() {
        return Err(IngestError::Rejected {
            path: path.to_owned(),
            issues,
        });
    }
    Ok(records)
}

// ---------------------------------------------------------------------
// manifests

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Module,
    Declaration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub layer: Layer,
    pub snapshot_label: String,
    pub node_path: PathBuf,
    pub edge_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comod_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<EdgeColumns>,
}

/// Reads a manifest file: a JSON array of snapshot records (or a single
/// record). Relative paths are resolved against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Vec<DatasetManifest>, IngestError> {
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut entries: Vec<DatasetManifest> = match serde_json::from_str::<Vec<DatasetManifest>>(&text)
    {
        Ok(v) => v,
        Err(_) => match serde_json::from_str::<DatasetManifest>(&text) {
            Ok(one) => vec![one],
            Err(e) => {
                return Err(IngestError::Manifest {
                    path: path.to_owned(),
                    message: e.to_string(),
                })
            }
        },
    };
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let resolve = |p: &mut PathBuf| {
        if p.is_relative() {
            *p = base.join(&p);
        }
    };
    for m in entries.iter_mut() {
        resolve(&mut m.node_path);
        resolve(&mut m.edge_path);
        if let Some(w) = m.weight_path.as_mut() {
            resolve(w);
        }
        if let Some(c) = m.comod_path.as_mut() {
            resolve(c);
        }
    }
    Ok(entries)
}

/// sha256 over the concatenated bytes of the referenced files, in the
/// order node, edge, weight, comod.
pub fn compute_hash(manifest: &DatasetManifest) -> Result<String, IngestError> {
    let mut hasher = Sha256::new();
    let mut feed = |p: &Path| -> Result<(), IngestError> {
        let bytes = fs::read(p).map_err(|source| IngestError::Io {
            path: p.to_owned(),
            source,
        })?;
        hasher.update(&bytes);
        Ok(())
    };
    feed(&manifest.node_path)?;
    feed(&manifest.edge_path)?;
    if let Some(w) = &manifest.weight_path {
        feed(w)?;
    }
    if let Some(c) = &manifest.comod_path {
        feed(c)?;
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        write!(hex, "{b:02x}").expect("hex write");
    }
    Ok(hex)
}

/// sha256 over a sequence of per-snapshot digests, for manifest-level
/// provenance.
pub fn combine_hashes(parts: &[String]) -> String {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update(p.as_bytes());
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        write!(hex, "{b:02x}").expect("hex write");
    }
    hex
}

#[derive(Debug)]
pub struct LayerData {
    pub graph: DepGraph,
    pub edge_stats: EdgeLoadStats,
    pub weights: Option<BTreeMap<String, f64>>,
    pub comod: Option<Vec<ComodRecord>>,
    pub warnings: Vec<Issue>,
    pub content_hash: String,
}

/// Loads one snapshot layer end to end, verifying the stored content hash
/// when present.
pub fn load_layer(manifest: &DatasetManifest) -> Result<LayerData, IngestError> {
    let computed = compute_hash(manifest)?;
    if let Some(stored) = &manifest.content_hash {
        if stored != &computed {
            return Err(IngestError::HashMismatch {
                label: manifest.snapshot_label.clone(),
                stored: stored.clone(),
                computed,
            });
        }
    }
    let mut warnings = Vec::new();
    let nodes = load_nodes(&manifest.node_path)?;
    warnings.extend(nodes.warnings);
    let index = name_index(&nodes.records);
    let columns = manifest.columns.clone().unwrap_or_default();
    let edges = load_edges(&manifest.edge_path, &index, &columns)?;
    warnings.extend(edges.warnings);
    let graph = DepGraph::build(nodes.records, edges.edges).map_err(|e| IngestError::Rejected {
        path: manifest.edge_path.clone(),
        issues: vec![Issue::global("graph-build", e.to_string())],
    })?;
    let weights = match &manifest.weight_path {
        Some(p) => {
            let w = load_build_weights(p)?;
            warnings.extend(w.warnings);
            Some(w.weights)
        }
        None => None,
    };
    let comod = match &manifest.comod_path {
        Some(p) => Some(load_comod(p)?),
        None => None,
    };
    Ok(LayerData {
        graph,
        edge_stats: edges.stats,
        weights,
        comod,
        warnings,
        content_hash: computed,
    })
}

// ---------------------------------------------------------------------
// validation

#[derive(Debug, Default, Serialize)]
pub struct ValidationReport {
    pub counts: BTreeMap<String, usize>,
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
    pub hashes: BTreeMap<String, String>,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Validates every snapshot in the manifest: loader errors are collected
/// per file, and the declaration layer's near-acyclicity is checked —
/// inductive/constructor 2-cycles are warnings, any other cycle is an
/// error. The module layer must be a DAG.
pub fn validate(manifests: &[DatasetManifest]) -> ValidationReport {
    let mut report = ValidationReport::default();
    for m in manifests {
        let prefix = format!("{}/{:?}", m.snapshot_label, m.layer);
        match load_layer(m) {
            Err(IngestError::Rejected { path, issues }) => {
                for mut issue in issues {
                    issue.message = format!("{}: {}", path.display(), issue.message);
                    report.errors.push(issue);
                }
            }
            Err(e) => {
                report.errors.push(Issue::global("load", e.to_string()));
            }
            Ok(data) => {
                report
                    .counts
                    .insert(format!("{prefix}/nodes"), data.graph.node_count());
                report
                    .counts
                    .insert(format!("{prefix}/edges"), data.graph.edge_count());
                report.counts.insert(
                    format!("{prefix}/unresolved-edges"),
                    data.edge_stats.unresolved,
                );
                if let Some(w) = &data.weights {
                    report.counts.insert(format!("{prefix}/weights"), w.len());
                }
                if let Some(c) = &data.comod {
                    report.counts.insert(format!("{prefix}/prs"), c.len());
                }
                report.warnings.extend(data.warnings);
                report
                    .hashes
                    .insert(m.snapshot_label.clone(), data.content_hash.clone());
                check_acyclicity(m.layer, &data.graph, &mut report);
            }
        }
    }
    report
}

fn check_acyclicity(layer: Layer, g: &DepGraph, report: &mut ValidationReport) {
    let sccs = connected_components(g, ComponentMode::Strong);
    let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); sccs.group_count()];
    for v in g.node_ids() {
        members[sccs.group_of(v) as usize].push(v);
    }
    let mut tolerated = 0usize;
    for group in members.iter().filter(|m| m.len() > 1) {
        let describe = || {
            group
                .iter()
                .take(4)
                .map(|&v| g.node(v).name.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        };
        match layer {
            Layer::Module => report.errors.push(Issue::global(
                "module-cycle",
                format!("import cycle among {}", describe()),
            )),
            Layer::Declaration => {
                let kinds: Vec<DeclKind> = group.iter().map(|&v| g.node(v).kind).collect();
                let is_ctor_pair = group.len() == 2
                    && kinds.contains(&DeclKind::Inductive)
                    && kinds.contains(&DeclKind::Constructor);
                if is_ctor_pair {
                    tolerated += 1;
                } else {
                    report.errors.push(Issue::global(
                        "declaration-cycle",
                        format!("dependency cycle among {}", describe()),
                    ));
                }
            }
        }
    }
    if tolerated > 0 {
        report.warnings.push(Issue::global(
            "inductive-constructor-cycles",
            format!("{tolerated} inductive/constructor 2-cycles tolerated"),
        ));
    }
}

// ---------------------------------------------------------------------
// canonical serialization

#[derive(Serialize)]
struct RawNodeOut<'a> {
    name: &'a str,
    kind: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    module: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    attributes: Option<&'a [String]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    def_height: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tactics: Option<&'a [String]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    marker: Option<&'a str>,
}

/// Canonical node table: one JSON line per record, fields in fixed order,
/// empty optionals omitted. `serialize_nodes(load_nodes(x))` is a fixed
/// point for accepted files.
pub fn serialize_nodes(records: &[NodeRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let raw = RawNodeOut {
            name: r.name.as_str(),
            kind: r.kind.as_str(),
            module: r.module.as_ref().map(DottedName::as_str),
            attributes: (!r.attributes.is_empty()).then_some(&r.attributes[..]),
            def_height: r.def_height.map(|h| match h {
                DefHeight::Regular(v) => serde_json::Value::from(v),
                DefHeight::Abbreviation => serde_json::Value::from("abbrev"),
                DefHeight::Opaque => serde_json::Value::from("opaque"),
            }),
            tactics: r.tactics.as_deref(),
            marker: r.marker.as_deref(),
        };
        out.push_str(&serde_json::to_string(&raw).expect("node serializes"));
        out.push('\n');
    }
    out
}

/// Canonical edge table with the full header, rows in (src, dst) id order.
pub fn serialize_edges(g: &DepGraph) -> String {
    let mut out = String::from("src,dst,origin,synth,auto,visibility,weight\n");
    for (e, src, dst) in g.edges() {
        let tri = |t: Tristate| match t {
            Tristate::Yes => "1",
            Tristate::No => "0",
            Tristate::Unknown => "?",
        };
        let vis = match g.visibility(e) {
            Some(Visibility::Public) => "public",
            Some(Visibility::Private) => "private",
            None => "?",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            g.node(src).name,
            g.node(dst).name,
            g.origin(e).as_str(),
            tri(g.synthesized(e)),
            tri(g.auto(e)),
            vis,
            g.weight(e),
        ));
    }
    out
}
