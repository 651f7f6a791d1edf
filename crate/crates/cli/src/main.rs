//! deplens: multi-layer dependency-network analysis over exported
//! formal-library dependency data.

mod commands;
mod context;
mod envelope;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use deplens_core::graph::{DeclKind, Direction, EdgeOrigin, Tristate, Visibility};

use commands::{CommandOutput, DecompFilter, RobustnessArgs};
use context::{Context, LayerSelector};
use envelope::ReportEnvelope;

const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "deplens", version, about = "Dependency-network analysis toolkit")]
struct Cli {
    /// Manifest describing the dataset snapshots.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Directory for report and curve files; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format on stdout.
    #[arg(long, global = true, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct LayerArgs {
    /// Graph layer: module, decl, ns[:k], or file.
    #[arg(long, default_value = "module")]
    layer: String,
    /// Snapshot label when the manifest holds several.
    #[arg(long)]
    snapshot: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the dataset and report counts, warnings, and content hashes.
    Validate,
    /// Degree, layer-width, height, attribute, tactic, or component stats.
    Stats {
        #[command(flatten)]
        layer: LayerArgs,
        #[arg(long, default_value = "degree",
              value_parser = ["degree", "layers", "height", "attributes", "tactics", "markers", "components"])]
        metric: String,
        #[arg(long, default_value = "in", value_parser = ["in", "out"])]
        direction: String,
    },
    /// Transitive reduction of the module graph.
    Reduce {
        /// Include the removed edge list in the payload.
        #[arg(long)]
        full: bool,
    },
    /// Maximum-weight build path and parallelism bounds.
    CriticalPath,
    /// Same-group edge fraction at a hierarchy depth.
    Containment {
        #[command(flatten)]
        layer: LayerArgs,
        #[arg(long)]
        depth: Option<usize>,
        /// Emit the full containment-by-depth curve.
        #[arg(long)]
        decay: bool,
    },
    /// Per-module internal/external edge balance.
    Cohesion {
        #[arg(long)]
        snapshot: Option<String>,
    },
    /// Import utilization distribution.
    Utilization {
        #[arg(long)]
        snapshot: Option<String>,
    },
    /// Active/unused imports and direct/transitive file pairs.
    ClassifyImports {
        #[arg(long)]
        snapshot: Option<String>,
    },
    /// Build the namespace graph and its boundary metrics.
    AggregateNs {
        #[arg(long)]
        snapshot: Option<String>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// PageRank, betweenness, or in-degree rankings.
    Centrality {
        #[command(flatten)]
        layer: LayerArgs,
        #[arg(long, default_value = "pagerank",
              value_parser = ["pagerank", "betweenness", "in-degree"])]
        measure: String,
        #[arg(long, default_value_t = 0.85)]
        alpha: f64,
        /// Sample betweenness from this many pivots (needs --seed).
        #[arg(long)]
        pivots: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
    },
    /// Louvain communities on the undirected projection.
    Community {
        #[command(flatten)]
        layer: LayerArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        resolution: f64,
    },
    /// Entropy, MI, NMI, and ARI between two node labelings.
    ComparePartitions {
        #[command(flatten)]
        layer: LayerArgs,
        /// community, ns:k, module, dir, or marker.
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Discrete power-law fit with model comparison.
    FitTail {
        #[command(flatten)]
        layer: LayerArgs,
        #[arg(long, default_value = "in", value_parser = ["in", "out"])]
        direction: String,
    },
    /// Removal curves, top-k removal, or single-node impact.
    Robustness {
        #[command(flatten)]
        layer: LayerArgs,
        /// Ascending comma-separated removal fractions.
        #[arg(long, value_delimiter = ',')]
        fractions: Option<Vec<f64>>,
        #[arg(long, value_parser = ["random", "targeted"])]
        strategy: Option<String>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "pagerank",
              value_parser = ["pagerank", "in-degree", "betweenness"])]
        rank_by: String,
        #[arg(long, default_value_t = 0.85)]
        alpha: f64,
        /// Remove the k highest-ranked nodes and measure components.
        #[arg(long)]
        remove_top: Option<usize>,
        /// Operate on the transitively reduced graph.
        #[arg(long)]
        reduced: bool,
        /// Measure the impact of removing one named node.
        #[arg(long)]
        single: Option<String>,
    },
    /// Edge-flag partitions, inter-kind flow, or filtered subgraphs.
    Decomp {
        #[command(flatten)]
        layer: LayerArgs,
        /// Keep only these node kinds (comma separated).
        #[arg(long, value_delimiter = ',')]
        kinds: Option<Vec<String>>,
        /// Keep only nodes carrying this attribute.
        #[arg(long)]
        attr: Option<String>,
        #[arg(long, value_parser = ["statement", "proof", "both"])]
        origin: Option<String>,
        /// Keep only synthesized (1) or explicit (0) edges.
        #[arg(long, value_parser = ["0", "1"])]
        synth: Option<String>,
        /// Keep only auto-derived (1) or human (0) edges.
        #[arg(long, value_parser = ["0", "1"])]
        auto: Option<String>,
        /// Keep only edges with this import visibility.
        #[arg(long, value_parser = ["public", "private"])]
        visibility: Option<String>,
        /// Also compute the filtered subgraph's diameter.
        #[arg(long)]
        diameter: bool,
    },
    /// Heaviest cross-group pairs of a weighted layer.
    Pairs {
        #[command(flatten)]
        layer: LayerArgs,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
    },
    /// Growth, hub turnover, and community persistence across snapshots.
    SnapshotDiff {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 100)]
        top_k: usize,
        /// Also run seeded community detection on both snapshots.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Co-modification graph and its overlap with the import graph.
    Comod,
    /// Run the whole battery, one report per analysis.
    ReportAll {
        #[arg(long)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    if let Some(threads) = std::env::var("DEPLENS_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(RunError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(RunError::Validation(msg)) => {
            eprintln!("validation failure: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(RunError::Internal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

enum RunError {
    Usage(String),
    Validation(String),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for RunError {
    fn from(e: anyhow::Error) -> Self {
        // dataset problems are validation failures; flag misuse is usage
        let msg = format!("{e:#}");
        if msg.contains("requires an explicit --seed")
            || msg.contains("unknown layer")
            || msg.contains("unknown stats metric")
            || msg.contains("unknown centrality measure")
            || msg.contains("unknown strategy")
            || msg.contains("unknown partition spec")
            || msg.contains("needs --")
            || msg.contains("bad namespace depth")
        {
            RunError::Usage(msg)
        } else if msg.contains("rejected with")
            || msg.contains("content hash mismatch")
            || msg.contains("manifest")
            || msg.contains("contains a cycle")
            || msg.contains("No such file")
        {
            RunError::Validation(msg)
        } else {
            RunError::Internal(e)
        }
    }
}

fn parse_direction(s: &str) -> Direction {
    match s {
        "out" => Direction::Out,
        _ => Direction::In,
    }
}

fn parse_tristate(s: &str) -> Tristate {
    match s {
        "1" => Tristate::Yes,
        _ => Tristate::No,
    }
}

fn run(cli: Cli) -> Result<ExitCode, RunError> {
    let manifest = cli
        .manifest
        .as_ref()
        .ok_or_else(|| RunError::Usage("--manifest is required".into()))?;
    let mut ctx = Context::open(manifest).map_err(RunError::from)?;
    let started = Instant::now();
    let csv = cli.format == "csv";

    // parameters recorded in the envelope: everything that shapes the result
    let mut params: BTreeMap<String, String> = BTreeMap::new();
    let record =
        |params: &mut BTreeMap<String, String>, k: &str, v: String| {
            params.insert(k.to_owned(), v);
        };

    let layer_of = |args: &LayerArgs| -> Result<LayerSelector, RunError> {
        LayerSelector::parse(&args.layer).map_err(RunError::from)
    };

    let (name, output, ok): (String, CommandOutput, bool) = match &cli.command {
        Command::Validate => {
            let (out, accepted) = commands::validate(&mut ctx).map_err(RunError::from)?;
            ("validate".into(), out, accepted)
        }
        Command::Stats {
            layer,
            metric,
            direction,
        } => {
            record(&mut params, "layer", layer.layer.clone());
            record(&mut params, "metric", metric.clone());
            record(&mut params, "direction", direction.clone());
            let out = commands::stats(
                &mut ctx,
                layer_of(layer)?,
                layer.snapshot.as_deref(),
                metric,
                parse_direction(direction),
            )
            .map_err(RunError::from)?;
            ("stats".into(), out, true)
        }
        Command::Reduce { full } => {
            let out = commands::reduce(&mut ctx, *full).map_err(RunError::from)?;
            ("reduce".into(), out, true)
        }
        Command::CriticalPath => {
            let out = commands::critical_path_cmd(&mut ctx).map_err(RunError::from)?;
            ("critical-path".into(), out, true)
        }
        Command::Containment {
            layer,
            depth,
            decay,
        } => {
            record(&mut params, "layer", layer.layer.clone());
            if let Some(d) = depth {
                record(&mut params, "depth", d.to_string());
            }
            let out = commands::containment(
                &mut ctx,
                layer_of(layer)?,
                layer.snapshot.as_deref(),
                *depth,
                *decay,
            )
            .map_err(RunError::from)?;
            ("containment".into(), out, true)
        }
        Command::Cohesion { snapshot } => {
            let out =
                commands::cohesion(&mut ctx, snapshot.as_deref()).map_err(RunError::from)?;
            ("cohesion".into(), out, true)
        }
        Command::Utilization { snapshot } => {
            let out =
                commands::utilization(&mut ctx, snapshot.as_deref()).map_err(RunError::from)?;
            ("utilization".into(), out, true)
        }
        Command::ClassifyImports { snapshot } => {
            let out = commands::classify_imports(&mut ctx, snapshot.as_deref())
                .map_err(RunError::from)?;
            ("classify-imports".into(), out, true)
        }
        Command::AggregateNs { snapshot, depth } => {
            record(&mut params, "depth", depth.to_string());
            let out = commands::aggregate_ns(&mut ctx, snapshot.as_deref(), *depth)
                .map_err(RunError::from)?;
            ("aggregate-ns".into(), out, true)
        }
        Command::Centrality {
            layer,
            measure,
            alpha,
            pivots,
            seed,
            top_k,
        } => {
            record(&mut params, "layer", layer.layer.clone());
            record(&mut params, "measure", measure.clone());
            record(&mut params, "alpha", alpha.to_string());
            if let Some(s) = seed {
                record(&mut params, "seed", s.to_string());
            }
            let out = commands::centrality(
                &mut ctx,
                layer_of(layer)?,
                layer.snapshot.as_deref(),
                measure,
                *alpha,
                *pivots,
                *seed,
                *top_k,
            )
            .map_err(RunError::from)?;
            ("centrality".into(), out, true)
        }
        Command::Community {
            layer,
            seed,
            resolution,
        } => {
            record(&mut params, "layer", layer.layer.clone());
            record(&mut params, "seed", seed.to_string());
            record(&mut params, "resolution", resolution.to_string());
            let out = commands::community(
                &mut ctx,
                layer_of(layer)?,
                layer.snapshot.as_deref(),
                *seed,
                *resolution,
            )
            .map_err(RunError::from)?;
            ("community".into(), out, true)
        }
        Command::ComparePartitions { layer, a, b, seed } => {
            record(&mut params, "a", a.clone());
            record(&mut params, "b", b.clone());
            if let Some(s) = seed {
                record(&mut params, "seed", s.to_string());
            }
            let out = commands::compare_partitions_cmd(
                &mut ctx,
                layer_of(layer)?,
                layer.snapshot.as_deref(),
                a,
                b,
                *seed,
            )
            .map_err(RunError::from)?;
            ("compare-partitions".into(), out, true)
        }
        Command::FitTail { layer, direction } => {
            record(&mut params, "layer", layer.layer.clone());
            record(&mut params, "direction", direction.clone());
            let out = commands::fit_tail(
                &mut ctx,
                layer_of(layer)?,
                layer.snapshot.as_deref(),
                parse_direction(direction),
            )
            .map_err(RunError::from)?;
            ("fit-tail".into(), out, true)
        }
        Command::Robustness {
            layer,
            fractions,
            strategy,
            trials,
            seed,
            rank_by,
            alpha,
            remove_top,
            reduced,
            single,
        } => {
            record(&mut params, "layer", layer.layer.clone());
            if let Some(s) = seed {
                record(&mut params, "seed", s.to_string());
            }
            if let Some(s) = strategy {
                record(&mut params, "strategy", s.clone());
            }
            record(&mut params, "rank_by", rank_by.clone());
            let out = commands::robustness(
                &mut ctx,
                layer_of(layer)?,
                layer.snapshot.as_deref(),
                RobustnessArgs {
                    fractions: fractions.clone(),
                    strategy: strategy.clone(),
                    trials: *trials,
                    seed: *seed,
                    rank_by: rank_by.clone(),
                    alpha: *alpha,
                    remove_top: *remove_top,
                    reduced: *reduced,
                    single: single.clone(),
                },
            )
            .map_err(RunError::from)?;
            ("robustness".into(), out, true)
        }
        Command::Decomp {
            layer,
            kinds,
            attr,
            origin,
            synth,
            auto,
            visibility,
            diameter,
        } => {
            record(&mut params, "layer", layer.layer.clone());
            let kinds = match kinds {
                None => None,
                Some(raw) => {
                    let mut parsed = Vec::new();
                    for k in raw {
                        parsed.push(k.parse::<DeclKind>().map_err(RunError::Usage)?);
                    }
                    Some(parsed)
                }
            };
            let origin = origin.as_deref().map(|o| match o {
                "statement" => EdgeOrigin::Statement,
                "proof" => EdgeOrigin::Proof,
                _ => EdgeOrigin::Both,
            });
            let out = commands::decomp(
                &mut ctx,
                layer_of(layer)?,
                layer.snapshot.as_deref(),
                DecompFilter {
                    kinds,
                    attr: attr.clone(),
                    origin,
                    synth: synth.as_deref().map(parse_tristate),
                    auto: auto.as_deref().map(parse_tristate),
                    visibility: visibility.as_deref().map(|v| match v {
                        "public" => Visibility::Public,
                        _ => Visibility::Private,
                    }),
                    with_diameter: *diameter,
                },
            )
            .map_err(RunError::from)?;
            ("decomp".into(), out, true)
        }
        Command::Pairs { layer, top_k } => {
            record(&mut params, "layer", layer.layer.clone());
            record(&mut params, "top_k", top_k.to_string());
            let out = commands::pairs(
                &mut ctx,
                layer_of(layer)?,
                layer.snapshot.as_deref(),
                *top_k,
            )
            .map_err(RunError::from)?;
            ("pairs".into(), out, true)
        }
        Command::SnapshotDiff {
            from,
            to,
            top_k,
            seed,
        } => {
            record(&mut params, "from", from.clone());
            record(&mut params, "to", to.clone());
            if let Some(s) = seed {
                record(&mut params, "seed", s.to_string());
            }
            let out = commands::snapshot_diff(&mut ctx, from, to, *top_k, *seed)
                .map_err(RunError::from)?;
            ("snapshot-diff".into(), out, true)
        }
        Command::Comod => {
            let out = commands::comod(&mut ctx).map_err(RunError::from)?;
            ("comod".into(), out, true)
        }
        Command::ReportAll { seed } => {
            record(&mut params, "seed", seed.to_string());
            let hash = ctx.manifest_hash().map_err(RunError::from)?;
            let all = commands::report_all(&mut ctx, *seed).map_err(RunError::from)?;
            let wall = started.elapsed().as_millis();
            for (step, (payload, curve)) in all {
                let mut step_params = params.clone();
                step_params.insert("step".into(), step.clone());
                let mut envelope =
                    ReportEnvelope::new(hash.clone(), &step, step_params, payload);
                envelope.wall_time_ms = wall;
                envelope::emit(&envelope, curve.as_ref(), cli.out.as_deref(), csv)
                    .map_err(RunError::Internal)?;
            }
            return Ok(ExitCode::SUCCESS);
        }
    };

    let hash = ctx.manifest_hash().map_err(RunError::from)?;
    let (payload, curve) = output;
    let mut envelope = ReportEnvelope::new(hash, &name, params, payload);
    envelope.wall_time_ms = started.elapsed().as_millis();
    envelope::emit(&envelope, curve.as_ref(), cli.out.as_deref(), csv)
        .map_err(RunError::Internal)?;
    if ok {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_VALIDATION))
    }
}
