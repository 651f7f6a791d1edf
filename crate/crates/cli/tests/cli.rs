//! End-to-end runs of every subcommand against the bundled toy fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn deplens(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deplens"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_json(args: &[&str]) -> Value {
    let manifest = fixture("manifest.json");
    let mut full = vec!["--manifest", manifest.to_str().unwrap()];
    full.extend_from_slice(args);
    let out = deplens(&full);
    assert!(
        out.status.success(),
        "deplens {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON envelope")
}

#[test]
fn validate_accepts_toy_dataset() {
    let v = run_json(&["validate"]);
    assert_eq!(v["command"], "validate");
    assert_eq!(v["payload"]["counts"]["toy/Module/nodes"], 5);
    assert_eq!(v["payload"]["counts"]["a/Declaration/edges"], 13);
    assert!(v["payload"]["errors"].as_array().unwrap().is_empty());
    assert!(!v["manifest_hash"].as_str().unwrap().is_empty());
}

#[test]
fn validate_rejects_broken_dataset_with_exit_1() {
    let manifest = fixture("broken_manifest.json");
    let out = deplens(&["--manifest", manifest.to_str().unwrap(), "validate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_flag_is_usage_error() {
    let manifest = fixture("manifest.json");
    let out = deplens(&["--manifest", manifest.to_str().unwrap(), "reduce", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pivot_betweenness_without_seed_is_usage_error() {
    let manifest = fixture("manifest.json");
    let out = deplens(&[
        "--manifest",
        manifest.to_str().unwrap(),
        "centrality",
        "--measure",
        "betweenness",
        "--pivots",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reduce_removes_the_redundant_import() {
    let v = run_json(&["reduce", "--full"]);
    assert_eq!(v["payload"]["original_edges"], 7);
    assert_eq!(v["payload"]["reduced_edges"], 6);
    assert_eq!(v["payload"]["removed_edges"], 1);
    let r = v["payload"]["redundancy_rate"].as_f64().unwrap();
    assert!((r - 1.0 / 7.0).abs() < 1e-12);
    assert_eq!(
        v["payload"]["removed"][0],
        serde_json::json!(["Algebra.Order.Group", "Init"])
    );
}

#[test]
fn critical_path_reproduces_the_build_fixture() {
    let v = run_json(&["critical-path"]);
    assert_eq!(v["payload"]["total_weight"], 8.0);
    assert_eq!(v["payload"]["sequential_weight"], 12.0);
    assert_eq!(v["payload"]["speedup"], 1.5);
    assert_eq!(
        v["payload"]["path"],
        serde_json::json!(["Algebra.Order.Group", "Algebra.Group.Defs", "Init"])
    );
}

#[test]
fn containment_at_namespace_depth_one() {
    let v = run_json(&["containment", "--layer", "ns", "--depth", "1", "--snapshot", "a"]);
    let c = v["payload"]["containment"].as_f64().unwrap();
    assert!((c - 4.0 / 13.0).abs() < 1e-12);
}

#[test]
fn containment_decay_emits_a_curve() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = fixture("manifest.json");
    let out = deplens(&[
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "containment",
        "--layer",
        "module",
        "--decay",
    ]);
    assert!(out.status.success());
    let curve = std::fs::read_to_string(dir.path().join("containment_curve.csv")).unwrap();
    let mut lines = curve.lines();
    assert_eq!(lines.next(), Some("depth,containment"));
    assert!(curve.lines().count() > 1);
}

#[test]
fn cohesion_summary() {
    let v = run_json(&["cohesion", "--snapshot", "a"]);
    assert_eq!(v["payload"]["modules"], 5);
    assert_eq!(v["payload"]["zero_cohesion_modules"], 2);
    let mean = v["payload"]["mean"].as_f64().unwrap();
    assert!((mean - 0.17).abs() < 1e-12);
}

#[test]
fn utilization_summary() {
    let v = run_json(&["utilization", "--snapshot", "a"]);
    assert_eq!(v["payload"]["considered_edges"], 7);
    assert_eq!(v["payload"]["zero_count"], 2);
    assert_eq!(v["payload"]["median"], 0.5);
}

#[test]
fn classify_imports_table() {
    let v = run_json(&["classify-imports", "--snapshot", "a"]);
    assert_eq!(v["payload"]["active_imports"], 5);
    assert_eq!(v["payload"]["unused_imports"], 2);
    assert_eq!(v["payload"]["file_pairs"], 6);
    assert_eq!(v["payload"]["direct"], 5);
    assert_eq!(v["payload"]["transitive"], 0);
    assert_eq!(v["payload"]["unreachable"], 1);
}

#[test]
fn aggregate_ns_reports_boundaries() {
    let v = run_json(&["aggregate-ns", "--snapshot", "a", "--depth", "2"]);
    assert!(v["payload"]["namespaces"].as_u64().unwrap() >= 2);
    let breakdown = &v["payload"]["boundary_breakdown"];
    let total = breakdown["same_module"].as_u64().unwrap()
        + breakdown["cross_module_same_namespace"].as_u64().unwrap()
        + breakdown["cross_namespace"].as_u64().unwrap()
        + breakdown["missing_info"].as_u64().unwrap();
    assert_eq!(total, 13);
}

#[test]
fn centrality_in_degree_ranks_the_hub() {
    let v = run_json(&[
        "centrality",
        "--layer",
        "decl",
        "--snapshot",
        "a",
        "--measure",
        "in-degree",
        "--top-k",
        "3",
    ]);
    assert_eq!(v["payload"]["top"][0]["label"], "Eq.refl");
    assert_eq!(v["payload"]["top"][0]["score"], 7.0);
}

#[test]
fn community_runs_and_reports_q() {
    let v = run_json(&["community", "--layer", "decl", "--snapshot", "a", "--seed", "1"]);
    assert!(v["payload"]["communities"].as_u64().unwrap() >= 1);
    assert!(v["payload"]["modularity"].as_f64().unwrap() <= 1.0);
    assert_eq!(v["payload"]["seed"], 1);
}

#[test]
fn compare_partitions_namespace_vs_module() {
    let v = run_json(&[
        "compare-partitions",
        "--layer",
        "decl",
        "--snapshot",
        "a",
        "--a",
        "ns:1",
        "--b",
        "module",
    ]);
    let nmi = v["payload"]["comparison"]["nmi"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&nmi));
    assert_eq!(v["payload"]["restricted_to"], 11);
}

#[test]
fn fit_tail_on_the_big_snapshot() {
    let v = run_json(&[
        "fit-tail",
        "--layer",
        "decl",
        "--snapshot",
        "big",
        "--direction",
        "in",
    ]);
    let alpha = v["payload"]["fit"]["alpha"].as_f64().unwrap();
    assert!(alpha > 1.0);
    assert!(!v["payload"]["comparisons"].as_array().unwrap().is_empty());
}

#[test]
fn robustness_modes() {
    let v = run_json(&[
        "robustness",
        "--layer",
        "decl",
        "--snapshot",
        "a",
        "--single",
        "Eq.refl",
    ]);
    assert!(v["payload"]["disconnected"].as_u64().is_some());

    let v = run_json(&[
        "robustness",
        "--layer",
        "module",
        "--remove-top",
        "2",
        "--rank-by",
        "in-degree",
    ]);
    assert!(v["payload"]["wcc_count"].as_u64().unwrap() >= 1);

    let dir = tempfile::tempdir().unwrap();
    let manifest = fixture("manifest.json");
    let out = deplens(&[
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "robustness",
        "--layer",
        "decl",
        "--snapshot",
        "big",
        "--fractions",
        "0.0,0.2,0.5,1.0",
        "--strategy",
        "random",
        "--trials",
        "4",
        "--seed",
        "9",
    ]);
    assert!(out.status.success());
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("robustness.json")).unwrap())
            .unwrap();
    let gcc: Vec<f64> = report["payload"]["gcc_fraction"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!(gcc.windows(2).all(|w| w[0] >= w[1] - 1e-12));
    assert_eq!(*gcc.last().unwrap(), 0.0);
    let curve = std::fs::read_to_string(dir.path().join("robustness_curve.csv")).unwrap();
    assert!(curve.starts_with("fraction,gcc\n"));
}

#[test]
fn decomp_partitions_and_filters() {
    let v = run_json(&["decomp", "--layer", "decl", "--snapshot", "a"]);
    let synth = &v["payload"]["edge_partitions"]["synthesis"];
    assert_eq!(synth["synthesized"], 3);
    assert_eq!(synth["explicit"], 10);
    let flow_total: u64 = v["payload"]["kind_flow"]["matrix"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|row| row.as_array().unwrap())
        .map(|x| x.as_u64().unwrap())
        .sum();
    assert_eq!(flow_total, 13);

    let v = run_json(&[
        "decomp",
        "--layer",
        "decl",
        "--snapshot",
        "a",
        "--synth",
        "1",
        "--diameter",
    ]);
    assert_eq!(v["payload"]["edges"], 3);
    assert_eq!(v["payload"]["nodes"], 11);
}

#[test]
fn pairs_ranks_cross_namespace_weight() {
    let v = run_json(&[
        "pairs", "--layer", "ns:1", "--snapshot", "a", "--top-k", "3",
    ]);
    let first = &v["payload"]["pairs"][0];
    assert_eq!(first["a"], "Eq");
    assert_eq!(first["b"], "Nat");
    assert_eq!(first["weight"], 4.0);
}

#[test]
fn snapshot_diff_between_a_and_b() {
    let v = run_json(&["snapshot-diff", "--from", "a", "--to", "b", "--top-k", "3"]);
    let growth = v["payload"]["growth"].as_array().unwrap();
    assert_eq!(growth[0]["declarations"], 11);
    assert_eq!(growth[1]["declarations"], 12);
    let rho = v["payload"]["hub_turnover"].as_f64().unwrap();
    assert!((-1.0..=1.0).contains(&rho));
}

#[test]
fn comod_overlap_counts() {
    let v = run_json(&["comod"]);
    assert_eq!(v["payload"]["prs"], 3);
    assert_eq!(v["payload"]["comod_pairs"], 4);
    assert_eq!(v["payload"]["both"], 1);
    assert_eq!(v["payload"]["hidden"], 3);
    assert_eq!(v["payload"]["import_only"], 6);
}

#[test]
fn markers_compare_groups() {
    let v = run_json(&["stats", "--layer", "decl", "--snapshot", "a", "--metric", "markers"]);
    assert_eq!(v["payload"]["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn layer_width_curve_for_single_node() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = fixture("single_manifest.json");
    let out = deplens(&[
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "stats",
        "--layer",
        "module",
        "--metric",
        "layers",
    ]);
    assert!(out.status.success());
    let curve = std::fs::read_to_string(dir.path().join("stats_curve.csv")).unwrap();
    assert_eq!(curve, "level,width\n0,1\n");
}

#[test]
fn module_layer_widths() {
    let v = run_json(&["stats", "--layer", "module", "--metric", "layers"]);
    assert_eq!(v["payload"]["profile"]["depth"], 2);
    assert_eq!(v["payload"]["profile"]["widths"], serde_json::json!([1, 3, 1]));
}

#[test]
fn csv_format_prints_series() {
    let manifest = fixture("manifest.json");
    let out = deplens(&[
        "--manifest",
        manifest.to_str().unwrap(),
        "--format",
        "csv",
        "containment",
        "--layer",
        "module",
        "--decay",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("depth,containment\n"));
}

#[test]
fn identical_seeded_runs_are_byte_identical() {
    let manifest = fixture("manifest.json");
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    for dir in [&dir1, &dir2] {
        let out = deplens(&[
            "--manifest",
            manifest.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "community",
            "--layer",
            "decl",
            "--snapshot",
            "big",
            "--seed",
            "5",
        ]);
        assert!(out.status.success());
    }
    let a = std::fs::read(dir1.path().join("community.json")).unwrap();
    let b = std::fs::read(dir2.path().join("community.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn decomp_visibility_filter_selects_public_imports() {
    let v = run_json(&["decomp", "--layer", "module", "--visibility", "public"]);
    assert_eq!(v["payload"]["edges"], 6);
    let v = run_json(&["decomp", "--layer", "module", "--visibility", "private"]);
    assert_eq!(v["payload"]["edges"], 1);
}

#[test]
fn report_all_writes_the_battery() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = fixture("manifest.json");
    let out = deplens(&[
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "report-all",
        "--seed",
        "1",
    ]);
    assert!(
        out.status.success(),
        "report-all failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    for expected in [
        "validate.json",
        "reduce.json",
        "critical-path.json",
        "containment-module.json",
        "community-decl.json",
        "classify-imports.json",
        "comod.json",
    ] {
        assert!(dir.path().join(expected).exists(), "missing {expected}");
    }
}
