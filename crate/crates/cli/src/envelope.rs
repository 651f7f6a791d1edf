//! Self-describing result envelopes and curve files.
//!
//! An envelope embeds the tool version, the manifest content hash, the
//! command with its parameters (seeds included), and the metric payload,
//! so downstream plotting needs no side channel. Serialized envelopes are
//! byte-identical for identical (manifest hash, command, parameters);
//! wall time goes to stderr, not into the artifact.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct ReportEnvelope {
    pub tool: &'static str,
    pub version: &'static str,
    pub manifest_hash: String,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub payload: serde_json::Value,
    #[serde(skip)]
    pub wall_time_ms: u128,
}

impl ReportEnvelope {
    pub fn new(
        manifest_hash: String,
        command: &str,
        parameters: BTreeMap<String, String>,
        payload: serde_json::Value,
    ) -> Self {
        ReportEnvelope {
            tool: "deplens",
            version: env!("CARGO_PKG_VERSION"),
            manifest_hash,
            command: command.to_owned(),
            parameters,
            payload,
            wall_time_ms: 0,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s
    }
}

/// A two-column series destined for a curve file.
#[derive(Debug, Clone, Serialize)]
pub struct Curve {
    pub x_label: String,
    pub y_label: String,
    pub rows: Vec<(String, String)>,
}

impl Curve {
    pub fn new(x_label: &str, y_label: &str) -> Self {
        Curve {
            x_label: x_label.to_owned(),
            y_label: y_label.to_owned(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, x: impl ToString, y: impl ToString) {
        self.rows.push((x.to_string(), y.to_string()));
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}\n", self.x_label, self.y_label);
        for (x, y) in &self.rows {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }
}

/// Writes the envelope (and its curve, when present) under `out`, or to
/// stdout when no directory is given.
pub fn emit(
    envelope: &ReportEnvelope,
    curve: Option<&Curve>,
    out: Option<&Path>,
    csv: bool,
) -> anyhow::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("creating output directory {}", dir.display()))?;
            let report_path = dir.join(format!("{}.json", envelope.command));
            std::fs::write(&report_path, envelope.to_json())
                .with_context(|| format!("writing {}", report_path.display()))?;
            written.push(report_path);
            if let Some(curve) = curve {
                let curve_path = dir.join(format!("{}_curve.csv", envelope.command));
                std::fs::write(&curve_path, curve.to_csv())
                    .with_context(|| format!("writing {}", curve_path.display()))?;
                written.push(curve_path);
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            if csv {
                let text = match curve {
                    Some(c) => c.to_csv(),
                    None => payload_as_csv(&envelope.payload),
                };
                lock.write_all(text.as_bytes())?;
            } else {
                lock.write_all(envelope.to_json().as_bytes())?;
            }
        }
    }
    eprintln!(
        "deplens {}: {} ms",
        envelope.command, envelope.wall_time_ms
    );
    Ok(written)
}

/// Flat key,value rendering of a payload for --format csv on commands
/// without a natural curve.
pub fn payload_as_csv(payload: &serde_json::Value) -> String {
    let mut out = String::from("key,value\n");
    fn walk(prefix: &str, v: &serde_json::Value, out: &mut String) {
        match v {
            serde_json::Value::Object(map) => {
                for (k, val) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, val, out);
                }
            }
            serde_json::Value::Array(items) => {
                for (i, val) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), val, out);
                }
            }
            scalar => {
                out.push_str(&format!("{prefix},{scalar}\n"));
            }
        }
    }
    walk("", payload, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_curve_is_header_only() {
        let c = Curve::new("fraction", "gcc");
        assert_eq!(c.to_csv(), "fraction,gcc\n");
    }

    #[test]
    fn curve_rows_render_in_order() {
        let mut c = Curve::new("level", "width");
        c.push(0, 1);
        c.push(1, 3);
        assert_eq!(c.to_csv(), "level,width\n0,1\n1,3\n");
    }

    #[test]
    fn envelope_serialization_is_deterministic() {
        let payload = serde_json::json!({"b": 1, "a": {"nested": 2.5}});
        let make = || {
            ReportEnvelope::new(
                "abc123".into(),
                "example",
                BTreeMap::from([("seed".to_string(), "7".to_string())]),
                payload.clone(),
            )
        };
        let mut e1 = make();
        let mut e2 = make();
        e1.wall_time_ms = 10;
        e2.wall_time_ms = 99_999;
        // wall time never reaches the artifact
        assert_eq!(e1.to_json(), e2.to_json());
        assert!(!e1.to_json().contains("wall_time"));
    }

    #[test]
    fn payload_flattening() {
        let payload = serde_json::json!({"x": 1, "list": [true, false]});
        let csv = payload_as_csv(&payload);
        assert_eq!(csv, "key,value\nlist[0],true\nlist[1],false\nx,1\n");
    }
}
