//! Run directory: resolved configuration, CSV tables and `summary.json`.
//!
//! Everything written is a function of the resolved configuration, so reruns are
//! byte-identical. JSON keys are sorted and no timestamps are recorded.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

pub struct RunDir {
    root: PathBuf,
    spec_hash: String,
    seed: u64,
    command: &'static str,
}

impl RunDir {
    /// Creates the directory and writes `config.resolved.toml`.
    pub fn create(root: &Path, command: &'static str, resolved_toml: &str, seed: u64) -> std::io::Result<Self> {
        fs::create_dir_all(root)?;
        fs::write(root.join("config.resolved.toml"), resolved_toml)?;
        let spec_hash = format!("{:x}", Sha256::digest(resolved_toml.as_bytes()));
        Ok(Self { root: root.to_path_buf(), spec_hash, seed, command })
    }

    #[cfg(test)]
    pub fn spec_hash(&self) -> &str {
        &self.spec_hash
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn file(&self, name: &str) -> std::io::Result<BufWriter<fs::File>> {
        Ok(BufWriter::new(fs::File::create(self.path(name))?))
    }

    /// Writes a CSV table from a header and numeric rows.
    pub fn csv(&self, name: &str, header: &[String], rows: impl IntoIterator<Item = Vec<f64>>) -> std::io::Result<()> {
        let mut out = self.file(name)?;
        writeln!(out, "{}", header.join(","))?;
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        out.flush()
    }

    /// Writes `name` as a JSON document carrying the schema version, command, hash and seed.
    pub fn json(&self, name: &str, body: Value) -> std::io::Result<()> {
        let mut doc = Map::new();
        doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
        doc.insert("command".into(), json!(self.command));
        doc.insert("spec_hash".into(), json!(self.spec_hash));
        doc.insert("seed".into(), json!(self.seed));
        if let Value::Object(fields) = body {
            doc.extend(fields);
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialise");
        text.push('\n');
        fs::write(self.path(name), text)
    }

    pub fn summary(&self, body: Value) -> std::io::Result<()> {
        self.json("summary.json", body)
    }
}

/// JSON number, with non-finite values as `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_is_sorted_and_hashed() {
        let dir = tempfile::tempdir().unwrap();
        let run = RunDir::create(dir.path(), "exact-circle", "seed = 1\n", 1).unwrap();
        run.summary(json!({"zeta": 1, "alpha": num(f64::NAN)})).unwrap();
        let text = fs::read_to_string(run.path("summary.json")).unwrap();
        let keys: Vec<usize> = ["alpha", "command", "schema_version", "seed", "spec_hash", "zeta"]
            .iter()
            .map(|k| text.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]), "{text}");
        assert!(text.contains("\"alpha\": null"));
        // sha256("seed = 1\n")
        let want = format!("{:x}", Sha256::digest(b"seed = 1\n"));
        assert_eq!(run.spec_hash(), want);
        assert_eq!(want.len(), 64);
    }

    #[test]
    fn csv_rows_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let run = RunDir::create(dir.path(), "simulate", "", 0).unwrap();
        run.csv("t.csv", &["a".into(), "b".into()], vec![vec![0.1, -2.5e-300]]).unwrap();
        let text = fs::read_to_string(run.path("t.csv")).unwrap();
        let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row, vec![0.1, -2.5e-300]);
    }
}
