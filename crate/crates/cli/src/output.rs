//! Output files. JSON reports look like
//! `{"tool", "version", "config", "result", "timings"}`; CSV files start with a
//! `#` line carrying the version and the config. Wall-clock numbers only ever
//! appear under `timings`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{version, RunConfig};

pub struct Output {
    dir: PathBuf,
    config: RunConfig,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(config: RunConfig) -> Result<Self> {
        let dir = config.out_dir.clone();
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir, config, written: Vec::new() })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.written.push(p.clone());
        p
    }

    /// One-line provenance header for CSV files.
    pub fn comment(&self) -> String {
        let config = serde_json::to_string(&self.config).expect("config serializes");
        format!("robust-coreset {} config={config}", version())
    }

    /// Writes a JSON report. `timing_keys` are moved from the top level of
    /// `result` into the `timings` object; an object value is merged into it.
    pub fn json<T: Serialize>(&mut self, name: &str, result: &T, timing_keys: &[&str]) -> Result<()> {
        let mut result = serde_json::to_value(result)?;
        let mut timings = Map::new();
        if let Value::Object(obj) = &mut result {
            for key in timing_keys {
                match obj.remove(*key) {
                    Some(Value::Object(inner)) => timings.extend(inner),
                    Some(v) => {
                        timings.insert((*key).to_string(), v);
                    }
                    None => {}
                }
            }
        }
        let doc = json!({
            "tool": "robust-coreset",
            "version": version(),
            "config": self.config,
            "result": result,
            "timings": timings,
        });
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    /// Writes serializable rows as CSV under the provenance comment.
    pub fn csv_rows<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let comment = self.comment();
        let path = self.path(name);
        let mut file = fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        writeln!(file, "# {comment}")?;
        let mut w = csv::Writer::from_writer(file);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Opens a file for a custom writer; the caller writes the comment itself.
    pub fn create(&mut self, name: &str) -> Result<fs::File> {
        let path = self.path(name);
        fs::File::create(&path).with_context(|| format!("writing {}", path.display()))
    }
}

pub fn display(path: &Path) -> String {
    path.display().to_string()
}
