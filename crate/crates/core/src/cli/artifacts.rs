use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::domain::{Grid, SpaceTimeField};
use crate::error::Result;

/// Version stamped into every artifact; bump on any schema change.
pub const ARTIFACT_VERSION: u32 = 1;

/// Floats with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV table with a leading `# schema:` comment line.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub schema: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(schema: &'static str, header: Vec<&'static str>) -> Self {
        CsvTable {
            schema,
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# schema: {}/{}", self.schema, ARTIFACT_VERSION);
        let _ = writeln!(s, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }
}

/// `(t, x, value)` triples over all space-time nodes.
pub fn field_table(schema: &'static str, grid: &Grid, f: &SpaceTimeField) -> CsvTable {
    let mut t = CsvTable::new(schema, vec!["t", "x", "value"]);
    for (k, &tk) in grid.times().iter().enumerate() {
        for (j, &x) in grid.nodes().iter().enumerate() {
            t.push(vec![fmt_float(tk), fmt_float(x), fmt_float(f.get(k, j))]);
        }
    }
    t
}

/// Collects emitted files relative to an output directory.
#[derive(Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    files: Vec<String>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(ArtifactWriter {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), text)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_csv(&mut self, name: &str, table: &CsvTable) -> Result<()> {
        self.write_text(name, &table.render())
    }

    /// JSON wrapped as `{"schema": …, "version": …, "data": …}`.
    pub fn write_json<T: Serialize>(&mut self, name: &str, schema: &str, data: &T) -> Result<()> {
        let doc = serde_json::json!({
            "schema": schema,
            "version": ARTIFACT_VERSION,
            "data": data,
        });
        let text = serde_json::to_string_pretty(&doc).expect("artifact serializes");
        self.write_text(name, &(text + "\n"))
    }

    /// One JSON object per line.
    pub fn write_json_lines<T: Serialize>(&mut self, name: &str, items: &[T]) -> Result<()> {
        let mut s = String::new();
        for it in items {
            s.push_str(&serde_json::to_string(it).expect("artifact serializes"));
            s.push('\n');
        }
        self.write_text(name, &s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    pub name: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub schema: &'static str,
    pub version: u32,
    pub crate_version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub stages: Vec<Stage>,
    pub checks: Vec<Check>,
    pub files: Vec<String>,
    pub error: Option<String>,
    pub exit_code: i32,
}

pub const MANIFEST_NAME: &str = "manifest.json";

impl RunManifest {
    pub fn new(command: &str, config_hash: String, seed: u64) -> Self {
        RunManifest {
            schema: "sncontrol/manifest",
            version: ARTIFACT_VERSION,
            crate_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config_hash,
            seed,
            stages: Vec::new(),
            checks: Vec::new(),
            files: Vec::new(),
            error: None,
            exit_code: 0,
        }
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(dir.join(MANIFEST_NAME), text + "\n")?;
        Ok(())
    }
}
