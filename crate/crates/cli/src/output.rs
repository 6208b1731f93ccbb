//! Tables, atomic file output and run manifests.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    pub fn opt(x: Option<f64>) -> Cell {
        x.map_or(Cell::Empty, Cell::Float)
    }

    fn csv_field(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            // 17 significant digits: parses back to the same f64.
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json_value(&self) -> Value {
        match self {
            Cell::Empty => Value::Null,
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field))?;
        }
        w.into_inner()
            .map_err(|e| CliError::Encoding(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "columns": self.columns,
            "rows": self.rows.iter()
                .map(|r| r.iter().map(Cell::json_value).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn encode(&self, format: Format) -> CliResult<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => json_bytes(&self.to_json()),
        }
    }
}

pub fn json_bytes(v: &Value) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(v)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes via a temporary file in the target directory and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub path: PathBuf,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub version: String,
    pub wall_seconds: f64,
    pub outputs: Vec<OutputFile>,
    pub warnings: usize,
    pub summary: Value,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Collects outputs of one command and finishes with its manifest.
pub struct Run {
    command: &'static str,
    config: Value,
    started: Instant,
    outputs: Vec<OutputFile>,
}

impl Run {
    pub fn start(command: &'static str, config: &impl Serialize) -> CliResult<Self> {
        Ok(Self {
            command,
            config: serde_json::to_value(config)?,
            started: Instant::now(),
            outputs: Vec::new(),
        })
    }

    /// Writes `bytes` to `out`, or to standard output when `out` is `None`.
    pub fn emit(&mut self, out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
        match out {
            Some(path) => {
                write_atomic(path, bytes)?;
                self.outputs.push(OutputFile {
                    path: path.to_path_buf(),
                    bytes: bytes.len(),
                    sha256: hex::encode(Sha256::digest(bytes)),
                });
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(bytes)?;
                stdout.flush()?;
            }
        }
        Ok(())
    }

    /// Writes `<first output>.manifest.json` when anything went to a file.
    pub fn finish(self, warnings: usize, summary: Value) -> CliResult<Option<PathBuf>> {
        let Some(first) = self.outputs.first() else {
            return Ok(None);
        };
        let path = manifest_path(&first.path);
        let manifest = RunManifest {
            command: self.command.to_string(),
            config: self.config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_seconds: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs,
            warnings,
            summary,
        };
        write_atomic(&path, &json_bytes(&serde_json::to_value(&manifest)?)?)?;
        Ok(Some(path))
    }
}

/// Row-count progress on standard error, about every 5%.
pub struct Progress {
    label: &'static str,
    quiet: bool,
}

impl Progress {
    pub fn new(label: &'static str, quiet: bool) -> Self {
        Self { label, quiet }
    }

    pub fn tick(&self, done: usize, total: usize) {
        if self.quiet {
            return;
        }
        let stride = (total / 20).max(1);
        if done.is_multiple_of(stride) || done == total {
            eprintln!("{}: {done}/{total}", self.label);
        }
    }

    pub fn note(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{}: {msg}", self.label);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_fields_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = Cell::Float(x).csv_field();
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(Cell::Empty.csv_field(), "");
        assert_eq!(Cell::Float(f64::NAN).json_value(), Value::Null);
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(
            manifest_path(Path::new("runs/scan.csv")),
            Path::new("runs/scan.csv.manifest.json")
        );
    }

    #[test]
    fn csv_has_header_and_crlf() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec![Cell::Int(1), Cell::Text("x,y".into())]);
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(s, "a,b\r\n1,\"x,y\"\r\n");
    }
}
