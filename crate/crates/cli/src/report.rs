use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;
use ucc_core::Error as CoreError;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_STUCK: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;
pub const EXIT_DEPLETED: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Core(e) => match e {
                CoreError::NormalizationStuck(_) | CoreError::EdgeCaseMutualMatch { .. } => EXIT_STUCK,
                CoreError::SeriesDivergence(_) => EXIT_DIVERGENCE,
                CoreError::ReferenceDepleted(_) => EXIT_DEPLETED,
                _ => EXIT_INPUT,
            },
        }
    }

    pub fn status(&self) -> &'static str {
        match self.exit_code() {
            EXIT_STUCK => "stuck",
            EXIT_DIVERGENCE => "series-divergence",
            EXIT_DEPLETED => "reference-depleted",
            _ => "input-error",
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Header shared by every report. Keys serialize in sorted order, so equal
/// inputs give byte-identical output.
#[derive(Debug, Clone)]
pub struct RunInfo {
    pub command: &'static str,
    pub input_sha256: String,
    pub seed: u64,
    pub tolerances: BTreeMap<&'static str, f64>,
}

impl RunInfo {
    pub fn new(command: &'static str, input: &str, seed: u64) -> Self {
        RunInfo {
            command,
            input_sha256: sha256_hex(input.as_bytes()),
            seed,
            tolerances: BTreeMap::new(),
        }
    }

    pub fn tol(mut self, name: &'static str, value: f64) -> Self {
        self.tolerances.insert(name, value);
        self
    }
}

/// Finished command: what to print and how to exit.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Value,
    pub text: String,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn new(info: &RunInfo, status: &str, exit_code: i32, result: Value, text: String, warnings: Vec<String>) -> Self {
        let report = json!({
            "command": info.command,
            "engine_version": ENGINE_VERSION,
            "input_sha256": info.input_sha256,
            "seed": info.seed,
            "tolerances": info.tolerances,
            "status": status,
            "warnings": warnings,
            "result": result,
        });
        Outcome {
            exit_code,
            report,
            text,
            warnings,
        }
    }

    pub fn ok(info: &RunInfo, result: Value, text: String, warnings: Vec<String>) -> Self {
        Outcome::new(info, "ok", EXIT_OK, result, text, warnings)
    }

    pub fn failed(info: &RunInfo, err: &CliError) -> Self {
        Outcome::new(
            info,
            err.status(),
            err.exit_code(),
            json!({"error": err.to_string()}),
            format!("error: {}\n", err),
            vec![],
        )
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.report).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut s = self.text.clone();
                for w in &self.warnings {
                    s.push_str(&format!("warning: {}\n", w));
                }
                s
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{}.{}.tmp", name, std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}
