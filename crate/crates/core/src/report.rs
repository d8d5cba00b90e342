//! Report plumbing for the command-line driver: output-directory
//! resolution, run-configuration headers, and deterministic CSV/JSON file
//! writers.
//!
//! Every output file begins with a header block carrying the tool version,
//! the fully resolved run configuration, and the seed, so a file is
//! self-describing and a rerun with the same flags is byte-identical. CSV
//! files carry the block as `#`-prefixed comment lines; JSON files embed
//! the same fields as the leading keys of the top-level object (a comment
//! prefix would break JSON parsing).

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

/// Environment variable consulted for the default output directory when
/// `--out` is not given.
pub const OUT_DIR_ENV: &str = "WEAKMUL_OUT";

/// Fallback output directory when neither `--out` nor the environment
/// variable is set.
pub const DEFAULT_OUT_DIR: &str = "runs";

/// Tool name stamped into headers.
pub const TOOL_NAME: &str = "weakmul";

/// Crate version stamped into headers.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Resolve the output directory: explicit flag, then the environment
/// variable, then [`DEFAULT_OUT_DIR`].
pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Fully resolved run configuration, serialized verbatim into every output
/// header.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    /// All flags resolved to concrete values (defaults applied).
    pub flags: serde_json::Value,
    pub seed: u64,
    pub out_dir: String,
}

impl RunConfig {
    pub fn new(
        command: &str,
        flags: serde_json::Value,
        seed: u64,
        out_dir: &Path,
    ) -> Self {
        RunConfig {
            command: command.to_string(),
            flags,
            seed,
            out_dir: out_dir.display().to_string(),
        }
    }

    /// `#`-prefixed header block for CSV outputs.
    pub fn csv_header(&self) -> String {
        format!(
            "# tool: {TOOL_NAME} {TOOL_VERSION}\n# command: {}\n# config: {}\n# seed: {}\n",
            self.command,
            serde_json::to_string(self).expect("config serializes"),
            self.seed
        )
    }
}

/// Envelope for JSON outputs: header fields first, then the report payload.
#[derive(Serialize)]
struct JsonEnvelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    report: &'a T,
}

/// Write a CSV file: header block, then the body produced by `body`.
pub fn write_csv_file<F>(path: &Path, config: &RunConfig, body: F) -> Result<()>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    buf.extend_from_slice(config.csv_header().as_bytes());
    body(&mut buf)?;
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, buf)?;
    Ok(())
}

/// Write a JSON file wrapping `report` in the header envelope with stable
/// 2-space pretty formatting and a trailing newline.
pub fn write_json_file<T: Serialize>(path: &Path, config: &RunConfig, report: &T) -> Result<()> {
    let envelope = JsonEnvelope {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        config,
        report,
    };
    let mut text = serde_json::to_string_pretty(&envelope)
        .map_err(|e| crate::error::Error::InvalidConfig(format!("serialize report: {e}")))?;
    text.push('\n');
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}
