//! Run outputs: CSV tables, JSON summaries, and the run manifest.
//!
//! Every numeric cell is printed with 17 significant digits, enough to
//! round-trip an `f64` exactly, so repeated runs diff byte-identically
//! and regressions show up as textual changes. Files end every line with
//! a bare LF on every platform. The manifest is written last and
//! atomically (temp file + rename): its presence certifies that the run
//! it describes completed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// Formats a float with 17 significant digits (exact `f64` round-trip).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

/// Writes a CSV table: header row, then one row per record, LF endings.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len(), "row width must match the header");
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text).map_err(io_err(path))
}

/// Writes a value as pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::MalformedFile { path: path.to_path_buf(), detail: e.to_string() })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// What a completed run consisted of. Written alongside the outputs; a
/// missing manifest means the run died partway.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    /// Subcommand that produced the outputs.
    pub command: String,
    /// Configuration file the run was driven by.
    pub config: String,
    /// Master seed after precedence (flag over config over default).
    pub master_seed: u64,
    /// Tool version that wrote the outputs.
    pub version: String,
    /// RFC 3339 timestamps bracketing the run.
    pub started_at: String,
    pub finished_at: String,
    /// Files the run wrote, relative to the output directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    /// Starts the clock for a run.
    pub fn begin(command: &str, config: &Path, master_seed: u64) -> Self {
        Self {
            command: command.to_string(),
            config: config.display().to_string(),
            master_seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_at: chrono::Utc::now().to_rfc3339(),
            finished_at: String::new(),
            outputs: Vec::new(),
        }
    }

    /// Stamps the end time, records the outputs, and writes
    /// `manifest.json` into `dir` atomically. Call after every other
    /// output file is on disk.
    pub fn finish(mut self, dir: &Path, outputs: &[PathBuf]) -> Result<PathBuf> {
        self.finished_at = chrono::Utc::now().to_rfc3339();
        self.outputs = outputs
            .iter()
            .map(|p| p.strip_prefix(dir).unwrap_or(p).display().to_string())
            .collect();
        let target = dir.join("manifest.json");
        let tmp = dir.join("manifest.json.tmp");
        {
            let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
            let mut text =
                serde_json::to_string_pretty(&self).expect("manifest fields always serialize");
            text.push('\n');
            f.write_all(text.as_bytes()).map_err(io_err(&tmp))?;
            f.sync_all().map_err(io_err(&tmp))?;
        }
        fs::rename(&tmp, &target).map_err(io_err(&target))?;
        Ok(target)
    }
}
