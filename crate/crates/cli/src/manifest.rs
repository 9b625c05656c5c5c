//! Run directories and the manifest written into each of them.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::Utc;
use serde::{Deserialize, Serialize};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SLE_PASSAGE_OUT";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Full argument vector, replayable with `sle-passage rerun`.
    pub argv: Vec<String>,
    pub parameters: serde_json::Value,
    pub seeds: Vec<u64>,
    pub outputs: Vec<String>,
    pub code_version: String,
    pub timestamp: String,
    pub threads: usize,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        argv: Vec<String>,
        parameters: serde_json::Value,
        seeds: Vec<u64>,
    ) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            argv,
            parameters,
            seeds,
            outputs: Vec::new(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: Utc::now().to_rfc3339(),
            threads: rayon::current_num_threads(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }
}

/// A fresh directory `<base>/<subcommand>-<timestamp>` for one run.
pub struct RunDir {
    pub path: PathBuf,
    pub manifest: RunManifest,
}

impl RunDir {
    pub fn create(base: &Path, manifest: RunManifest) -> Result<Self> {
        let stamp = Utc::now().format("%Y%m%dT%H%M%S%.3fZ");
        let mut path = base.join(format!("{}-{stamp}", manifest.subcommand));
        let mut k = 1;
        while path.exists() {
            path = base.join(format!("{}-{stamp}-{k}", manifest.subcommand));
            k += 1;
        }
        fs::create_dir_all(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(Self { path, manifest })
    }

    /// Path of an output file, recorded in the manifest.
    pub fn output(&mut self, name: &str) -> PathBuf {
        self.manifest.outputs.push(name.to_string());
        self.path.join(name)
    }

    /// CSV writer whose first line references the manifest.
    pub fn csv(&mut self, name: &str) -> Result<csv::Writer<fs::File>> {
        use std::io::Write;
        let path = self.output(name);
        let mut file =
            fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        writeln!(file, "# manifest: {MANIFEST_FILE}")?;
        Ok(csv::Writer::from_writer(file))
    }

    pub fn write_manifest(&self) -> Result<PathBuf> {
        let path = self.path.join(MANIFEST_FILE);
        fs::write(&path, serde_json::to_string_pretty(&self.manifest)?)?;
        Ok(path)
    }
}

/// `--out-dir`, else the environment variable, else `./sle-passage-out`.
pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("sle-passage-out"))
}
