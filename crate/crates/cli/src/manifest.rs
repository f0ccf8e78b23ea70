//! Run manifests and all-or-nothing output directories.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub wall_clock_secs: f64,
    pub version: String,
}

/// Files written into one output directory.
///
/// Everything created through [`Outputs::create`] is deleted again when the
/// value is dropped without [`Outputs::finish`] having succeeded, so a failed
/// command leaves no partial results behind.
pub struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
    created_dir: bool,
    started: Instant,
    done: bool,
}

impl Outputs {
    /// `started` is when the command began, for the manifest's wall-clock time.
    pub fn new(dir: &Path, started: Instant) -> Result<Self> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            created_dir,
            started,
            done: false,
        })
    }

    /// Opens `name` in the output directory for writing.
    pub fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let file =
            File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(path);
        Ok(BufWriter::new(file))
    }

    /// Writes the manifest and keeps every file.
    pub fn finish(
        mut self,
        command: &str,
        config: serde_json::Value,
        seed: u64,
        inputs: Vec<String>,
    ) -> Result<()> {
        let mut outputs: Vec<String> = self
            .written
            .iter()
            .map(|p| p.display().to_string())
            .collect();
        outputs.push(self.dir.join(MANIFEST_NAME).display().to_string());
        let manifest = RunManifest {
            command: command.to_string(),
            config,
            seed,
            inputs,
            outputs,
            wall_clock_secs: self.started.elapsed().as_secs_f64(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let mut w = self.create(MANIFEST_NAME)?;
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        writeln!(w)?;
        w.flush()?;
        self.done = true;
        Ok(())
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if self.done {
            return;
        }
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}
