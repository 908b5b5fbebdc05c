//! Output directory bookkeeping: every file written through an
//! [`OutputSet`] is hashed and listed in `manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::formats::json_bytes;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

pub fn sha256_hex(data: &[u8]) -> String {
    format!("{:x}", Sha256::digest(data))
}

#[derive(Debug)]
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputSet {
    pub fn create(dir: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(OutputSet { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, data: &[u8]) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, data).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(FileEntry { path: name.to_string(), sha256: sha256_hex(data), bytes: data.len() as u64 });
        Ok(())
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    /// Writes the manifest; `run` describes the inputs of the command.
    pub fn finish<T: Serialize>(self, command: &str, run: &T, warnings: Vec<String>) -> anyhow::Result<PathBuf> {
        let manifest = Manifest {
            tool: "efimov",
            version: env!("CARGO_PKG_VERSION"),
            command,
            run,
            warnings,
            files: self.files,
        };
        let path = self.dir.join(MANIFEST_NAME);
        fs::write(&path, json_bytes(&manifest)?).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

#[derive(Serialize)]
struct Manifest<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    run: &'a T,
    warnings: Vec<String>,
    files: Vec<FileEntry>,
}
