use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Writes artifacts into one directory and records their hashes. The
/// manifest itself is written last by [`ArtifactWriter::finish`].
#[derive(Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    kind: String,
    seed: u64,
    config_sha256: String,
    entries: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub kind: String,
    pub seed: u64,
    pub config_sha256: String,
    pub artifacts: Vec<ManifestEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl ArtifactWriter {
    pub fn new(dir: &Path, kind: &str, seed: u64, config_text: &str) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            kind: kind.into(),
            seed,
            config_sha256: sha256_hex(config_text.as_bytes()),
            entries: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        std::fs::write(self.dir.join(name), bytes)?;
        self.entries.retain(|e| e.file != name);
        self.entries.push(ManifestEntry { file: name.into(), bytes: bytes.len(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    /// Serializes `value` as pretty JSON with a trailing newline.
    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_vec_pretty(value)?;
        s.push(b'\n');
        self.write(name, &s)
    }

    /// Runs `f` against an in-memory buffer and stores the result.
    pub fn write_with(&mut self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write(name, &buf)
    }

    pub fn finish(self) -> Result<Manifest> {
        let mut artifacts = self.entries;
        artifacts.sort_by(|a, b| a.file.cmp(&b.file));
        let m = Manifest { kind: self.kind, seed: self.seed, config_sha256: self.config_sha256, artifacts };
        let mut s = serde_json::to_vec_pretty(&m)?;
        s.push(b'\n');
        std::fs::write(self.dir.join("manifest.json"), s)?;
        Ok(m)
    }
}
