//! Run manifests: a flat key-value record written beside every result file,
//! carrying enough to regenerate the output byte for byte.

use std::fmt::Display;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        let mut m = RunManifest {
            entries: Vec::new(),
        };
        m.set("command", command);
        m.set("version", env!("CARGO_PKG_VERSION"));
        m
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    /// Record a file's path, byte length, and SHA-256.
    pub fn set_file(&mut self, prefix: &str, path: &Path) -> io::Result<()> {
        let data = fs::read(path)?;
        self.set(&format!("{prefix}.path"), path.display());
        self.set(&format!("{prefix}.bytes"), data.len());
        self.set(&format!("{prefix}.sha256"), sha256_hex(&data));
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    /// Write `<out>.manifest` next to a result file.
    pub fn write_beside(&self, out: &Path) -> io::Result<PathBuf> {
        let mut path = out.as_os_str().to_owned();
        path.push(".manifest");
        let path = PathBuf::from(path);
        write_atomic(&path, self.render().as_bytes())?;
        Ok(path)
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    let digest = Sha256::digest(data);
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

pub fn sha256_bytes(data: &[u8]) -> [u8; 32] {
    Sha256::digest(data).into()
}

/// Write via a sibling temp file and rename, so readers never observe a
/// half-written result.
pub fn write_atomic(path: &Path, data: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, data)?;
    fs::rename(&tmp, path)
}
