//! Input bookkeeping, atomic output writes and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const TOOL: &str = "postedit";

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    output: FileDigest,
    inputs: &'a [FileDigest],
    seed: Option<u64>,
    params: &'a serde_json::Value,
}

/// One subcommand invocation: what it read and what it is about to write.
#[derive(Debug)]
pub struct Run {
    command: &'static str,
    pub seed: Option<u64>,
    pub params: serde_json::Value,
    inputs: Vec<FileDigest>,
    outputs: Vec<(PathBuf, String)>,
}

impl Run {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            seed: None,
            params: serde_json::Value::Null,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Reads a UTF-8 input file and records its digest.
    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes)
            .map_err(|_| CliError::validation(format!("{}: not valid UTF-8", path.display())))
    }

    /// Queues an output; nothing touches the disk until [`Run::commit`].
    pub fn emit(&mut self, path: impl Into<PathBuf>, contents: String) {
        self.outputs.push((path.into(), contents));
    }

    /// Writes every queued output and its manifest through temporary files
    /// in the destination directory, renaming only after all are written.
    pub fn commit(self) -> Result<()> {
        let mut staged = Vec::new();
        for (path, contents) in &self.outputs {
            let manifest = Manifest {
                tool: TOOL,
                version: env!("CARGO_PKG_VERSION"),
                command: self.command,
                output: FileDigest {
                    path: path.display().to_string(),
                    sha256: sha256_hex(contents.as_bytes()),
                },
                inputs: &self.inputs,
                seed: self.seed,
                params: &self.params,
            };
            let mut manifest_text =
                serde_json::to_string_pretty(&manifest).expect("manifest serializes");
            manifest_text.push('\n');
            staged.push((stage(path, contents.as_bytes())?, path.clone()));
            let mpath = manifest_path(path);
            staged.push((stage(&mpath, manifest_text.as_bytes())?, mpath));
        }
        for (tmp, dest) in staged {
            tmp.persist(&dest)
                .map_err(|e| CliError::io(format!("{}: {}", dest.display(), e.error)))?;
        }
        Ok(())
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

fn stage(dest: &Path, bytes: &[u8]) -> Result<tempfile::NamedTempFile> {
    let dir = match dest.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let io_err = |e: std::io::Error| CliError::io(format!("{}: {e}", dest.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    Ok(tmp)
}
