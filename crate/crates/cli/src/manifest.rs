use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
struct FileEntry {
    path: PathBuf,
    bytes: u64,
    sha256: String,
}

fn entry(path: &Path) -> Result<FileEntry> {
    let data = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(FileEntry {
        path: path.to_path_buf(),
        bytes: data.len() as u64,
        sha256: hex::encode(Sha256::digest(&data)),
    })
}

/// Record of one invocation: parameters, input and output files with
/// checksums, and free-form details.
#[derive(Debug)]
pub struct Manifest {
    command: String,
    params: Map<String, Value>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    details: Map<String, Value>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Manifest {
            command: command.to_string(),
            params: Map::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            details: Map::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.params
            .insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.details
            .insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn input(&mut self, p: impl Into<PathBuf>) -> &mut Self {
        self.inputs.push(p.into());
        self
    }

    pub fn output(&mut self, p: impl Into<PathBuf>) -> &mut Self {
        self.outputs.push(p.into());
        self
    }

    fn to_json(&self, workers: usize, ignored: &[String]) -> Result<Value> {
        Ok(json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "workers": workers,
            "params": self.params,
            "ignored_config_keys": ignored,
            "inputs": self.inputs.iter().map(|p| entry(p)).collect::<Result<Vec<_>>>()?,
            "outputs": self.outputs.iter().map(|p| entry(p)).collect::<Result<Vec<_>>>()?,
            "details": self.details,
        }))
    }

    /// Write `manifest.json` into `dir`, or print it to stderr as one line.
    pub fn finish(&self, dir: Option<&Path>, workers: usize, ignored: &[String]) -> Result<()> {
        let v = self.to_json(workers, ignored)?;
        match dir {
            Some(d) => {
                let path = d.join("manifest.json");
                fs::write(&path, serde_json::to_string_pretty(&v)? + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            None => eprintln!("manifest: {}", serde_json::to_string(&v)?),
        }
        Ok(())
    }
}
