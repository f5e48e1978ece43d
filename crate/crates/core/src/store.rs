//! On-disk formats: models as JSON Lines, distance matrices as a small JSON
//! header followed by little-endian `f32` values.
//!
//! Matrix layout: the 4-byte magic `LRDM`, the header length as a
//! little-endian `u32`, the UTF-8 JSON header, then the payload. The header
//! carries the keys, the layout and the SHA-256 of the payload bytes.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::anonymity::{CrossMatrix, DistanceMatrix};
use crate::corpus::ProfileKey;
use crate::error::{Error, Result};
use crate::lm::{ModelSet, UnigramModel};

pub const MATRIX_MAGIC: &[u8; 4] = b"LRDM";
pub const MATRIX_FORMAT: &str = "linkrisk-distance-matrix";
pub const MATRIX_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ModelRecord {
    Profile {
        key: ProfileKey,
        counts: BTreeMap<String, u64>,
    },
    Community {
        key: String,
        counts: BTreeMap<String, u64>,
    },
    Global {
        key: Option<String>,
        counts: BTreeMap<String, u64>,
    },
}

fn write_record<W: Write>(w: &mut W, r: &ModelRecord) -> Result<()> {
    serde_json::to_writer(&mut *w, r)?;
    w.write_all(b"\n").map_err(|e| Error::io("<model store>", e))
}

/// One record per model: profiles, then communities, then the global model.
pub fn write_models<W: Write>(mut w: W, models: &ModelSet) -> Result<()> {
    for (k, m) in &models.profiles {
        write_record(
            &mut w,
            &ModelRecord::Profile {
                key: k.clone(),
                counts: m.counts().clone(),
            },
        )?;
    }
    for (k, m) in &models.communities {
        write_record(
            &mut w,
            &ModelRecord::Community {
                key: k.clone(),
                counts: m.counts().clone(),
            },
        )?;
    }
    write_record(
        &mut w,
        &ModelRecord::Global {
            key: None,
            counts: models.global.counts().clone(),
        },
    )
}

pub fn read_models<R: BufRead>(r: R) -> Result<ModelSet> {
    let mut out = ModelSet::default();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<model store>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ModelRecord = serde_json::from_str(&line).map_err(|e| Error::Record {
            line: i + 1,
            message: e.to_string(),
        })?;
        let dup = |what: String| Error::Record {
            line: i + 1,
            message: format!("duplicate {what}"),
        };
        match rec {
            ModelRecord::Profile { key, counts } => {
                if out
                    .profiles
                    .insert(key.clone(), UnigramModel::from_counts(counts))
                    .is_some()
                {
                    return Err(dup(format!("profile {key}")));
                }
            }
            ModelRecord::Community { key, counts } => {
                if out
                    .communities
                    .insert(key.clone(), UnigramModel::from_counts(counts))
                    .is_some()
                {
                    return Err(dup(format!("community {key}")));
                }
            }
            ModelRecord::Global { counts, .. } => out.global = UnigramModel::from_counts(counts),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Strict upper triangle of a symmetric matrix, row-major.
    UpperTriangle,
    /// Full rows-by-columns matrix, row-major.
    Rectangular,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(bound(deserialize = "R: DeserializeOwned, C: DeserializeOwned"))]
struct Header<R, C> {
    format: String,
    version: u32,
    layout: Layout,
    dtype: String,
    rows: Vec<R>,
    #[serde(default = "Vec::new")]
    cols: Vec<C>,
    n_values: usize,
    sha256: String,
}

fn payload(values: &[f64]) -> Vec<u8> {
    values.iter().flat_map(|v| (*v as f32).to_le_bytes()).collect()
}

fn write_matrix<W: Write, R: Serialize, C: Serialize>(mut w: W, header: &Header<R, C>, bytes: &[u8]) -> Result<()> {
    let h = serde_json::to_vec(header)?;
    let len = u32::try_from(h.len()).map_err(|_| Error::Format("header too large".into()))?;
    let io = |e| Error::io("<matrix>", e);
    w.write_all(MATRIX_MAGIC).map_err(io)?;
    w.write_all(&len.to_le_bytes()).map_err(io)?;
    w.write_all(&h).map_err(io)?;
    w.write_all(bytes).map_err(io)?;
    w.flush().map_err(io)
}

fn read_matrix<Rd: Read, R: DeserializeOwned, C: DeserializeOwned>(mut r: Rd) -> Result<(Header<R, C>, Vec<f64>)> {
    let io = |e| Error::io("<matrix>", e);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != MATRIX_MAGIC {
        return Err(Error::Format("not a distance matrix file".into()));
    }
    let mut len = [0u8; 4];
    r.read_exact(&mut len).map_err(io)?;
    let mut h = vec![0u8; u32::from_le_bytes(len) as usize];
    r.read_exact(&mut h).map_err(io)?;
    let header: Header<R, C> = serde_json::from_slice(&h)?;
    if header.format != MATRIX_FORMAT || header.version != MATRIX_VERSION || header.dtype != "f32le" {
        return Err(Error::Format(format!(
            "unsupported matrix {} v{} ({})",
            header.format, header.version, header.dtype
        )));
    }
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(io)?;
    if bytes.len() != header.n_values * 4 {
        return Err(Error::Format(format!(
            "payload has {} bytes, header announces {} values",
            bytes.len(),
            header.n_values
        )));
    }
    if hex::encode(Sha256::digest(&bytes)) != header.sha256 {
        return Err(Error::Format("checksum mismatch".into()));
    }
    let values = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    Ok((header, values))
}

/// Write a symmetric matrix as its upper triangle. Values are stored as
/// `f32`.
pub fn write_distance_matrix<W: Write, K: Serialize>(w: W, m: &DistanceMatrix<K>) -> Result<()> {
    let bytes = payload(m.upper());
    let header: Header<&K, ()> = Header {
        format: MATRIX_FORMAT.into(),
        version: MATRIX_VERSION,
        layout: Layout::UpperTriangle,
        dtype: "f32le".into(),
        rows: m.keys().iter().collect(),
        cols: Vec::new(),
        n_values: m.upper().len(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    };
    write_matrix(w, &header, &bytes)
}

pub fn read_distance_matrix<R, K>(r: R) -> Result<DistanceMatrix<K>>
where
    R: Read,
    K: DeserializeOwned + Ord + Clone + Send + Sync,
{
    let (header, values) = read_matrix::<R, K, serde_json::Value>(r)?;
    if header.layout != Layout::UpperTriangle {
        return Err(Error::Format("expected an upper-triangle matrix".into()));
    }
    DistanceMatrix::from_upper(header.rows, values)
}

pub fn write_cross_matrix<W: Write, R: Serialize, C: Serialize>(w: W, m: &CrossMatrix<R, C>) -> Result<()> {
    let bytes = payload(m.data());
    let header = Header {
        format: MATRIX_FORMAT.into(),
        version: MATRIX_VERSION,
        layout: Layout::Rectangular,
        dtype: "f32le".into(),
        rows: m.rows().iter().collect::<Vec<_>>(),
        cols: m.cols().iter().collect::<Vec<_>>(),
        n_values: m.data().len(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    };
    write_matrix(w, &header, &bytes)
}

pub fn read_cross_matrix<Rd, R, C>(r: Rd) -> Result<CrossMatrix<R, C>>
where
    Rd: Read,
    R: DeserializeOwned + Send + Sync,
    C: DeserializeOwned + Send + Sync,
{
    let (header, values) = read_matrix::<Rd, R, C>(r)?;
    if header.layout != Layout::Rectangular {
        return Err(Error::Format("expected a rectangular matrix".into()));
    }
    CrossMatrix::from_data(header.rows, header.cols, values)
}
