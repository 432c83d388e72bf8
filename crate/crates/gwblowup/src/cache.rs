//! Line-oriented persistence for the memo store.
//!
//! Format: a header line `gwblowup-cache v1`, then one JSON object per line
//! with keys `d`, `alpha`, `N`, sorted by (d, alpha). Values are decimal
//! strings so consumers never need native big integers to read the file.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::MemoStore;
use crate::lattice::{canonical_from_parts, BigCount, CanonResult};

pub const CACHE_HEADER: &str = "gwblowup-cache v1";

#[derive(Debug, Serialize, Deserialize)]
pub struct CacheRecord {
    pub d: i64,
    pub alpha: Vec<i64>,
    #[serde(rename = "N")]
    pub value: String,
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("unsupported cache version: expected {CACHE_HEADER:?}, found {0:?}")]
    BadHeader(String),
    #[error("line {0}: malformed record: {1}")]
    BadRecord(usize, String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    PlainIo(#[from] std::io::Error),
}

/// Write the store to `dest`, returning the record count. Output is
/// byte-identical for equal stores.
pub fn save<W: Write>(store: &MemoStore, dest: W) -> Result<usize, CacheError> {
    let mut entries = store.entries();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = BufWriter::new(dest);
    writeln!(out, "{CACHE_HEADER}")?;
    for (key, value) in &entries {
        let c = key.class();
        let record = CacheRecord { d: c.d, alpha: c.alpha, value: value.to_string() };
        serde_json::to_writer(&mut out, &record).map_err(std::io::Error::from)?;
        writeln!(out)?;
    }
    out.flush()?;
    Ok(entries.len())
}

/// Read a store back. Rejects version mismatches and any record whose class
/// is not a canonical key or whose value is negative or unparseable.
pub fn load<R: Read>(source: R) -> Result<MemoStore, CacheError> {
    let mut lines = BufReader::new(source).lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header != CACHE_HEADER {
        return Err(CacheError::BadHeader(header));
    }
    let store = MemoStore::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let record: CacheRecord = serde_json::from_str(&line)
            .map_err(|e| CacheError::BadRecord(lineno, e.to_string()))?;
        let key = match canonical_from_parts(record.d, &record.alpha) {
            CanonResult::Key(key) if key.class().alpha == record.alpha => key,
            _ => {
                return Err(CacheError::BadRecord(
                    lineno,
                    format!("({}, {:?}) is not a canonical key", record.d, record.alpha),
                ))
            }
        };
        let value = BigCount::from_str(&record.value).map_err(|e| {
            CacheError::BadRecord(lineno, format!("bad value {:?}: {e}", record.value))
        })?;
        if value < BigCount::zero() {
            return Err(CacheError::BadRecord(
                lineno,
                format!("negative value {:?}", record.value),
            ));
        }
        store.insert(key, value);
    }
    Ok(store)
}

pub fn save_to_path(store: &MemoStore, path: &Path) -> Result<usize, CacheError> {
    let file = File::create(path).map_err(|source| CacheError::Io {
        path: path.display().to_string(),
        source,
    })?;
    save(store, file)
}

pub fn load_from_path(path: &Path) -> Result<MemoStore, CacheError> {
    let file = File::open(path).map_err(|source| CacheError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load(file)
}
