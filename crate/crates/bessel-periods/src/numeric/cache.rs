//! Persistent moment cache: one JSON record per line, appended through a
//! write-temp-then-rename cycle so concurrent writers never corrupt the
//! file. Higher-precision records satisfy lower-precision requests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentKind {
    Ikm,
    IkmRegMinus1,
    IkmRegHalf,
    IkmCp,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentKey {
    pub kind: MomentKind,
    pub k: u32,
    pub i: u32,
    /// t-exponent (`-1` for the `dt/t` regularization).
    pub c: i32,
    pub digits: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentRecord {
    #[serde(flatten)]
    pub key: MomentKey,
    /// Decimal value in scientific notation.
    pub value: String,
    pub certified_digits: u32,
    /// Seconds since the epoch at creation time.
    pub created: String,
}

/// Seconds-since-epoch timestamp string.
pub fn now_timestamp() -> String {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs().to_string())
        .unwrap_or_else(|_| "0".into())
}

#[derive(Debug)]
pub struct MomentCache {
    path: PathBuf,
    write_lock: Mutex<()>,
}

impl MomentCache {
    /// Opens (or prepares) the cache file `moments.jsonl` under `dir`.
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            path: dir.join("moments.jsonl"),
            write_lock: Mutex::new(()),
        })
    }

    /// All parseable records; corrupt lines are skipped with a warning.
    pub fn load_all(&self) -> Vec<MomentRecord> {
        let Ok(text) = fs::read_to_string(&self.path) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<MomentRecord>(line) {
                Ok(rec) => out.push(rec),
                Err(e) => eprintln!(
                    "warning: skipping corrupt cache line {} in {}: {}",
                    idx + 1,
                    self.path.display(),
                    e
                ),
            }
        }
        out
    }

    /// Best record for `(kind, k, i, c)` with `certified_digits >= digits`.
    pub fn get(&self, kind: MomentKind, k: u32, i: u32, c: i32, digits: u32) -> Option<MomentRecord> {
        self.load_all()
            .into_iter()
            .filter(|r| {
                r.key.kind == kind
                    && r.key.k == k
                    && r.key.i == i
                    && r.key.c == c
                    && r.certified_digits >= digits
            })
            .max_by_key(|r| r.certified_digits)
    }

    /// Appends a record atomically: the whole file is rewritten to a
    /// temporary sibling and renamed over the original.
    pub fn put(&self, record: &MomentRecord) -> Result<()> {
        let _guard = self.write_lock.lock().unwrap();
        let existing = fs::read_to_string(&self.path).unwrap_or_default();
        let tmp = self.path.with_extension("jsonl.tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(existing.as_bytes())?;
            serde_json::to_writer(&mut f, record)
                .map_err(|e| crate::Error::Internal(format!("cache serialization: {}", e)))?;
            f.write_all(b"\n")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &self.path)?;
        Ok(())
    }
}
