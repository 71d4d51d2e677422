//! On-disk cache of downloaded files. Each entry is stored next to a sha256
//! digest; a read whose digest does not match is treated as a miss. Writes go
//! to a temporary file that is renamed into place, so readers never observe a
//! partial file.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::FetchError;

/// Environment variable overriding the cache location.
pub const CACHE_ENV: &str = "PREPRANK_CACHE";

/// `$PREPRANK_CACHE`, else `$XDG_CACHE_HOME/preprank`, else
/// `$HOME/.cache/preprank`, else `.preprank-cache`.
pub fn default_cache_dir() -> PathBuf {
    if let Some(p) = std::env::var_os(CACHE_ENV).filter(|p| !p.is_empty()) {
        return PathBuf::from(p);
    }
    if let Some(p) = std::env::var_os("XDG_CACHE_HOME").filter(|p| !p.is_empty()) {
        return PathBuf::from(p).join("preprank");
    }
    match std::env::var_os("HOME") {
        Some(h) => PathBuf::from(h).join(".cache").join("preprank"),
        None => PathBuf::from(".preprank-cache"),
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// A cached file and the digest recorded when it was stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheEntry {
    pub key: String,
    pub path: PathBuf,
    pub checksum: String,
    /// Seconds since the Unix epoch; `None` for entries written without one.
    pub fetched_at: Option<u64>,
}

/// Outcome of a cache lookup.
#[derive(Debug)]
pub enum Lookup {
    Hit(Vec<u8>),
    Miss,
    /// Present, but the content does not match its recorded digest.
    Corrupt,
}

#[derive(Clone, Debug)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, key: &str) -> PathBuf {
        self.root.join(key)
    }

    fn digest_path(&self, key: &str) -> PathBuf {
        self.root.join(format!("{key}.sha256"))
    }

    /// Digest file: hex sha256, optionally followed by the fetch time.
    pub fn entry(&self, key: &str) -> Option<CacheEntry> {
        let text = std::fs::read_to_string(self.digest_path(key)).ok()?;
        let mut words = text.split_whitespace();
        let checksum = words.next()?.to_string();
        let fetched_at = words.next().and_then(|w| w.parse().ok());
        Some(CacheEntry { key: key.to_string(), path: self.path(key), checksum, fetched_at })
    }

    pub fn lookup(&self, key: &str) -> Lookup {
        let (Ok(bytes), Some(entry)) = (std::fs::read(self.path(key)), self.entry(key)) else {
            return Lookup::Miss;
        };
        if entry.checksum == sha256_hex(&bytes) {
            Lookup::Hit(bytes)
        } else {
            Lookup::Corrupt
        }
    }

    /// The cached bytes for `key` if present and intact.
    pub fn get(&self, key: &str) -> Option<Vec<u8>> {
        match self.lookup(key) {
            Lookup::Hit(b) => Some(b),
            _ => None,
        }
    }

    pub fn put(&self, key: &str, bytes: &[u8]) -> Result<(), FetchError> {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        atomic_write(&self.path(key), bytes)?;
        atomic_write(&self.digest_path(key), format!("{} {now}\n", sha256_hex(bytes)).as_bytes())
    }
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), FetchError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| FetchError::io(dir, e))?;
    let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_nanos());
    let file = path.file_name().and_then(|f| f.to_str()).unwrap_or("entry");
    let tmp = dir.join(format!(".{file}.{}.{nanos}.tmp", std::process::id()));
    std::fs::write(&tmp, bytes).map_err(|e| FetchError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        FetchError::io(path, e)
    })
}
