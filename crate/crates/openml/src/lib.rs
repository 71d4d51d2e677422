//! Fetching datasets from OpenML by id, with a local checksummed cache, and
//! loading dataset corpora from manifest files.

mod cache;
mod client;
mod manifest;

pub use cache::{default_cache_dir, Cache, CacheEntry, CACHE_ENV};
pub use client::{DatasetDescription, FixtureTransport, HttpTransport, OfflineTransport, OpenMlClient, Transport, DEFAULT_BASE_URL};
pub use manifest::{load_corpus, load_entry, parse_manifest, Corpus, ManifestEntry};

use preprank_core::error::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum FetchError {
    #[error("network error for {url}: {message}")]
    Network { url: String, message: String },
    #[error("HTTP {status} for {url}")]
    Http { status: u16, url: String },
    #[error("malformed dataset description: {0}")]
    Description(String),
    #[error("unsupported dataset format `{0}`")]
    Format(String),
    #[error("dataset parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("cached {key} failed its checksum and could not be refetched: {source}")]
    Checksum { key: String, source: Box<FetchError> },
    #[error("OpenML dataset {id}: {source}")]
    Dataset { id: u64, source: Box<FetchError> },
    #[error("corpus: {0}")]
    Corpus(String),
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl FetchError {
    /// The error underneath any dataset-id or checksum wrapping.
    pub fn root(&self) -> &FetchError {
        match self {
            FetchError::Dataset { source, .. } | FetchError::Checksum { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        FetchError::Io { path: path.display().to_string(), message: e.to_string() }
    }
}
