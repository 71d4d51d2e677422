use std::path::PathBuf;
use std::time::Duration;

use preprank_core::arff::parse_arff_with_class;
use preprank_core::dataset::Dataset;
use serde_json::Value;

use crate::cache::{Cache, Lookup};
use crate::FetchError;

pub const DEFAULT_BASE_URL: &str = "https://www.openml.org/api/v1/json";

/// Fetches the body at a URL.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<Vec<u8>, FetchError>;
}

pub struct HttpTransport {
    agent: ureq::Agent,
    max_bytes: u64,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder().timeout_global(Some(timeout)).build();
        HttpTransport { agent: ureq::Agent::new_with_config(config), max_bytes: 512 * 1024 * 1024 }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        HttpTransport::new(Duration::from_secs(120))
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>, FetchError> {
        log::info!("GET {url}");
        let network = |e: ureq::Error| match e {
            ureq::Error::StatusCode(status) => FetchError::Http { status, url: url.to_string() },
            other => FetchError::Network { url: url.to_string(), message: other.to_string() },
        };
        let mut resp = self.agent.get(url).call().map_err(network)?;
        resp.body_mut().with_config().limit(self.max_bytes).read_to_vec().map_err(network)
    }
}

/// Refuses every request; for runs that must be served from the cache.
pub struct OfflineTransport;

impl Transport for OfflineTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>, FetchError> {
        Err(FetchError::Network { url: url.to_string(), message: "offline mode: not in cache".into() })
    }
}

/// Serves URLs from files in a directory, named by [`FixtureTransport::file_name`].
pub struct FixtureTransport {
    dir: PathBuf,
}

impl FixtureTransport {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FixtureTransport { dir: dir.into() }
    }

    /// URL without its scheme, with every character outside `[A-Za-z0-9.-]`
    /// replaced by `_`.
    pub fn file_name(url: &str) -> String {
        let rest = url.split_once("://").map_or(url, |(_, r)| r);
        rest.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
    }
}

impl Transport for FixtureTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>, FetchError> {
        let path = self.dir.join(Self::file_name(url));
        match std::fs::read(&path) {
            Ok(b) => Ok(b),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(FetchError::Http { status: 404, url: url.to_string() }),
            Err(e) => Err(FetchError::io(&path, e)),
        }
    }
}

/// The fields of an OpenML dataset description that loading needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetDescription {
    pub id: u64,
    pub name: String,
    pub format: String,
    pub url: String,
    pub default_target_attribute: Option<String>,
}

impl DatasetDescription {
    /// Parses the `{"data_set_description": {...}}` document. OpenML encodes
    /// numbers as strings, so both are accepted.
    pub fn from_json(bytes: &[u8]) -> Result<Self, FetchError> {
        let bad = |m: &str| FetchError::Description(m.to_string());
        let root: Value = serde_json::from_slice(bytes).map_err(|e| FetchError::Description(e.to_string()))?;
        let d = root.get("data_set_description").ok_or_else(|| bad("missing data_set_description"))?;
        let text = |key: &str| -> Option<String> {
            match d.get(key)? {
                Value::String(s) => Some(s.clone()),
                Value::Number(n) => Some(n.to_string()),
                _ => None,
            }
        };
        let id = text("id").and_then(|s| s.parse().ok()).ok_or_else(|| bad("missing or invalid id"))?;
        Ok(DatasetDescription {
            id,
            name: text("name").ok_or_else(|| bad("missing name"))?,
            format: text("format").unwrap_or_else(|| "ARFF".into()),
            url: text("url").ok_or_else(|| bad("missing url"))?,
            default_target_attribute: text("default_target_attribute")
                .and_then(|t| t.split(',').next().map(|s| s.trim().to_string()))
                .filter(|t| !t.is_empty()),
        })
    }
}

pub struct OpenMlClient {
    base_url: String,
    transport: Box<dyn Transport>,
    cache: Cache,
}

impl OpenMlClient {
    /// HTTP client against the public server.
    pub fn new(cache: Cache) -> Self {
        Self::with_transport(DEFAULT_BASE_URL, Box::new(HttpTransport::default()), cache)
    }

    pub fn with_transport(base_url: &str, transport: Box<dyn Transport>, cache: Cache) -> Self {
        OpenMlClient { base_url: base_url.trim_end_matches('/').to_string(), transport, cache }
    }

    pub fn cache(&self) -> &Cache {
        &self.cache
    }

    fn cached_get(&self, key: &str, url: &str) -> Result<Vec<u8>, FetchError> {
        let corrupt = match self.cache.lookup(key) {
            Lookup::Hit(bytes) => {
                log::debug!("cache hit {key}");
                return Ok(bytes);
            }
            Lookup::Miss => false,
            Lookup::Corrupt => {
                log::warn!("cache entry {key} failed its checksum; refetching");
                true
            }
        };
        let bytes = self.transport.get(url).map_err(|e| {
            if corrupt {
                FetchError::Checksum { key: key.to_string(), source: Box::new(e) }
            } else {
                e
            }
        })?;
        self.cache.put(key, &bytes)?;
        Ok(bytes)
    }

    pub fn description(&self, id: u64) -> Result<DatasetDescription, FetchError> {
        let url = format!("{}/data/{id}", self.base_url);
        let bytes = self.cached_get(&format!("openml/{id}/description.json"), &url)?;
        let desc = DatasetDescription::from_json(&bytes)?;
        if desc.id != id {
            return Err(FetchError::Description(format!("asked for id {id}, got {}", desc.id)));
        }
        Ok(desc)
    }

    /// The dataset with its default target attribute as class, named after
    /// the OpenML dataset name. Errors are wrapped with the id.
    pub fn dataset(&self, id: u64) -> Result<Dataset, FetchError> {
        self.dataset_inner(id).map_err(|e| FetchError::Dataset { id, source: Box::new(e) })
    }

    fn dataset_inner(&self, id: u64) -> Result<Dataset, FetchError> {
        let desc = self.description(id)?;
        if !desc.format.eq_ignore_ascii_case("arff") {
            return Err(FetchError::Format(desc.format));
        }
        let bytes = self.cached_get(&format!("openml/{id}/dataset.arff"), &desc.url)?;
        let text = String::from_utf8_lossy(&bytes);
        let ds = parse_arff_with_class(&text, desc.default_target_attribute.as_deref())?;
        Ok(ds.with_name(desc.name))
    }
}
