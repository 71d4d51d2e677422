//! Corpus manifests: one dataset per line, either an OpenML id (`61` or
//! `openml:61`) or a local `.arff`/`.csv` path relative to the manifest,
//! optionally followed by `class=<attribute>`. `#` starts a comment.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use preprank_core::arff::parse_arff_with_class;
use preprank_core::csv_io::{parse_csv, ClassColumn};
use preprank_core::dataset::Dataset;
use preprank_core::exec;

use crate::{FetchError, OpenMlClient};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ManifestEntry {
    OpenMl(u64),
    File { path: PathBuf, class: Option<String> },
}

impl fmt::Display for ManifestEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifestEntry::OpenMl(id) => write!(f, "openml:{id}"),
            ManifestEntry::File { path, .. } => write!(f, "{}", path.display()),
        }
    }
}

pub fn parse_manifest(text: &str, base_dir: &Path) -> Result<Vec<ManifestEntry>, FetchError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| FetchError::Manifest { line: i + 1, message };
        let mut words = body.split_whitespace();
        let first = words.next().expect("non-empty line");
        let mut class = None;
        for w in words {
            match w.strip_prefix("class=") {
                Some(c) if !c.is_empty() => class = Some(c.to_string()),
                _ => return Err(err(format!("unexpected `{w}`"))),
            }
        }
        let id_text = first.strip_prefix("openml:").unwrap_or(first);
        if first.starts_with("openml:") || id_text.bytes().all(|b| b.is_ascii_digit()) {
            let id = id_text.parse().map_err(|_| err(format!("invalid OpenML id `{id_text}`")))?;
            if class.is_some() {
                return Err(err("OpenML entries use their default target; `class=` is not allowed".into()));
            }
            out.push(ManifestEntry::OpenMl(id));
        } else {
            out.push(ManifestEntry::File { path: base_dir.join(first), class });
        }
    }
    Ok(out)
}

/// Loads one entry: a local file, or an OpenML id through `client`.
pub fn load_entry(entry: &ManifestEntry, client: &OpenMlClient) -> Result<Dataset, FetchError> {
    match entry {
        ManifestEntry::OpenMl(id) => client.dataset(*id),
        ManifestEntry::File { path, class } => load_file(path, class.as_deref()),
    }
}

fn load_file(path: &Path, class: Option<&str>) -> Result<Dataset, FetchError> {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset").to_string();
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let bytes = std::fs::read(path).map_err(|e| FetchError::io(path, e))?;
    let ds = match ext.as_str() {
        "arff" => parse_arff_with_class(&String::from_utf8_lossy(&bytes), class)?,
        "csv" => {
            let column = class.map_or(ClassColumn::Last, ClassColumn::from);
            parse_csv(&bytes[..], &stem, column, &HashMap::new())?
        }
        other => return Err(FetchError::Format(other.to_string())),
    };
    Ok(ds.with_name(stem))
}

/// Datasets that loaded, and the entries that did not with their errors.
#[derive(Debug, Default)]
pub struct Corpus {
    pub datasets: Vec<Dataset>,
    pub failures: Vec<(String, FetchError)>,
}

/// Loads every manifest entry in order; failures are collected, not fatal,
/// unless nothing loads or the manifest is empty. Names
/// repeated within the corpus get a `-2`, `-3`, ... suffix so they stay unique.
pub fn load_corpus(manifest: &Path, client: &OpenMlClient) -> Result<Corpus, FetchError> {
    let text = std::fs::read_to_string(manifest).map_err(|e| FetchError::io(manifest, e))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let entries = parse_manifest(&text, base)?;
    if entries.is_empty() {
        return Err(FetchError::Corpus(format!("{} lists no datasets", manifest.display())));
    }
    let loaded = exec::map(&entries, |e| load_entry(e, client));
    let mut corpus = Corpus::default();
    let mut seen = HashSet::new();
    for (entry, result) in entries.iter().zip(loaded) {
        match result {
            Ok(ds) => {
                let mut name = ds.name().to_string();
                let mut n = 2;
                while !seen.insert(name.clone()) {
                    name = format!("{}-{n}", ds.name());
                    n += 1;
                }
                corpus.datasets.push(ds.with_name(name));
            }
            Err(e) => {
                log::warn!("{entry}: {e}");
                corpus.failures.push((entry.to_string(), e));
            }
        }
    }
    if corpus.datasets.is_empty() {
        return Err(FetchError::Corpus(format!("all {} entries failed to load", entries.len())));
    }
    Ok(corpus)
}
