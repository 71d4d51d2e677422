//! Meta-database: one row per (dataset, transformation) recording the
//! dataset's characteristics, how the transformation changes them, and how
//! it changes a classifier's cross-validated performance.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifiers::{cross_validate, ClassifierKind, Learner, Measure, DEFAULT_FOLDS};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::exec;
use crate::metafeatures::{compute_meta_features, delta, MetaFeatureVector, META_FEATURE_NAMES, N_MODIFIABLE};
use crate::transforms::{apply, enumerate_applicable, TransformationSpec};

pub const SCHEMA_VERSION: u32 = 1;
/// Default zero band for the response: only exact ties count as no impact.
pub const DEFAULT_EPSILON: f64 = 1e-9;

const MAGIC: &str = "preprank-metadb";

/// Direction of a transformation's effect. Declaration order is the class
/// order used for probability outputs and tie-breaking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ResponseClass {
    Positive,
    Negative,
    Zero,
}

impl ResponseClass {
    pub const ORDER: [ResponseClass; 3] = [ResponseClass::Positive, ResponseClass::Negative, ResponseClass::Zero];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn token(self) -> &'static str {
        match self {
            ResponseClass::Positive => "positive",
            ResponseClass::Negative => "negative",
            ResponseClass::Zero => "zero",
        }
    }
}

impl fmt::Display for ResponseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for ResponseClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ResponseClass::ORDER
            .into_iter()
            .find(|c| c.token() == s)
            .ok_or_else(|| Error::MetaDb(format!("unknown response class `{s}`")))
    }
}

/// Signed relative change from `base` to `after` and its class.
pub fn label_response(base: f64, after: f64, epsilon: f64) -> (f64, ResponseClass) {
    let value = if base > 0.0 { (after - base) / base } else { after - base };
    let class = if value.abs() <= epsilon {
        ResponseClass::Zero
    } else if value > 0.0 {
        ResponseClass::Positive
    } else {
        ResponseClass::Negative
    };
    (value, class)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaInstance {
    pub dataset: String,
    pub transformation: TransformationSpec,
    /// Modifiable meta-features of the untransformed dataset.
    pub base_features: Vec<Option<f64>>,
    /// After minus before, same features.
    pub delta_features: Vec<Option<f64>>,
    pub base_performance: f64,
    pub response_value: f64,
    pub response_class: ResponseClass,
}

impl MetaInstance {
    /// Model input: base features, deltas, then base performance.
    pub fn feature_row(&self) -> Vec<Option<f64>> {
        feature_row(&self.base_features, &self.delta_features, self.base_performance)
    }
}

pub fn feature_row(base: &[Option<f64>], deltas: &[Option<f64>], base_performance: f64) -> Vec<Option<f64>> {
    let mut row = Vec::with_capacity(base.len() + deltas.len() + 1);
    row.extend_from_slice(base);
    row.extend_from_slice(deltas);
    row.push(Some(base_performance));
    row
}

/// Column names of a feature row.
pub fn feature_ids() -> Vec<String> {
    let names = &META_FEATURE_NAMES[..N_MODIFIABLE];
    names
        .iter()
        .map(|n| format!("mf_{n}"))
        .chain(names.iter().map(|n| format!("dmf_{n}")))
        .chain(std::iter::once("base_perf".to_string()))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetaDatabase {
    pub algorithm: ClassifierKind,
    pub measure: Measure,
    pub rows: Vec<MetaInstance>,
    pub schema_version: u32,
    /// Free-form `key=value` lines carried in the file header.
    pub provenance: Vec<String>,
}

impl MetaDatabase {
    pub fn new(algorithm: ClassifierKind, measure: Measure, rows: Vec<MetaInstance>) -> Self {
        MetaDatabase { algorithm, measure, rows, schema_version: SCHEMA_VERSION, provenance: Vec::new() }
    }

    /// Source datasets in first-appearance order.
    pub fn datasets(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.dataset.as_str()) {
                out.push(&r.dataset);
            }
        }
        out
    }

    /// Per-row weight `1/|T_d|` so every source dataset sums to one.
    pub fn weights(&self) -> Vec<f64> {
        let mut counts = std::collections::HashMap::<&str, usize>::new();
        for r in &self.rows {
            *counts.entry(&r.dataset).or_default() += 1;
        }
        self.rows.iter().map(|r| 1.0 / counts[r.dataset.as_str()] as f64).collect()
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        writeln!(
            out,
            "# {MAGIC} schema_version={} algorithm={} measure={}",
            self.schema_version, self.algorithm, self.measure
        )?;
        for line in &self.provenance {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        let mut header = feature_ids();
        header.pop();
        header.extend(["base_perf", "response_value", "response_class", "dataset", "transformation"].map(String::from));
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec: Vec<String> = r.base_features.iter().chain(&r.delta_features).map(|v| fmt_opt(*v)).collect();
            rec.push(r.base_performance.to_string());
            rec.push(r.response_value.to_string());
            rec.push(r.response_class.to_string());
            rec.push(r.dataset.clone());
            rec.push(r.transformation.to_string());
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 output")
    }

    pub fn read_from<R: Read>(input: R) -> Result<Self> {
        let mut reader = BufReader::new(input);
        let mut first = String::new();
        reader.read_line(&mut first)?;
        let (version, algorithm, measure) = parse_magic(first.trim_end())?;
        if version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion { found: version, expected: SCHEMA_VERSION });
        }
        let mut provenance = Vec::new();
        let mut body = String::new();
        let mut line = String::new();
        loop {
            line.clear();
            if reader.read_line(&mut line)? == 0 {
                break;
            }
            match line.strip_prefix('#') {
                Some(rest) if body.is_empty() => provenance.push(rest.trim().to_string()),
                _ => {
                    body.push_str(&line);
                    reader.read_to_string(&mut body)?;
                    break;
                }
            }
        }
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
        let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(String::from).collect();
        let mut expected = feature_ids();
        expected.pop();
        expected.extend(["base_perf", "response_value", "response_class", "dataset", "transformation"].map(String::from));
        if header != expected {
            return Err(Error::SchemaMismatch("meta-database columns differ from this build".into()));
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let bad = |what: &str| Error::MetaDb(format!("row {}: {what}", i + 1));
            if rec.len() != expected.len() {
                return Err(bad("wrong field count"));
            }
            let opt = |s: &str| -> Result<Option<f64>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse::<f64>().map(Some).map_err(|_| bad(&format!("bad number `{s}`")))
                }
            };
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number `{s}`")));
            let f: Vec<Option<f64>> = (0..2 * N_MODIFIABLE).map(|j| opt(&rec[j])).collect::<Result<_>>()?;
            let j = 2 * N_MODIFIABLE;
            rows.push(MetaInstance {
                base_features: f[..N_MODIFIABLE].to_vec(),
                delta_features: f[N_MODIFIABLE..].to_vec(),
                base_performance: num(&rec[j])?,
                response_value: num(&rec[j + 1])?,
                response_class: rec[j + 2].parse()?,
                dataset: rec[j + 3].to_string(),
                transformation: rec[j + 4].parse()?,
            });
        }
        Ok(MetaDatabase { algorithm, measure, rows, schema_version: version, provenance })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    Error::MetaDb(e.to_string())
}

fn parse_magic(line: &str) -> Result<(u32, ClassifierKind, Measure)> {
    let rest = line
        .strip_prefix('#')
        .map(str::trim)
        .and_then(|l| l.strip_prefix(MAGIC))
        .ok_or_else(|| Error::MetaDb("missing meta-database header line".into()))?;
    let (mut version, mut algorithm, mut measure) = (None, None, None);
    for kv in rest.split_whitespace() {
        match kv.split_once('=') {
            Some(("schema_version", v)) => version = v.parse::<u32>().ok(),
            Some(("algorithm", v)) => algorithm = Some(v.parse::<ClassifierKind>()?),
            Some(("measure", v)) => measure = Some(v.parse::<Measure>()?),
            _ => {}
        }
    }
    match (version, algorithm, measure) {
        (Some(v), Some(a), Some(m)) => Ok((v, a, m)),
        _ => Err(Error::MetaDb("incomplete meta-database header line".into())),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub folds: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { folds: DEFAULT_FOLDS, epsilon: DEFAULT_EPSILON, seed: 42 }
    }
}

/// Outcome of a corpus build: the database plus datasets that were skipped.
#[derive(Clone, Debug)]
pub struct BuildOutcome {
    pub db: MetaDatabase,
    pub failures: Vec<(String, String)>,
}

/// Untransformed characteristics of one dataset.
#[derive(Clone, Debug)]
pub struct BaseProfile {
    pub features: MetaFeatureVector,
    pub performance: f64,
    pub candidates: Vec<TransformationSpec>,
}

pub fn base_profile(learner: &dyn Learner, ds: &Dataset, measure: Measure, opts: &BuildOptions) -> Result<BaseProfile> {
    Ok(BaseProfile {
        features: compute_meta_features(ds),
        performance: cross_validate(learner, ds, opts.folds, opts.seed)?.get(measure),
        candidates: enumerate_applicable(ds),
    })
}

/// One meta-instance for `spec` applied to `ds`.
pub fn measure_transformation(
    learner: &dyn Learner,
    ds: &Dataset,
    base: &BaseProfile,
    spec: &TransformationSpec,
    measure: Measure,
    opts: &BuildOptions,
) -> Result<MetaInstance> {
    let transformed = apply(spec, ds)?.dataset;
    let after_mf = compute_meta_features(&transformed);
    let d = delta(&base.features, &after_mf)?;
    let after = cross_validate(learner, &transformed, opts.folds, opts.seed)?.get(measure);
    let (value, class) = label_response(base.performance, after, opts.epsilon);
    Ok(MetaInstance {
        dataset: ds.name().to_string(),
        transformation: spec.clone(),
        base_features: base.features.modifiable().to_vec(),
        delta_features: d.deltas[..N_MODIFIABLE].to_vec(),
        base_performance: base.performance,
        response_value: value,
        response_class: class,
    })
}

/// Measures every applicable transformation on every dataset. Datasets where
/// any step fails are skipped and reported; rows keep corpus and candidate
/// order whatever the scheduling.
pub fn build_metadb(
    datasets: &[Dataset],
    algorithm: ClassifierKind,
    measure: Measure,
    opts: &BuildOptions,
) -> Result<BuildOutcome> {
    if datasets.is_empty() {
        return Err(Error::MetaDb("empty corpus".into()));
    }
    let learner: &dyn Learner = &algorithm;
    let bases = exec::map(datasets, |ds| base_profile(learner, ds, measure, opts));
    let tasks: Vec<(usize, usize)> = bases
        .iter()
        .enumerate()
        .filter_map(|(i, b)| b.as_ref().ok().map(|b| (i, b.candidates.len())))
        .flat_map(|(i, n)| (0..n).map(move |j| (i, j)))
        .collect();
    let results = exec::map(&tasks, |&(i, j)| {
        let base = bases[i].as_ref().expect("filtered above");
        measure_transformation(learner, &datasets[i], base, &base.candidates[j], measure, opts)
    });

    let mut per_dataset: Vec<Result<Vec<MetaInstance>>> =
        bases.into_iter().map(|b| b.map(|_| Vec::new())).collect();
    for (&(i, _), res) in tasks.iter().zip(results) {
        if let Ok(rows) = &mut per_dataset[i] {
            match res {
                Ok(row) => rows.push(row),
                Err(e) => per_dataset[i] = Err(e),
            }
        }
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (ds, res) in datasets.iter().zip(per_dataset) {
        match res {
            Ok(r) if r.is_empty() => {
                log::warn!("{}: no applicable transformations", ds.name());
                failures.push((ds.name().to_string(), "no applicable transformations".to_string()));
            }
            Ok(r) => rows.extend(r),
            Err(e) => {
                log::warn!("{}: skipped: {e}", ds.name());
                failures.push((ds.name().to_string(), e.to_string()));
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::MetaDb("every dataset failed".into()));
    }
    Ok(BuildOutcome { db: MetaDatabase::new(algorithm, measure, rows), failures })
}
