mod run_config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use preprank_core::classifiers::{ClassifierKind, Measure};
use preprank_core::dataset::Dataset;
use preprank_core::evaluation::{
    build_report, distribution_csv, impact_distribution, positive_rate, records_from_loov, GroupBy, DEFAULT_K_MAX,
};
use preprank_core::metadb::{build_metadb, BuildOptions, MetaDatabase};
use preprank_core::metafeatures::compute_meta_features;
use preprank_core::metalearner::{loov_evaluate, train_forest, ForestModel, DEFAULT_TREES};
use preprank_core::ranker::{default_rules, parse_rules, rank_transformations, recommendations_table, ExpertRule};
use preprank_core::{arff, exec, synth};
use preprank_openml::{
    default_cache_dir, load_corpus, load_entry, parse_manifest, Cache, HttpTransport, OfflineTransport, OpenMlClient,
    Transport, DEFAULT_BASE_URL,
};

use run_config::RunConfig;

#[derive(Parser)]
#[command(name = "preprank", version, about = "Rank pre-processing transformations by their predicted impact on a classifier")]
struct Cli {
    /// Worker threads for (dataset x transformation) tasks.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Source {
    /// Directory holding downloaded OpenML files.
    #[arg(long, env = "PREPRANK_CACHE")]
    cache: Option<PathBuf>,
    /// Serve OpenML ids from the cache only.
    #[arg(long)]
    offline: bool,
}

impl Source {
    fn cache_dir(&self) -> PathBuf {
        self.cache.clone().unwrap_or_else(default_cache_dir)
    }

    fn client(&self) -> OpenMlClient {
        let transport: Box<dyn Transport> =
            if self.offline { Box::new(OfflineTransport) } else { Box::new(HttpTransport::default()) };
        OpenMlClient::with_transport(DEFAULT_BASE_URL, transport, Cache::new(self.cache_dir()))
    }

    /// A file path, `openml:ID` or a bare id.
    fn dataset(&self, arg: &str) -> Result<Dataset> {
        let entries = parse_manifest(arg, Path::new("."))?;
        let [entry] = &entries[..] else { bail!("`{arg}` does not name one dataset") };
        Ok(load_entry(entry, &self.client())?)
    }
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Report dataset failures but exit 0.
    #[arg(long)]
    allow_partial: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print the meta-features of one dataset as key=value lines.
    Featurize {
        /// ARFF/CSV path or OpenML id.
        dataset: String,
        #[command(flatten)]
        source: Source,
    },
    /// Measure every transformation on a corpus and report impact distributions.
    ImpactScan {
        #[arg(long)]
        datasets: PathBuf,
        /// One or more of tree, nb, knn:k, logistic.
        #[arg(long, value_delimiter = ',', default_value = "tree")]
        algorithm: Vec<ClassifierKind>,
        #[arg(long, default_value_t = Measure::Accuracy)]
        measure: Measure,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: Source,
    },
    /// Build the meta-database for one classifier.
    BuildMetadb {
        #[arg(long)]
        datasets: PathBuf,
        #[arg(long, default_value_t = ClassifierKind::DecisionTree)]
        algorithm: ClassifierKind,
        #[arg(long, default_value_t = Measure::Accuracy)]
        measure: Measure,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: Source,
    },
    /// Train the meta-model on a meta-database.
    Train {
        #[arg(long)]
        metadb: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TREES)]
        trees: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Rank the transformations applicable to a dataset.
    Recommend {
        /// ARFF/CSV path or OpenML id.
        #[arg(long)]
        dataset: String,
        #[arg(long)]
        model: PathBuf,
        /// Defaults to the classifier the model was trained for.
        #[arg(long)]
        algorithm: Option<ClassifierKind>,
        /// Show only the first K recommendations.
        #[arg(long)]
        top: Option<usize>,
        /// Expert rules file; the built-in rules are used when absent.
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Also write the table to this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        source: Source,
    },
    /// Leave-one-dataset-out evaluation of the meta-model.
    Evaluate {
        #[arg(long)]
        metadb: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TREES)]
        trees: usize,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Write generated datasets as ARFF files plus a manifest listing them.
    SynthCorpus {
        #[arg(long, default_value_t = 17)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

/// Outcome of a command that processed several datasets.
struct Completed {
    failures: Vec<(String, String)>,
}

impl Completed {
    fn clean() -> Self {
        Completed { failures: Vec::new() }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let allow_partial = match &cli.command {
        Command::ImpactScan { common, .. } | Command::BuildMetadb { common, .. } => common.allow_partial,
        _ => false,
    };
    let result = match cli.jobs {
        Some(j) => exec::with_threads(j, || run(cli.command)),
        None => run(cli.command),
    };
    match result {
        Ok(done) if done.failures.is_empty() => ExitCode::SUCCESS,
        Ok(done) => {
            for (name, err) in &done.failures {
                eprintln!("failed: {name}: {err}");
            }
            if allow_partial {
                eprintln!("{} dataset(s) failed; continuing because of --allow-partial", done.failures.len());
                ExitCode::SUCCESS
            } else {
                eprintln!("{} dataset(s) failed", done.failures.len());
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn write(dir: &Path, name: &str, body: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

/// `knn:3` becomes `knn-3` in file names.
fn file_token(kind: ClassifierKind) -> String {
    kind.to_string().replace(':', "-")
}

fn load(datasets: &Path, source: &Source) -> Result<(Vec<Dataset>, Vec<(String, String)>)> {
    let corpus = load_corpus(datasets, &source.client())?;
    let failures = corpus.failures.into_iter().map(|(e, err)| (e, err.to_string())).collect();
    Ok((corpus.datasets, failures))
}

fn run(command: Command) -> Result<Completed> {
    match command {
        Command::Featurize { dataset, source } => {
            let ds = source.dataset(&dataset)?;
            let mut out = String::new();
            for (name, value) in compute_meta_features(&ds).iter() {
                out.push_str(&format!("{name}={}\n", value.map_or("NA".to_string(), |v| v.to_string())));
            }
            print!("{out}");
            Ok(Completed::clean())
        }
        Command::ImpactScan { datasets, algorithm, measure, out, common, source } => {
            let cfg = RunConfig::new("impact-scan", common.seed)
                .with("datasets", datasets.display())
                .with("algorithm", algorithm.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","))
                .with("measure", measure);
            let (corpus, mut failures) = load(&datasets, &source)?;
            let opts = BuildOptions { seed: common.seed, ..Default::default() };
            for alg in algorithm {
                let outcome = build_metadb(&corpus, alg, measure, &opts)?;
                let mut db = outcome.db;
                db.provenance = cfg.lines();
                let token = file_token(alg);
                write(&out, &format!("metadb-{token}.csv"), &db.to_text())?;
                let mut records = impact_distribution(&db, GroupBy::AlgorithmTotal)?;
                records.extend(impact_distribution(&db, GroupBy::TransformationKind)?);
                let body = cfg.header() + &distribution_csv(&alg.to_string(), &records);
                write(&out, &format!("distribution-{token}.csv"), &body)?;
                failures.extend(outcome.failures.into_iter().map(|(d, e)| (format!("{d} ({alg})"), e)));
            }
            println!("seed={}", common.seed);
            Ok(Completed { failures })
        }
        Command::BuildMetadb { datasets, algorithm, measure, out, common, source } => {
            let cfg = RunConfig::new("build-metadb", common.seed)
                .with("datasets", datasets.display())
                .with("algorithm", algorithm)
                .with("measure", measure);
            let (corpus, mut failures) = load(&datasets, &source)?;
            let opts = BuildOptions { seed: common.seed, ..Default::default() };
            let outcome = build_metadb(&corpus, algorithm, measure, &opts)?;
            let mut db = outcome.db;
            db.provenance = cfg.lines();
            let path = write(&out, "metadb.csv", &db.to_text())?;
            println!("seed={} rows={} datasets={} -> {}", common.seed, db.rows.len(), db.datasets().len(), path.display());
            failures.extend(outcome.failures);
            Ok(Completed { failures })
        }
        Command::Train { metadb, trees, out, seed } => {
            let db = MetaDatabase::load(&metadb).with_context(|| format!("reading {}", metadb.display()))?;
            let cfg = RunConfig::new("train", seed)
                .with("metadb", metadb.display())
                .with("algorithm", db.algorithm)
                .with("measure", db.measure)
                .with("trees", trees);
            let mut model = train_forest(&db, trees, seed)?;
            model.provenance = cfg.lines();
            let mut buf = Vec::new();
            model.write_to(&mut buf)?;
            buf.push(b'\n');
            let path = write(&out, "model.json", std::str::from_utf8(&buf)?)?;
            println!("seed={seed} trees={trees} -> {}", path.display());
            Ok(Completed::clean())
        }
        Command::Recommend { dataset, model, algorithm, top, rules, out, seed, source } => {
            let forest = ForestModel::load(&model).with_context(|| format!("reading model {}", model.display()))?;
            let algorithm = match (algorithm, forest.algorithm) {
                (Some(a), _) | (None, Some(a)) => a,
                (None, None) => bail!("the model does not record its classifier; pass --algorithm"),
            };
            let rules: Vec<ExpertRule> = match &rules {
                Some(p) => parse_rules(&std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
                None => default_rules(),
            };
            let ds = source.dataset(&dataset)?;
            let mut recs = rank_transformations(&forest, &rules, algorithm, &ds, seed)?;
            if let Some(k) = top {
                recs.truncate(k);
            }
            let table = recommendations_table(&recs);
            print!("{table}");
            if let Some(dir) = out {
                let cfg = RunConfig::new("recommend", seed)
                    .with("dataset", &dataset)
                    .with("model", model.display())
                    .with("algorithm", algorithm)
                    .with("top", top.map_or("all".to_string(), |k| k.to_string()))
                    .with("rules", rules_label(&rules));
                write(&dir, "recommendations.csv", &(cfg.header() + &table))?;
            }
            Ok(Completed::clean())
        }
        Command::Evaluate { metadb, trees, k_max, out, seed } => {
            let db = MetaDatabase::load(&metadb).with_context(|| format!("reading {}", metadb.display()))?;
            let cfg = RunConfig::new("evaluate", seed)
                .with("metadb", metadb.display())
                .with("algorithm", db.algorithm)
                .with("measure", db.measure)
                .with("trees", trees)
                .with("k_max", k_max);
            let loov = loov_evaluate(&db, trees, seed)?;
            loov.audit(&db)?;
            let records = records_from_loov(&loov);
            let report = build_report(&records, positive_rate(&db), k_max);
            let h = cfg.header();
            write(&out, "summary.txt", &(h.clone() + &report.summary_text()))?;
            write(&out, "lk_matrix.csv", &(h.clone() + &report.lk_csv()))?;
            write(&out, "ndcg.csv", &(h.clone() + &report.ndcg_csv()))?;
            write(&out, "measures.csv", &(h.clone() + &report.measures_csv()))?;
            let mut dist = impact_distribution(&db, GroupBy::AlgorithmTotal)?;
            dist.extend(impact_distribution(&db, GroupBy::TransformationKind)?);
            write(&out, "distribution.csv", &(h + &distribution_csv(&db.algorithm.to_string(), &dist)))?;
            print!("{}", report.summary_text());
            Ok(Completed::clean())
        }
        Command::SynthCorpus { count, out, seed } => {
            let cfg = RunConfig::new("synth-corpus", seed).with("count", count);
            let mut manifest = cfg.header();
            for ds in synth::corpus(count, seed) {
                let file = format!("{}.arff", ds.name());
                let body = cfg.lines().iter().map(|l| format!("% {l}\n")).collect::<String>() + &arff::write_arff(&ds);
                write(&out, &file, &body)?;
                manifest.push_str(&file);
                manifest.push('\n');
            }
            write(&out, "manifest.txt", &manifest)?;
            println!("seed={seed} datasets={count} -> {}", out.display());
            Ok(Completed::clean())
        }
    }
}

fn rules_label(rules: &[ExpertRule]) -> String {
    if rules == default_rules().as_slice() {
        "default".into()
    } else {
        format!("{} custom", rules.len())
    }
}
