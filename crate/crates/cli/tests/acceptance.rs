//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line with
//! the measured values; the process exits non-zero if any criterion fails.

#[path = "../../core/tests/support/oracles.rs"]
mod oracles;
#[path = "../../core/tests/support/records.rs"]
mod records;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use preprank_core::classifiers::{ClassifierKind, Learner, Measure, Prediction};
use preprank_core::dataset::Dataset;
use preprank_core::evaluation::{
    baseline_matrix, binomial_significance, dataset_measures, dcg, impact_distribution, lk_matrix, ndcg,
    ndcg_of_order, positive_rate, random_pick_probability, records_from_loov, GroupBy,
};
use preprank_core::metadb::{build_metadb, BuildOptions, MetaDatabase, MetaInstance, ResponseClass};
use preprank_core::metafeatures::{compute_meta_features, delta, feature_index, N_MODIFIABLE};
use preprank_core::metalearner::{loov_evaluate, train_forest};
use preprank_core::ranker::{default_rules, rank_transformations, rank_with_learner, RankOptions};
use preprank_core::synth::{self, skewness_rule_metadb, Shape};
use preprank_core::transforms::{apply, enumerate_applicable, Scope, TransformKind, TransformationSpec};
use preprank_openml::{load_corpus, Cache, OfflineTransport, OpenMlClient, DEFAULT_BASE_URL};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use oracles::{binomial_tail_direct, close, dcg_direct, ndcg_exhaustive, random_pick_exact, random_picker_trial, tally_measures};
use records::random_record;

const SEED: u64 = 42;
const TREES: usize = 100;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// The bundled corpus and the meta-databases the corpus criteria share.
struct Corpus {
    datasets: Vec<Dataset>,
    tree: MetaDatabase,
    knn: MetaDatabase,
}

fn load() -> Corpus {
    let data = root().join("data");
    let client = OpenMlClient::with_transport(DEFAULT_BASE_URL, Box::new(OfflineTransport), Cache::new(data.join("cache")));
    let corpus = load_corpus(&data.join("corpus.txt"), &client).expect("bundled corpus loads");
    assert!(corpus.failures.is_empty(), "corpus failures: {:?}", corpus.failures);
    let opts = BuildOptions { seed: SEED, ..Default::default() };
    let build = |kind| build_metadb(&corpus.datasets, kind, Measure::Accuracy, &opts).expect("metadb builds").db;
    Corpus { tree: build(ClassifierKind::DecisionTree), knn: build(ClassifierKind::KNearest(1)), datasets: corpus.datasets }
}

/// Relative 1e-9 against the larger magnitude, or 1 for quantities on the unit scale.
fn agree(a: f64, b: f64, unit: bool) -> bool {
    let scale = if unit { a.abs().max(b.abs()).max(1.0) } else { a.abs().max(b.abs()) };
    a == b || (a - b).abs() <= 1e-9 * scale
}

fn formula_oracles() -> Outcome {
    const N: usize = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut counts = BTreeMap::new();

    for i in 0..N {
        let t = rng.gen_range(1..=12);
        let rec = random_record(&mut rng, "m", t);
        let m = dataset_measures(&rec);
        let pairs: Vec<_> = rec.entries.iter().map(|e| (e.predicted, e.real)).collect();
        let want = tally_measures(&pairs);
        let got = [m.accuracy, m.precision, m.overall_recall, m.g_measure];
        for (g, w) in got.iter().zip(&want) {
            let same = match (g, w) {
                (Some(a), Some(b)) => agree(*a, *b, true),
                (None, None) => true,
                _ => false,
            };
            ensure(same, || format!("dataset_measures input {i}: {got:?} vs {want:?}"))?;
        }
    }
    counts.insert("dataset_measures", N);

    for i in 0..N {
        let len = rng.gen_range(0..=10);
        let g: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (a, b) = (dcg(&g), dcg_direct(&g));
        ensure(agree(a, b, true), || format!("dcg input {i}: {a} vs {b}"))?;
    }
    counts.insert("dcg", N);

    let mut ndcg_cases = 0;
    while ndcg_cases < N {
        let t = rng.gen_range(2..=6);
        let rec = random_record(&mut rng, "n", t);
        let gains: Vec<f64> = rec.entries.iter().map(|e| e.impact).collect();
        let mut order: Vec<usize> = (0..t).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (&rec.entries[a], &rec.entries[b]);
            y.p_positive.partial_cmp(&x.p_positive).unwrap().then(x.spec.cmp(&y.spec))
        });
        for top in [None, Some(1), Some(3)] {
            let (got, want) = (ndcg(&rec, top), ndcg_exhaustive(&gains, &order, top));
            let same = match (got, want) {
                (Some(a), Some(b)) => agree(a, b, true),
                (None, None) => true,
                _ => false,
            };
            ensure(same, || format!("ndcg {gains:?} top {top:?}: {got:?} vs {want:?}"))?;
        }
        ndcg_cases += 1;
    }
    counts.insert("ndcg", ndcg_cases);

    for _ in 0..N {
        let t = rng.gen_range(1..=6);
        let (l, k, rate) = (rng.gen_range(0..=t), rng.gen_range(1..=t), rng.gen_range(0.0..=1.0));
        let (a, b) = (random_pick_probability(t, l, k, rate), random_pick_exact(t, l, k, rate));
        ensure(agree(a, b, true), || format!("random_pick_probability({t},{l},{k},{rate}): {a} vs {b}"))?;
    }
    counts.insert("random_pick_probability", N);

    for _ in 0..N {
        let n = rng.gen_range(1..=60u64);
        let s = rng.gen_range(1..=n);
        let p = rng.gen_range(0.05..0.95);
        let (a, b) = (binomial_significance(s, n, p), binomial_tail_direct(s, n, p));
        ensure(close(a, b, 1e-9), || format!("binomial_significance({s},{n},{p}): {a} vs {b}"))?;
    }
    counts.insert("binomial_significance", N);
    Ok(format!("randomized inputs per formula: {counts:?}"))
}

fn picker_simulation() -> Outcome {
    const TRIALS: usize = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst, mut at, mut points) = (0.0f64, String::new(), 0);
    for t in 4..=12 {
        for l in 0..=t {
            for rate in [0.2, 0.4, 0.55] {
                let mut sums = vec![0.0; t];
                for _ in 0..TRIALS {
                    for (s, v) in sums.iter_mut().zip(random_picker_trial(&mut rng, t, l, rate)) {
                        *s += v;
                    }
                }
                for k in 1..=t {
                    let sim = sums[k - 1] / TRIALS as f64;
                    let err = (sim - random_pick_probability(t, l, k, rate)).abs();
                    points += 1;
                    if err > worst {
                        worst = err;
                        at = format!("T={t} L={l} K={k} rate={rate}");
                    }
                }
            }
        }
    }
    ensure(worst <= 0.01, || format!("max |closed form - simulation| = {worst:.4} at {at}"))?;
    Ok(format!("{points} grid points, {TRIALS} trials each, max deviation {worst:.4} at {at}"))
}

fn paper_values() -> Outcome {
    let row = |kind: TransformKind, class: ResponseClass| MetaInstance {
        dataset: "d".into(),
        transformation: TransformationSpec::new(kind, Scope::Global).unwrap(),
        base_features: vec![None; N_MODIFIABLE],
        delta_features: vec![None; N_MODIFIABLE],
        base_performance: 0.5,
        response_value: 0.0,
        response_class: class,
    };
    let mut rows = Vec::new();
    for (kind, [p, n, z]) in [(TransformKind::Normalize, [1, 1, 8]), (TransformKind::Standardize, [9, 5, 6])] {
        for (class, count) in [(ResponseClass::Positive, p), (ResponseClass::Negative, n), (ResponseClass::Zero, z)] {
            rows.extend((0..count).map(|_| row(kind, class)));
        }
    }
    let db = MetaDatabase::new(ClassifierKind::DecisionTree, Measure::Accuracy, rows);
    let dist = impact_distribution(&db, GroupBy::TransformationKind).map_err(|e| e.to_string())?;
    let (a, b) = (dist[0].distance, dist[1].distance);
    ensure((a - 57.15).abs() <= 0.01 && (b - 14.73).abs() <= 0.01, || format!("distances {a:.4}, {b:.4}"))?;

    let ds = synth::generate("five", &Shape { continuous: 5, ..Default::default() }, SEED);
    let idx = feature_index("NumberOfContinuousAttributes").unwrap();
    let before = compute_meta_features(&ds);
    ensure(before.values()[idx] == Some(5.0), || format!("base count {:?}", before.values()[idx]))?;
    let locals: Vec<TransformationSpec> = enumerate_applicable(&ds)
        .into_iter()
        .filter(|s| matches!(s.kind, TransformKind::DiscretizeSupervised | TransformKind::DiscretizeUnsupervised))
        .filter(|s| matches!(s.scope, Scope::Local(_)))
        .collect();
    ensure(locals.len() == 10, || format!("{} single-attribute discretizations", locals.len()))?;
    for spec in &locals {
        let after = compute_meta_features(&apply(spec, &ds).unwrap().dataset);
        let d = delta(&before, &after).unwrap().deltas[idx];
        ensure(d == Some(-1.0), || format!("{spec}: delta {d:?}"))?;
    }
    Ok(format!("distances {a:.2} and {b:.2}; delta -1 for all {} single-attribute discretizations", locals.len()))
}

fn scaling_rows_zero(c: &Corpus) -> Outcome {
    ensure(c.datasets.len() >= 20, || format!("only {} datasets", c.datasets.len()))?;
    let mut parts = Vec::new();
    for db in [&c.tree, &c.knn] {
        let scaling: Vec<&MetaInstance> = db
            .rows
            .iter()
            .filter(|r| matches!(r.transformation.kind, TransformKind::Normalize | TransformKind::Standardize))
            .collect();
        let zero = scaling.iter().filter(|r| r.response_class == ResponseClass::Zero).count();
        ensure(!scaling.is_empty() && zero == scaling.len(), || format!("{}: {zero}/{} zero", db.algorithm, scaling.len()))?;
        parts.push(format!("{} {zero}/{} zero", db.algorithm, scaling.len()));
    }
    Ok(format!("{} datasets; {}", c.datasets.len(), parts.join(", ")))
}

fn loov_integrity(c: &Corpus) -> Outcome {
    let mut folds = 0;
    for db in [&c.tree, &c.knn] {
        let report = loov_evaluate(db, TREES, SEED).map_err(|e| e.to_string())?;
        report.audit(db).map_err(|e| e.to_string())?;
        for f in &report.folds {
            let leaked = f.train_rows.iter().filter(|&&r| db.rows[r].dataset == f.dataset).count();
            ensure(leaked == 0, || format!("{}: fold {} trains on {leaked} own rows", db.algorithm, f.dataset))?;
            ensure(f.test_rows.len() == db.rows.iter().filter(|r| r.dataset == f.dataset).count(), || {
                format!("fold {} does not test all its rows", f.dataset)
            })?;
        }
        ensure(report.folds.len() == db.datasets().len(), || "fold count".into())?;
        folds += report.folds.len();
    }
    Ok(format!("{folds} folds audited, no held-out row in any training fold"))
}

fn learnability() -> Outcome {
    let db = skewness_rule_metadb(20, 0.1, SEED);
    let report = loov_evaluate(&db, TREES, SEED).map_err(|e| e.to_string())?;
    let records = records_from_loov(&report);
    let lk = lk_matrix(&records, 1);
    let base = baseline_matrix(&records, &lk, positive_rate(&db));
    let (model, random) = (lk.weighted_average(1).unwrap(), base.weighted_average(1).unwrap());
    let margin = model - random;
    let detail = format!("top-1 {model:.3} vs random {random:.3}, margin {margin:.3} over {} datasets", records.len());
    ensure(margin >= 0.15, || detail.clone())?;
    Ok(detail)
}

fn ndcg_extremes(c: &Corpus) -> Outcome {
    let (mut extremes, mut exhaustive) = (0, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for db in [&c.tree, &c.knn] {
        for d in db.datasets() {
            let gains: Vec<f64> = db.rows.iter().filter(|r| r.dataset == d).map(|r| r.response_value).collect();
            if gains.iter().all(|&g| g == gains[0]) {
                continue;
            }
            let mut best: Vec<usize> = (0..gains.len()).collect();
            best.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]));
            let worst: Vec<usize> = best.iter().rev().copied().collect();
            let (hi, lo) = (ndcg_of_order(&gains, &best, None), ndcg_of_order(&gains, &worst, None));
            ensure(hi == Some(1.0) && lo == Some(0.0), || format!("{d}: best {hi:?}, worst {lo:?}"))?;
            extremes += 1;
            // datasets here have more than 6 transformations, so the
            // exhaustive check runs on every 6-entry window of real gains
            for w in gains.windows(6.min(gains.len())) {
                let mut order: Vec<usize> = (0..w.len()).collect();
                order.shuffle(&mut rng);
                for top in [None, Some(1)] {
                    match (ndcg_of_order(w, &order, top), ndcg_exhaustive(w, &order, top)) {
                        (Some(a), Some(b)) => ensure(agree(a, b, true), || format!("{d}: {a} vs {b}"))?,
                        (None, None) => {}
                        (a, b) => return Err(format!("{d}: defined {a:?} vs {b:?}")),
                    }
                    exhaustive += 1;
                }
            }
        }
    }
    ensure(extremes > 0, || "no dataset with distinct gains".into())?;
    Ok(format!("{extremes} dataset rankings hit exactly 1 and 0; {exhaustive} windows match exhaustive normalization"))
}

fn files(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

/// The whole command chain, run inside `dir` with relative paths.
fn pipeline(dir: &Path, jobs: &str) -> Result<String, String> {
    let data = root().join("data");
    let manifest = data.join("corpus.txt");
    let cache = data.join("cache");
    let source = ["--cache", cache.to_str().unwrap(), "--offline"];
    let steps: Vec<Vec<&str>> = vec![
        vec!["impact-scan", "--datasets", manifest.to_str().unwrap(), "--algorithm", "tree,knn:1", "--out", "scan"],
        vec!["build-metadb", "--datasets", manifest.to_str().unwrap(), "--algorithm", "tree", "--out", "."],
        vec!["train", "--metadb", "metadb.csv", "--out", "."],
        vec!["evaluate", "--metadb", "metadb.csv", "--out", "eval"],
        vec!["recommend", "--dataset", "61", "--model", "model.json", "--out", "rec"],
    ];
    let mut stdout = String::new();
    for step in steps {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_preprank"));
        cmd.current_dir(dir).args(["--jobs", jobs]).args(&step);
        if matches!(step[0], "impact-scan" | "build-metadb" | "recommend") {
            cmd.args(source);
        }
        let out = cmd.output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{} exited {}: {}", step[0], out.status, String::from_utf8_lossy(&out.stderr)));
        }
        stdout.push_str(&String::from_utf8_lossy(&out.stdout));
    }
    Ok(stdout)
}

fn determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let out_a = pipeline(a.path(), "1")?;
    let out_b = pipeline(b.path(), "3")?;
    let (fa, fb) = (files(a.path()), files(b.path()));
    ensure(fa.keys().eq(fb.keys()), || format!("file sets differ: {:?} vs {:?}", fa.keys(), fb.keys()))?;
    for (name, bytes) in &fa {
        ensure(fb[name] == *bytes, || format!("{} differs", name.display()))?;
    }
    ensure(out_a == out_b, || "standard output differs".into())?;
    let summary = String::from_utf8_lossy(&fa[Path::new("eval/summary.txt")]).to_string();
    for needle in ["PA = ", "Pr = ", "OR = ", "G = ", "[lk_matrix]", "[significance]", "[ndcg]"] {
        ensure(summary.contains(needle), || format!("summary lacks {needle}"))?;
    }
    for table in ["eval/lk_matrix.csv", "eval/ndcg.csv", "eval/measures.csv", "scan/distribution-tree.csv", "rec/recommendations.csv"] {
        ensure(fa.contains_key(Path::new(table)), || format!("missing {table}"))?;
    }
    Ok(format!("{} output files byte-identical across two runs (1 and 3 workers)", fa.len()))
}

fn pruning(c: &Corpus) -> Outcome {
    let logistic = build_metadb(&c.datasets, ClassifierKind::LogisticRegression, Measure::Accuracy, &BuildOptions::default())
        .map_err(|e| e.to_string())?
        .db;
    let mut checked = 0;
    let mut scaling_candidates = 0;
    for db in [&c.tree, &c.knn, &logistic] {
        let model = train_forest(db, 50, SEED).map_err(|e| e.to_string())?;
        for ds in &c.datasets {
            let recs = rank_transformations(&model, &default_rules(), db.algorithm, ds, SEED).map_err(|e| e.to_string())?;
            let banned = recs.iter().find(|r| matches!(r.spec.kind, TransformKind::Normalize | TransformKind::Standardize));
            ensure(banned.is_none(), || format!("{} on {}: {}", db.algorithm, ds.name(), banned.unwrap().spec))?;
            scaling_candidates += enumerate_applicable(ds)
                .iter()
                .filter(|s| matches!(s.kind, TransformKind::Normalize | TransformKind::Standardize))
                .count();
            checked += 1;
        }
    }
    ensure(scaling_candidates > 0, || "no scaling candidate to prune".into())?;
    Ok(format!("{checked} rankings (tree, knn:1, logistic) free of {scaling_candidates} applicable scaling specs"))
}

/// A real classifier that counts and records its fits.
struct Counting {
    inner: ClassifierKind,
    calls: AtomicUsize,
    widths: Mutex<Vec<usize>>,
}

impl Learner for Counting {
    fn name(&self) -> String {
        format!("counting {}", self.inner)
    }

    fn fit_predict(&self, train: &Dataset, test: &Dataset, seed: u64) -> preprank_core::error::Result<Vec<Prediction>> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.widths.lock().unwrap().push(train.n_attributes());
        self.inner.fit_predict(train, test, seed)
    }
}

fn single_cv_run(c: &Corpus) -> Outcome {
    let model = train_forest(&c.tree, 20, SEED).map_err(|e| e.to_string())?;
    let opts = RankOptions { seed: SEED, ..Default::default() };
    let (mut lo, mut hi) = (usize::MAX, 0);
    for ds in &c.datasets {
        let learner = Counting { inner: ClassifierKind::DecisionTree, calls: AtomicUsize::new(0), widths: Mutex::new(Vec::new()) };
        let recs = rank_with_learner(&model, &[], ClassifierKind::DecisionTree, &learner, ds, &opts).map_err(|e| e.to_string())?;
        let calls = learner.calls.load(Ordering::SeqCst);
        let folds = opts.folds.min(ds.n_rows());
        ensure(calls == folds, || format!("{}: {calls} fits for {} candidates, one run is {folds}", ds.name(), recs.len()))?;
        ensure(learner.widths.lock().unwrap().iter().all(|&w| w == ds.n_attributes()), || {
            format!("{}: classifier saw a transformed dataset", ds.name())
        })?;
        lo = lo.min(recs.len());
        hi = hi.max(recs.len());
    }
    Ok(format!("one {}-fold run per dataset for {lo}..={hi} candidates", opts.folds))
}

fn run(n: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    let secs = start.elapsed().as_secs_f64();
    match &outcome {
        Ok(msg) => println!("criterion {n:>2} PASS  {name}: {msg} [{secs:.1}s]"),
        Err(msg) => println!("criterion {n:>2} FAIL  {name}: {msg} [{secs:.1}s]"),
    }
    outcome.is_ok()
}

fn main() {
    let start = Instant::now();
    let mut ok = Vec::new();
    ok.push(run(1, "formula oracles", formula_oracles));
    ok.push(run(2, "random picker vs simulation", picker_simulation));
    ok.push(run(3, "worked values", paper_values));
    let loading = Instant::now();
    let corpus = catch_unwind(load);
    match &corpus {
        Ok(c) => println!(
            "corpus: {} datasets, {} tree and {} knn:1 meta-instances [{:.1}s]",
            c.datasets.len(),
            c.tree.rows.len(),
            c.knn.rows.len(),
            loading.elapsed().as_secs_f64()
        ),
        Err(_) => println!("corpus failed to load"),
    }
    let with_corpus = |f: fn(&Corpus) -> Outcome| -> Outcome {
        match &corpus {
            Ok(c) => f(c),
            Err(_) => Err("bundled corpus unavailable".into()),
        }
    };
    ok.push(run(4, "scaling has no impact", || with_corpus(scaling_rows_zero)));
    ok.push(run(5, "leave-one-dataset-out integrity", || with_corpus(loov_integrity)));
    ok.push(run(6, "learnable rule beats random", learnability));
    ok.push(run(7, "nDCG extremes", || with_corpus(ndcg_extremes)));
    ok.push(run(8, "pipeline determinism", determinism));
    ok.push(run(9, "pruning contract", || with_corpus(pruning)));
    ok.push(run(10, "single classifier run", || with_corpus(single_cv_run)));
    let passed = ok.iter().filter(|&&x| x).count();
    println!("{passed}/{} criteria passed in {:.1}s", ok.len(), start.elapsed().as_secs_f64());
    if passed != ok.len() {
        std::process::exit(1);
    }
}
