use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use preprank_openml::{load_corpus, Cache, FetchError, FixtureTransport, OfflineTransport, OpenMlClient, Transport};

const BASE: &str = "https://www.openml.org/api/v1/json";

fn bundled(id: u64, file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../data/cache/openml/{id}/{file}"))
}

/// A fixture directory serving the bundled iris description and ARFF.
fn iris_fixtures(dir: &Path) {
    let desc = std::fs::read(bundled(61, "description.json")).unwrap();
    std::fs::write(dir.join(FixtureTransport::file_name(&format!("{BASE}/data/61"))), desc).unwrap();
    let arff = std::fs::read(bundled(61, "dataset.arff")).unwrap();
    let url = "https://api.openml.org/data/v1/download/61/iris.arff";
    std::fs::write(dir.join(FixtureTransport::file_name(url)), arff).unwrap();
}

struct Counting {
    inner: FixtureTransport,
    calls: Arc<AtomicUsize>,
}

impl Transport for Counting {
    fn get(&self, url: &str) -> Result<Vec<u8>, FetchError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.get(url)
    }
}

#[test]
fn fetch_uses_default_target_and_populates_cache() {
    let fixtures = tempfile::tempdir().unwrap();
    let cache_dir = tempfile::tempdir().unwrap();
    iris_fixtures(fixtures.path());
    let calls = Arc::new(AtomicUsize::new(0));
    let transport = Counting { inner: FixtureTransport::new(fixtures.path()), calls: calls.clone() };
    let client = OpenMlClient::with_transport(BASE, Box::new(transport), Cache::new(cache_dir.path()));

    let ds = client.dataset(61).unwrap();
    assert_eq!(ds.name(), "iris");
    assert_eq!((ds.n_rows(), ds.n_attributes(), ds.n_classes()), (150, 5, 3));
    assert_eq!(ds.class_attribute().name, "class");
    assert_eq!(calls.load(Ordering::SeqCst), 2);

    let again = client.dataset(61).unwrap();
    assert_eq!(again.columns(), ds.columns());
    assert_eq!(calls.load(Ordering::SeqCst), 2, "second fetch must be served from cache");

    let offline = OpenMlClient::with_transport(BASE, Box::new(OfflineTransport), Cache::new(cache_dir.path()));
    assert_eq!(offline.dataset(61).unwrap().columns(), ds.columns());
}

#[test]
fn corrupted_cache_entry_is_refetched() {
    let fixtures = tempfile::tempdir().unwrap();
    let cache_dir = tempfile::tempdir().unwrap();
    iris_fixtures(fixtures.path());
    let client = OpenMlClient::with_transport(BASE, Box::new(FixtureTransport::new(fixtures.path())), Cache::new(cache_dir.path()));
    let first = client.dataset(61).unwrap();
    let cached = cache_dir.path().join("openml/61/dataset.arff");
    std::fs::write(&cached, "@relation broken\n").unwrap();

    let offline = OpenMlClient::with_transport(BASE, Box::new(OfflineTransport), Cache::new(cache_dir.path()));
    let err = offline.dataset(61).unwrap_err();
    let FetchError::Dataset { id: 61, source } = &err else { panic!("{err}") };
    assert!(matches!(**source, FetchError::Checksum { .. }));
    assert!(matches!(err.root(), FetchError::Network { .. }));

    assert_eq!(client.dataset(61).unwrap().columns(), first.columns());
    assert_eq!(std::fs::read(&cached).unwrap(), std::fs::read(bundled(61, "dataset.arff")).unwrap());
}

#[test]
fn unknown_id_is_an_http_error() {
    let fixtures = tempfile::tempdir().unwrap();
    let cache_dir = tempfile::tempdir().unwrap();
    let client = OpenMlClient::with_transport(BASE, Box::new(FixtureTransport::new(fixtures.path())), Cache::new(cache_dir.path()));
    let err = client.dataset(999_999).unwrap_err();
    assert!(matches!(err, FetchError::Dataset { id: 999_999, .. }));
    assert!(matches!(err.root(), FetchError::Http { status: 404, .. }));
    assert!(err.to_string().contains("999999"));
}

#[test]
fn empty_or_fully_failed_manifest_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let client = OpenMlClient::with_transport(BASE, Box::new(OfflineTransport), Cache::new(dir.path().join("c")));
    let manifest = dir.path().join("m.txt");
    std::fs::write(&manifest, "# nothing

").unwrap();
    assert!(matches!(load_corpus(&manifest, &client), Err(FetchError::Corpus(_))));
    std::fs::write(&manifest, "61
nope.arff
").unwrap();
    assert!(matches!(load_corpus(&manifest, &client), Err(FetchError::Corpus(_))));
}

#[test]
fn bundled_cache_serves_all_three_offline() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/cache");
    let client = OpenMlClient::with_transport(BASE, Box::new(OfflineTransport), Cache::new(root));
    let shapes: Vec<_> = [61, 187, 1510]
        .iter()
        .map(|&id| {
            let d = client.dataset(id).unwrap();
            (d.name().to_string(), d.n_rows(), d.n_classes())
        })
        .collect();
    assert_eq!(shapes, vec![("iris".into(), 150, 3), ("wine".into(), 178, 3), ("wdbc".into(), 569, 2)]);
}

#[test]
fn corpus_collects_failures_and_dedupes_names() {
    let dir = tempfile::tempdir().unwrap();
    let cache_dir = tempfile::tempdir().unwrap();
    iris_fixtures(dir.path());
    std::fs::create_dir(dir.path().join("local")).unwrap();
    std::fs::write(dir.path().join("local/iris.csv"), "a,b,label\n1,2,x\n2,3,y\n3,1,x\n4,4,y\n").unwrap();
    std::fs::write(dir.path().join("local/broken.arff"), "@relation r\n@attribute a numeric\n@data\n1\n").unwrap();
    let manifest = dir.path().join("corpus.txt");
    std::fs::write(&manifest, "# mixed\n61\nlocal/iris.csv class=label\nlocal/missing.csv\nlocal/broken.arff\nopenml:424242\n").unwrap();

    let client = OpenMlClient::with_transport(BASE, Box::new(FixtureTransport::new(dir.path())), Cache::new(cache_dir.path()));
    let corpus = load_corpus(&manifest, &client).unwrap();
    let names: Vec<&str> = corpus.datasets.iter().map(|d| d.name()).collect();
    assert_eq!(names, vec!["iris", "iris-2"]);
    assert_eq!(corpus.datasets[1].class_attribute().name, "label");
    let failed: Vec<&str> = corpus.failures.iter().map(|(e, _)| e.as_str()).collect();
    assert_eq!(failed.len(), 3);
    assert!(failed[0].ends_with("missing.csv"));
    assert!(matches!(corpus.failures[1].1, FetchError::Parse(_)));
    assert_eq!(failed[2], "openml:424242");
}
