mod support;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use preprank_core::classifiers::{ClassifierKind, Learner, Prediction};
use preprank_core::dataset::Dataset;
use preprank_core::error::Result;
use preprank_core::metadb::feature_row;
use preprank_core::metafeatures::{compute_meta_features, delta, N_MODIFIABLE};
use preprank_core::metalearner::{train_forest, ForestModel};
use preprank_core::ranker::{default_rules, prune, rank_transformations, rank_with_learner, ExpertRule, RankOptions, RuleTarget};
use preprank_core::synth::skewness_rule_metadb;
use preprank_core::transforms::{apply, enumerate_applicable, TransformKind};
use proptest::prelude::*;
use std::sync::OnceLock;
use support::{arb_dataset, random_dataset, Layout};

fn model() -> &'static ForestModel {
    static MODEL: OnceLock<ForestModel> = OnceLock::new();
    MODEL.get_or_init(|| train_forest(&skewness_rule_metadb(10, 0.1, 8), 20, 8).unwrap())
}

/// Delegates to a real classifier and records what it was asked to fit.
struct Counting {
    inner: ClassifierKind,
    calls: AtomicUsize,
    widths: Mutex<Vec<usize>>,
}

impl Counting {
    fn new(inner: ClassifierKind) -> Self {
        Counting { inner, calls: AtomicUsize::new(0), widths: Mutex::new(Vec::new()) }
    }
}

impl Learner for Counting {
    fn name(&self) -> String {
        format!("counting {}", self.inner)
    }

    fn fit_predict(&self, train: &Dataset, test: &Dataset, seed: u64) -> Result<Vec<Prediction>> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.widths.lock().unwrap().push(train.n_attributes());
        self.inner.fit_predict(train, test, seed)
    }
}

fn arb_rules() -> impl Strategy<Value = Vec<ExpertRule>> {
    let target = prop_oneof![
        Just(RuleTarget::Any),
        Just(RuleTarget::Tree),
        Just(RuleTarget::NaiveBayes),
        Just(RuleTarget::KNearest(None)),
        (1usize..4).prop_map(|k| RuleTarget::KNearest(Some(k))),
        Just(RuleTarget::Logistic),
    ];
    let kind = (0..TransformKind::ALL.len()).prop_map(|i| TransformKind::ALL[i]);
    prop::collection::vec((target, kind).prop_map(|(target, kind)| ExpertRule { target, kind, note: String::new() }), 0..6)
}

fn arb_algorithm() -> impl Strategy<Value = ClassifierKind> {
    prop_oneof![
        Just(ClassifierKind::DecisionTree),
        Just(ClassifierKind::NaiveBayes),
        (1usize..4).prop_map(ClassifierKind::KNearest),
        Just(ClassifierKind::LogisticRegression),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn prune_is_an_idempotent_order_preserving_filter(ds in arb_dataset(), rules in arb_rules(), algorithm in arb_algorithm()) {
        let candidates = enumerate_applicable(&ds);
        let once = prune(&rules, algorithm, &candidates);
        prop_assert_eq!(&prune(&rules, algorithm, &once), &once);
        let mut it = candidates.iter();
        for c in &once {
            prop_assert!(it.any(|x| x == c), "order or membership broken at {}", c);
        }
        let reversed: Vec<ExpertRule> = rules.iter().rev().cloned().collect();
        prop_assert_eq!(prune(&reversed, algorithm, &candidates), once);
    }

    #[test]
    fn ranking_is_a_sorted_permutation_of_recomputed_scores(ds in arb_dataset(), seed in any::<u64>()) {
        let algorithm = ClassifierKind::DecisionTree;
        let recs = rank_transformations(model(), &default_rules(), algorithm, &ds, seed).unwrap();
        let pruned = prune(&default_rules(), algorithm, &enumerate_applicable(&ds));
        prop_assert_eq!(recs.len(), pruned.len());
        for (i, r) in recs.iter().enumerate() {
            prop_assert_eq!(r.rank, i + 1);
            prop_assert!(pruned.contains(&r.spec));
            if i > 0 {
                let prev = &recs[i - 1];
                prop_assert!(prev.p_positive > r.p_positive
                    || (prev.p_positive == r.p_positive && prev.spec.to_string() < r.spec.to_string()));
            }
        }
        if recs.is_empty() {
            return Ok(());
        }
        // recompute every score from the public pieces
        let base = compute_meta_features(&ds);
        let perf = preprank_core::classifiers::cross_validate(&algorithm, &ds, 10, seed).unwrap().accuracy;
        for r in &recs {
            let after = compute_meta_features(&apply(&r.spec, &ds).unwrap().dataset);
            let d = delta(&base, &after).unwrap();
            let row = feature_row(&base.values()[..N_MODIFIABLE], &d.deltas[..N_MODIFIABLE], perf);
            let p = model().predict_proba(&row).unwrap();
            prop_assert_eq!([r.p_positive, r.p_negative, r.p_zero], p);
        }
    }
}

#[test]
fn classifier_runs_once_on_the_untransformed_data() {
    for (rows, continuous, categorical) in [(40, 3, 2), (25, 1, 0), (60, 4, 1)] {
        let ds = random_dataset(&Layout { rows, continuous, categorical, classes: 2, missing: 0.1, seed: rows as u64 });
        let counting = Counting::new(ClassifierKind::DecisionTree);
        let opts = RankOptions::default();
        let recs = rank_with_learner(model(), &[], ClassifierKind::DecisionTree, &counting, &ds, &opts).unwrap();
        assert!(recs.len() > 1);
        assert_eq!(counting.calls.load(Ordering::SeqCst), opts.folds.min(rows));
        assert!(counting.widths.lock().unwrap().iter().all(|&w| w == ds.n_attributes()));
    }
}

#[test]
fn model_for_another_algorithm_is_rejected() {
    let ds = random_dataset(&Layout { rows: 20, continuous: 2, categorical: 0, classes: 2, missing: 0.0, seed: 1 });
    assert!(rank_transformations(model(), &[], ClassifierKind::NaiveBayes, &ds, 1).is_err());
}
