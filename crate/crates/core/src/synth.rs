//! Seeded synthetic datasets and a synthetic meta-database whose responses
//! follow a known rule, for tests, benchmarks and the bundled corpus.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::classifiers::{ClassifierKind, Measure};
use crate::dataset::{Attribute, Cell, Dataset};
use crate::metadb::{MetaDatabase, MetaInstance, ResponseClass};
use crate::metafeatures::{compute_meta_features, delta, feature_index, N_MODIFIABLE};
use crate::transforms::{apply, enumerate_applicable, TransformKind};

/// Shape of a generated classification dataset.
#[derive(Clone, Debug)]
pub struct Shape {
    pub rows: usize,
    pub continuous: usize,
    pub categorical: usize,
    pub classes: usize,
    /// Log-normal spread applied to continuous attributes; 0 keeps them
    /// Gaussian, larger values give stronger right skew.
    pub skew: f64,
    /// Probability that a predictor cell is missing.
    pub missing: f64,
    /// Continuous values are rounded to this many decimals, creating ties.
    pub decimals: Option<i32>,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { rows: 120, continuous: 4, categorical: 0, classes: 2, skew: 0.0, missing: 0.0, decimals: None }
    }
}

/// Class-conditional Gaussian attributes (optionally skewed) plus
/// categorical attributes that agree with the class more often than chance.
pub fn generate(name: &str, shape: &Shape, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let n = shape.rows.max(shape.classes * 2);
    let labels: Vec<u32> = (0..n).map(|i| (i % shape.classes) as u32).collect();
    let mut attrs = Vec::new();
    let mut columns = Vec::new();

    for j in 0..shape.continuous {
        let shift: Vec<f64> = (0..shape.classes).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let scale = 10f64.powi(rng.gen_range(-1..3));
        let col = labels
            .iter()
            .map(|&c| {
                if rng.gen_bool(shape.missing) {
                    return Cell::Missing;
                }
                let z = shift[c as usize] + noise.sample(&mut rng);
                let mut x = if shape.skew > 0.0 { (shape.skew * z).exp() } else { z } * scale;
                if let Some(d) = shape.decimals {
                    let p = 10f64.powi(d);
                    x = (x * p).round() / p;
                }
                Cell::Num(x)
            })
            .collect();
        attrs.push(Attribute::continuous(format!("x{j}")));
        columns.push(col);
    }
    for j in 0..shape.categorical {
        let k = 2 + j % 3;
        let col = labels
            .iter()
            .map(|&c| {
                if rng.gen_bool(shape.missing) {
                    Cell::Missing
                } else if rng.gen_bool(0.6) {
                    Cell::Cat(c % k as u32)
                } else {
                    Cell::Cat(rng.gen_range(0..k as u32))
                }
            })
            .collect();
        attrs.push(Attribute::categorical(format!("c{j}"), (0..k).map(|v| format!("v{v}"))));
        columns.push(col);
    }
    attrs.push(Attribute::categorical("class", (0..shape.classes).map(|c| format!("k{c}"))));
    columns.push(labels.into_iter().map(Cell::Cat).collect());
    let class_index = attrs.len() - 1;
    Dataset::new(name, attrs, class_index, columns).expect("generator keeps dataset invariants")
}

/// `count` datasets cycling through a fixed set of shapes.
pub fn corpus(count: usize, seed: u64) -> Vec<Dataset> {
    let shapes = [
        Shape { rows: 90, continuous: 3, ..Default::default() },
        Shape { rows: 120, continuous: 4, skew: 1.0, ..Default::default() },
        Shape { rows: 100, continuous: 2, categorical: 2, classes: 3, ..Default::default() },
        Shape { rows: 80, continuous: 3, missing: 0.05, decimals: Some(1), ..Default::default() },
        Shape { rows: 110, continuous: 0, categorical: 4, ..Default::default() },
        Shape { rows: 150, continuous: 5, classes: 3, skew: 0.6, decimals: Some(2), ..Default::default() },
        Shape { rows: 70, continuous: 2, categorical: 1, missing: 0.08, ..Default::default() },
    ];
    (0..count)
        .map(|i| generate(&format!("synth-{i:02}"), &shapes[i % shapes.len()], seed.wrapping_add(i as u64)))
        .collect()
}

/// Threshold on mean skewness above which discretization helps in
/// [`skewness_rule_metadb`].
pub const SKEW_THRESHOLD: f64 = 1.0;

/// The response the generating rule assigns, before label noise.
pub fn rule_response(kind: TransformKind, mean_skewness: Option<f64>, missing_pct: Option<f64>) -> ResponseClass {
    match kind {
        TransformKind::DiscretizeSupervised | TransformKind::DiscretizeUnsupervised => {
            if mean_skewness.is_some_and(|s| s > SKEW_THRESHOLD) {
                ResponseClass::Positive
            } else {
                ResponseClass::Negative
            }
        }
        TransformKind::ImputeMissingContinuous | TransformKind::ImputeMissingCategorical => {
            if missing_pct.is_some_and(|m| m > 5.0) {
                ResponseClass::Positive
            } else {
                ResponseClass::Zero
            }
        }
        TransformKind::PrincipalComponents => ResponseClass::Negative,
        _ => ResponseClass::Zero,
    }
}

/// A meta-database over `n_datasets` generated datasets with real
/// meta-features and deltas, but responses given by [`rule_response`] with
/// each label replaced by a random class with probability `noise`.
pub fn skewness_rule_metadb(n_datasets: usize, noise: f64, seed: u64) -> MetaDatabase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let skew_idx = feature_index("MeanSkewnessOfContinuousAttributes").expect("known feature");
    let miss_idx = feature_index("PercentageOfMissingValues").expect("known feature");
    let mut rows = Vec::new();
    for d in 0..n_datasets {
        let shape = Shape {
            rows: 60,
            continuous: rng.gen_range(2..5),
            categorical: rng.gen_range(0..2),
            classes: 2,
            skew: [0.0, 0.2, 0.9, 1.4][d % 4],
            missing: if rng.gen_bool(0.3) { 0.1 } else { 0.0 },
            decimals: None,
        };
        let ds = generate(&format!("meta-{d:03}"), &shape, seed.wrapping_add(d as u64));
        let base = compute_meta_features(&ds);
        let base_perf = rng.gen_range(0.5..0.95);
        for spec in enumerate_applicable(&ds) {
            let after = compute_meta_features(&apply(&spec, &ds).expect("enumerated spec applies").dataset);
            let dv = delta(&base, &after).expect("same length");
            let mut class = rule_response(spec.kind, base.values()[skew_idx], base.values()[miss_idx]);
            if rng.gen_bool(noise) {
                class = ResponseClass::ORDER[rng.gen_range(0..3)];
            }
            let magnitude = rng.gen_range(0.01..0.1);
            let value = match class {
                ResponseClass::Positive => magnitude,
                ResponseClass::Negative => -magnitude,
                ResponseClass::Zero => 0.0,
            };
            rows.push(MetaInstance {
                dataset: ds.name().to_string(),
                transformation: spec,
                base_features: base.modifiable().to_vec(),
                delta_features: dv.deltas[..N_MODIFIABLE].to_vec(),
                base_performance: base_perf,
                response_value: value,
                response_class: class,
            });
        }
    }
    MetaDatabase::new(ClassifierKind::DecisionTree, Measure::Accuracy, rows)
}
