//! Dataset characteristics used as meta-learning predictors.
//!
//! The 61 features come in four groups: continuous-attribute statistics
//! (1-26), categorical-attribute and information-theoretic measures (27-48),
//! generic counts (49-55) and class descriptors (56-61). Only the first 55
//! can change under a pre-processing transformation; the class descriptors
//! are carried for reporting but excluded from the meta-database.
//!
//! Conventions fixed here:
//! * per-attribute statistics use the non-missing cells of that attribute;
//!   std is the sample std, skewness the adjusted Fisher-Pearson `G1`,
//!   kurtosis the sample excess kurtosis `G2`;
//! * aggregates over attributes use type-7 quartiles;
//! * attribute-kind percentages are taken over all attributes, class included;
//! * a group is not applicable when the dataset has no predictor of that kind,
//!   but its count and percentage features are still reported (as 0).

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeKind, Cell, Dataset};
use crate::error::{Error, Result};
use crate::stats::{entropy_bits, excess_kurtosis, mean, quantile_sorted, sample_std, skewness};

pub const N_META_FEATURES: usize = 61;
/// Features 1-55 are modifiable by transformations.
pub const N_MODIFIABLE: usize = 55;

pub const META_FEATURE_NAMES: [&str; N_META_FEATURES] = [
    "NumberOfContinuousAttributes",
    "PercentageOfContinuousAttributes",
    "MinMeansOfContinuousAttributes",
    "MinStdOfContinuousAttributes",
    "MinKurtosisOfContinuousAttributes",
    "MinSkewnessOfContinuousAttributes",
    "MeanMeansOfContinuousAttributes",
    "MeanStdOfContinuousAttributes",
    "MeanKurtosisOfContinuousAttributes",
    "MeanSkewnessOfContinuousAttributes",
    "MaxMeansOfContinuousAttributes",
    "MaxStdOfContinuousAttributes",
    "MaxKurtosisOfContinuousAttributes",
    "MaxSkewnessOfContinuousAttributes",
    "Quartile1MeansOfContinuousAttributes",
    "Quartile2MeansOfContinuousAttributes",
    "Quartile3MeansOfContinuousAttributes",
    "Quartile1StdOfContinuousAttributes",
    "Quartile2StdOfContinuousAttributes",
    "Quartile3StdOfContinuousAttributes",
    "Quartile1KurtosisOfContinuousAttributes",
    "Quartile2KurtosisOfContinuousAttributes",
    "Quartile3KurtosisOfContinuousAttributes",
    "Quartile1SkewnessOfContinuousAttributes",
    "Quartile2SkewnessOfContinuousAttributes",
    "Quartile3SkewnessOfContinuousAttributes",
    "NumberOfCategoricalAttributes",
    "NumberOfBinaryAttributes",
    "PercentageOfCategoricalAttributes",
    "PercentageOfBinaryAttributes",
    "MinAttributeEntropy",
    "MeanAttributeEntropy",
    "MaxAttributeEntropy",
    "Quartile1AttributeEntropy",
    "Quartile2AttributeEntropy",
    "Quartile3AttributeEntropy",
    "MinMutualInformation",
    "MeanMutualInformation",
    "MaxMutualInformation",
    "Quartile1MutualInformation",
    "Quartile2MutualInformation",
    "Quartile3MutualInformation",
    "EquivalentNumberOfAttributes",
    "NoiseToSignalRatio",
    "MinAttributeDistinctValues",
    "MeanAttributeDistinctValues",
    "MaxAttributeDistinctValues",
    "StdAttributeDistinctValues",
    "NumberOfInstances",
    "NumberOfAttributes",
    "Dimensionality",
    "NumberOfMissingValues",
    "PercentageOfMissingValues",
    "NumberOfInstancesWithMissingValues",
    "PercentageOfInstancesWithMissingValues",
    "NumberOfClasses",
    "ClassEntropy",
    "MinorityClassSize",
    "MajorityClassSize",
    "MinorityClassPercentage",
    "MajorityClassPercentage",
];

/// Position of a feature name in [`META_FEATURE_NAMES`].
pub fn feature_index(name: &str) -> Option<usize> {
    META_FEATURE_NAMES.iter().position(|&n| n == name)
}

/// One dataset's characteristics; `None` marks a not-applicable feature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaFeatureVector {
    values: Vec<Option<f64>>,
}

impl MetaFeatureVector {
    pub fn from_values(values: Vec<Option<f64>>) -> Self {
        MetaFeatureVector { values }
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        feature_index(name).and_then(|i| self.values.get(i).copied().flatten())
    }

    pub fn is_modifiable(index: usize) -> bool {
        index < N_MODIFIABLE
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, Option<f64>)> + '_ {
        META_FEATURE_NAMES.iter().copied().zip(self.values.iter().copied())
    }

    /// The modifiable prefix (features 1-55).
    pub fn modifiable(&self) -> &[Option<f64>] {
        &self.values[..N_MODIFIABLE.min(self.values.len())]
    }
}

/// Per-feature `after - before`; `None` when either side is not applicable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaVector {
    pub deltas: Vec<Option<f64>>,
}

pub fn delta(before: &MetaFeatureVector, after: &MetaFeatureVector) -> Result<DeltaVector> {
    if before.len() != after.len() {
        return Err(Error::KeyMismatch);
    }
    let deltas = before
        .values
        .iter()
        .zip(&after.values)
        .map(|(b, a)| match (b, a) {
            (Some(b), Some(a)) => Some(a - b),
            _ => None,
        })
        .collect();
    Ok(DeltaVector { deltas })
}

fn categorical_counts(col: &[Cell], n_categories: usize) -> Vec<f64> {
    let mut counts = vec![0.0; n_categories];
    for c in col.iter().filter_map(Cell::cat) {
        counts[c] += 1.0;
    }
    counts
}

/// Entropy in bits of a categorical attribute over its non-missing cells.
pub fn attribute_entropy(ds: &Dataset, attr: usize) -> Result<f64> {
    let a = ds.attribute(attr);
    if !a.is_categorical() {
        return Err(Error::NotCategorical(a.name.clone()));
    }
    Ok(entropy_bits(&categorical_counts(ds.column(attr), a.categories.len())))
}

pub fn class_entropy(ds: &Dataset) -> f64 {
    entropy_bits(&categorical_counts(ds.column(ds.class_index()), ds.n_classes()))
}

/// Mutual information in bits between a categorical attribute and the class,
/// over rows where the attribute is present.
pub fn mutual_information(ds: &Dataset, attr: usize) -> Result<f64> {
    let a = ds.attribute(attr);
    if !a.is_categorical() {
        return Err(Error::NotCategorical(a.name.clone()));
    }
    let k = a.categories.len();
    let c = ds.n_classes();
    let mut joint = vec![0.0; k * c];
    let labels = ds.class_labels();
    for (cell, &y) in ds.column(attr).iter().zip(&labels) {
        if let Some(v) = cell.cat() {
            joint[v * c + y] += 1.0;
        }
    }
    let total: f64 = joint.iter().sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let row_counts: Vec<f64> = (0..k).map(|v| joint[v * c..(v + 1) * c].iter().sum()).collect();
    let col_counts: Vec<f64> = (0..c).map(|y| (0..k).map(|v| joint[v * c + y]).sum()).collect();
    // H(A) + H(C) - H(A, C), clamped against rounding
    let mi = entropy_bits(&row_counts) + entropy_bits(&col_counts) - entropy_bits(&joint);
    Ok(mi.max(0.0))
}

/// Equivalent number of attributes and noise-to-signal ratio. Both are
/// `None` when there is no categorical predictor or mean MI is zero.
pub fn derived_information_features(ds: &Dataset) -> (Option<f64>, Option<f64>) {
    let cats = ds.predictors_of(AttributeKind::Categorical);
    if cats.is_empty() {
        return (None, None);
    }
    let entropies: Vec<f64> = cats.iter().map(|&j| attribute_entropy(ds, j).unwrap()).collect();
    let mis: Vec<f64> = cats.iter().map(|&j| mutual_information(ds, j).unwrap()).collect();
    derived_from(class_entropy(ds), mean(&entropies), mean(&mis))
}

const MI_ZERO: f64 = 1e-12;

fn derived_from(class_entropy: f64, mean_entropy: f64, mean_mi: f64) -> (Option<f64>, Option<f64>) {
    if mean_mi <= MI_ZERO {
        return (None, None);
    }
    (
        Some(class_entropy / mean_mi),
        Some((mean_entropy - mean_mi) / mean_mi),
    )
}

/// Min, mean, max, then quartiles 1-3.
fn summarize(xs: &[f64]) -> [f64; 6] {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    [
        sorted[0],
        mean(xs),
        sorted[sorted.len() - 1],
        quantile_sorted(&sorted, 0.25),
        quantile_sorted(&sorted, 0.5),
        quantile_sorted(&sorted, 0.75),
    ]
}

pub fn compute_meta_features(ds: &Dataset) -> MetaFeatureVector {
    let mut v: Vec<Option<f64>> = vec![None; N_META_FEATURES];
    let n = ds.n_rows() as f64;
    let m = ds.n_attributes() as f64;
    let cont = ds.predictors_of(AttributeKind::Continuous);
    let cats = ds.predictors_of(AttributeKind::Categorical);

    v[0] = Some(cont.len() as f64);
    v[1] = Some(100.0 * cont.len() as f64 / m);
    if !cont.is_empty() {
        let mut means = Vec::with_capacity(cont.len());
        let mut stds = Vec::with_capacity(cont.len());
        let mut kurts = Vec::with_capacity(cont.len());
        let mut skews = Vec::with_capacity(cont.len());
        for &j in &cont {
            let xs: Vec<f64> = ds.column(j).iter().filter_map(Cell::num).collect();
            means.push(mean(&xs));
            stds.push(sample_std(&xs));
            kurts.push(excess_kurtosis(&xs));
            skews.push(skewness(&xs));
        }
        let s = [summarize(&means), summarize(&stds), summarize(&kurts), summarize(&skews)];
        // rows 3..14: Min/Mean/Max of [means, std, kurtosis, skewness]
        for agg in 0..3 {
            for (stat, summary) in s.iter().enumerate() {
                v[2 + agg * 4 + stat] = Some(summary[agg]);
            }
        }
        // rows 15..26: quartiles per statistic
        for (stat, summary) in s.iter().enumerate() {
            for q in 0..3 {
                v[14 + stat * 3 + q] = Some(summary[3 + q]);
            }
        }
    }

    let binary = cats
        .iter()
        .filter(|&&j| ds.attribute(j).categories.len() == 2)
        .count();
    v[26] = Some(cats.len() as f64);
    v[27] = Some(binary as f64);
    v[28] = Some(100.0 * cats.len() as f64 / m);
    v[29] = Some(100.0 * binary as f64 / m);
    let h_class = class_entropy(ds);
    if !cats.is_empty() {
        let entropies: Vec<f64> = cats.iter().map(|&j| attribute_entropy(ds, j).unwrap()).collect();
        let mis: Vec<f64> = cats.iter().map(|&j| mutual_information(ds, j).unwrap()).collect();
        let se = summarize(&entropies);
        let sm = summarize(&mis);
        for i in 0..6 {
            v[30 + i] = Some(se[i]);
            v[36 + i] = Some(sm[i]);
        }
        let (ena, nsr) = derived_from(h_class, se[1], sm[1]);
        v[42] = ena;
        v[43] = nsr;
        let distinct: Vec<f64> = cats
            .iter()
            .map(|&j| {
                let counts = categorical_counts(ds.column(j), ds.attribute(j).categories.len());
                counts.iter().filter(|&&c| c > 0.0).count() as f64
            })
            .collect();
        let sd = summarize(&distinct);
        v[44] = Some(sd[0]);
        v[45] = Some(sd[1]);
        v[46] = Some(sd[2]);
        v[47] = Some(sample_std(&distinct));
    }

    let cells = ds.columns().iter().flatten().filter(|c| c.is_missing()).count() as f64;
    let rows_with_missing = (0..ds.n_rows())
        .filter(|&r| (0..ds.n_attributes()).any(|j| ds.cell(r, j).is_missing()))
        .count() as f64;
    v[48] = Some(n);
    v[49] = Some(m);
    v[50] = Some(m / n);
    v[51] = Some(cells);
    v[52] = Some(100.0 * cells / (n * m));
    v[53] = Some(rows_with_missing);
    v[54] = Some(100.0 * rows_with_missing / n);

    let class_counts = categorical_counts(ds.column(ds.class_index()), ds.n_classes());
    let observed: Vec<f64> = class_counts.iter().copied().filter(|&c| c > 0.0).collect();
    let minority = observed.iter().copied().fold(f64::INFINITY, f64::min);
    let majority = observed.iter().copied().fold(0.0, f64::max);
    v[55] = Some(ds.n_classes() as f64);
    v[56] = Some(h_class);
    v[57] = Some(minority);
    v[58] = Some(majority);
    v[59] = Some(100.0 * minority / n);
    v[60] = Some(100.0 * majority / n);

    MetaFeatureVector { values: v }
}
