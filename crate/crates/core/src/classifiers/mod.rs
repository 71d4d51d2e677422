//! Base classification algorithms and cross-validated performance.

mod cv;
mod knn;
mod logistic;
mod naive_bayes;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cv::{binary_auc, cross_validate, measures_from_predictions, Measure, PerformanceMeasures, DEFAULT_FOLDS};
pub use knn::KNearest;
pub use logistic::Logistic;
pub use naive_bayes::NaiveBayes;
pub use tree::DecisionTree;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// A predicted class with one score per class category.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub class: usize,
    pub scores: Vec<f64>,
}

/// Anything that can be trained on one dataset and predict another with the
/// same schema. Implement this to plug further algorithms into the pipeline.
pub trait Learner: Send + Sync {
    fn name(&self) -> String;
    fn fit_predict(&self, train: &Dataset, test: &Dataset, seed: u64) -> Result<Vec<Prediction>>;
}

/// The shipped base classifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassifierKind {
    DecisionTree,
    NaiveBayes,
    KNearest(usize),
    LogisticRegression,
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierKind::DecisionTree => f.write_str("tree"),
            ClassifierKind::NaiveBayes => f.write_str("nb"),
            ClassifierKind::KNearest(k) => write!(f, "knn:{k}"),
            ClassifierKind::LogisticRegression => f.write_str("logistic"),
        }
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "tree" => Ok(ClassifierKind::DecisionTree),
            "nb" => Ok(ClassifierKind::NaiveBayes),
            "knn" => Ok(ClassifierKind::KNearest(1)),
            "logistic" => Ok(ClassifierKind::LogisticRegression),
            other => match other.strip_prefix("knn:").map(str::parse::<usize>) {
                Some(Ok(k)) if k >= 1 => Ok(ClassifierKind::KNearest(k)),
                _ => Err(Error::Classifier(format!("unknown algorithm `{other}`"))),
            },
        }
    }
}

impl Learner for ClassifierKind {
    fn name(&self) -> String {
        self.to_string()
    }

    fn fit_predict(&self, train: &Dataset, test: &Dataset, seed: u64) -> Result<Vec<Prediction>> {
        match *self {
            ClassifierKind::DecisionTree => DecisionTree::default().fit_predict(train, test, seed),
            ClassifierKind::NaiveBayes => NaiveBayes.fit_predict(train, test, seed),
            ClassifierKind::KNearest(k) => KNearest { k }.fit_predict(train, test, seed),
            ClassifierKind::LogisticRegression => Logistic::default().fit_predict(train, test, seed),
        }
    }
}

/// Trains `kind` on `train` and predicts every row of `test`.
pub fn fit_predict(kind: ClassifierKind, train: &Dataset, test: &Dataset, seed: u64) -> Result<Vec<Prediction>> {
    kind.fit_predict(train, test, seed)
}

pub(crate) fn check_schema(train: &Dataset, test: &Dataset) -> Result<()> {
    if train.n_rows() == 0 {
        return Err(Error::Classifier("empty training set".into()));
    }
    if train.attributes() != test.attributes() || train.class_index() != test.class_index() {
        return Err(Error::Classifier("train/test schema mismatch".into()));
    }
    Ok(())
}

/// Index of the largest value, lowest index on ties.
pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}
