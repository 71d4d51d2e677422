//! Stratified k-fold cross-validation with measures pooled over all folds.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Learner, Prediction};
use crate::dataset::{stratified_folds, Dataset};
use crate::error::{Error, Result};
use crate::exec;

pub const DEFAULT_FOLDS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerformanceMeasures {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub auc: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    Accuracy,
    Precision,
    Recall,
    Auc,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::Accuracy, Measure::Precision, Measure::Recall, Measure::Auc];
}

impl PerformanceMeasures {
    pub fn get(&self, m: Measure) -> f64 {
        match m {
            Measure::Accuracy => self.accuracy,
            Measure::Precision => self.precision,
            Measure::Recall => self.recall,
            Measure::Auc => self.auc,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Accuracy => "acc",
            Measure::Precision => "prec",
            Measure::Recall => "rec",
            Measure::Auc => "auc",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "acc" | "accuracy" => Ok(Measure::Accuracy),
            "prec" | "precision" => Ok(Measure::Precision),
            "rec" | "recall" => Ok(Measure::Recall),
            "auc" => Ok(Measure::Auc),
            other => Err(Error::Classifier(format!("unknown measure `{other}`"))),
        }
    }
}

/// Runs `learner` over `k` stratified folds and scores the pooled predictions.
/// `k` is capped at the number of rows.
pub fn cross_validate(learner: &dyn Learner, ds: &Dataset, k: usize, seed: u64) -> Result<PerformanceMeasures> {
    let k = k.min(ds.n_rows());
    let folds = stratified_folds(ds, k, seed)?;
    let per_fold = exec::map_range(k, |f| -> Result<(Vec<usize>, Vec<Prediction>)> {
        let test_rows = folds.test_rows(f);
        if test_rows.is_empty() {
            return Ok((test_rows, Vec::new()));
        }
        let train = ds.select_rows(&folds.train_rows(f));
        let test = ds.select_rows(&test_rows);
        let preds = learner.fit_predict(&train, &test, seed.wrapping_add(f as u64))?;
        Ok((test_rows, preds))
    });
    let mut pooled: Vec<Option<Prediction>> = vec![None; ds.n_rows()];
    for fold in per_fold {
        let (rows, preds) = fold?;
        for (r, p) in rows.into_iter().zip(preds) {
            pooled[r] = Some(p);
        }
    }
    let preds: Vec<Prediction> = pooled
        .into_iter()
        .map(|p| p.ok_or_else(|| Error::Classifier("row without prediction".into())))
        .collect::<Result<_>>()?;
    Ok(measures_from_predictions(&ds.class_labels(), &preds, ds.n_classes()))
}

/// Accuracy, macro precision/recall over classes present in `truth`, and
/// class-frequency weighted one-vs-rest AUC.
pub fn measures_from_predictions(truth: &[usize], preds: &[Prediction], n_classes: usize) -> PerformanceMeasures {
    let n = truth.len();
    let mut support = vec![0usize; n_classes];
    let mut predicted = vec![0usize; n_classes];
    let mut hits = vec![0usize; n_classes];
    for (&t, p) in truth.iter().zip(preds) {
        support[t] += 1;
        predicted[p.class] += 1;
        if t == p.class {
            hits[t] += 1;
        }
    }
    let present: Vec<usize> = (0..n_classes).filter(|&c| support[c] > 0).collect();
    let macro_avg = |f: &dyn Fn(usize) -> f64| present.iter().map(|&c| f(c)).sum::<f64>() / present.len().max(1) as f64;
    let precision = macro_avg(&|c| if predicted[c] > 0 { hits[c] as f64 / predicted[c] as f64 } else { 0.0 });
    let recall = macro_avg(&|c| hits[c] as f64 / support[c] as f64);

    let mut weighted = 0.0;
    let mut weight = 0.0;
    for &c in &present {
        if support[c] == n {
            continue;
        }
        let scores: Vec<f64> = preds.iter().map(|p| p.scores[c]).collect();
        let positive: Vec<bool> = truth.iter().map(|&t| t == c).collect();
        weighted += support[c] as f64 * binary_auc(&scores, &positive);
        weight += support[c] as f64;
    }
    PerformanceMeasures {
        accuracy: hits.iter().sum::<usize>() as f64 / n.max(1) as f64,
        precision,
        recall,
        auc: if weight > 0.0 { weighted / weight } else { 0.5 },
    }
}

/// Probability that a random positive outscores a random negative, ties 1/2.
pub fn binary_auc(scores: &[f64], positive: &[bool]) -> f64 {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let mid_rank = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += idx[i..=j].iter().filter(|&&r| positive[r]).count() as f64 * mid_rank;
        i = j + 1;
    }
    let n_pos = positive.iter().filter(|&&p| p).count() as f64;
    let n_neg = positive.len() as f64 - n_pos;
    if n_pos == 0.0 || n_neg == 0.0 {
        return 0.5;
    }
    (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg)
}
