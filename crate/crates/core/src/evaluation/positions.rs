//! Position-wise accuracy of the evaluation ordering, grouped by the number
//! of real positives `L` and the cut-off position `K`.

use std::cmp::Ordering;

use super::baseline::{binomial_significance, random_pick_probability};
use super::{DatasetEvalRecord, EvalEntry};
use crate::metadb::ResponseClass;

fn by_probability(a: &EvalEntry, b: &EvalEntry) -> Ordering {
    b.p_positive.total_cmp(&a.p_positive).then_with(|| a.spec.cmp(&b.spec))
}

/// Indices of `record.entries` in evaluation order: predicted positives,
/// then the remaining real positives up to `L`, then everything else; each
/// segment by positive probability descending, spec text ascending.
pub fn evaluation_ordering(record: &DatasetEvalRecord) -> Vec<usize> {
    let e = &record.entries;
    let sorted = |mut idx: Vec<usize>| {
        idx.sort_by(|&a, &b| by_probability(&e[a], &e[b]));
        idx
    };
    let mut order = sorted((0..e.len()).filter(|&i| e[i].predicted == ResponseClass::Positive).collect());
    let l = record.real_positives();
    if order.len() < l {
        let need = l - order.len();
        let extra = sorted(
            (0..e.len())
                .filter(|&i| e[i].predicted != ResponseClass::Positive && e[i].real == ResponseClass::Positive)
                .collect(),
        );
        order.extend(extra.into_iter().take(need));
    }
    let mut placed = vec![false; e.len()];
    order.iter().for_each(|&i| placed[i] = true);
    order.extend(sorted((0..e.len()).filter(|&i| !placed[i]).collect()));
    order
}

/// Successes at positions `1..=k` (k <= L) or `L+1..=k` (k > L).
fn successes(record: &DatasetEvalRecord, order: &[usize], l: usize, k: usize) -> usize {
    let e = &record.entries;
    if k <= l {
        order[..k]
            .iter()
            .filter(|&&i| e[i].predicted == ResponseClass::Positive && e[i].real == ResponseClass::Positive)
            .count()
    } else {
        order[l..k]
            .iter()
            .filter(|&&i| e[i].predicted != ResponseClass::Positive && e[i].real != ResponseClass::Positive)
            .count()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LKCell {
    /// Datasets with exactly `L` real positives and at least `K` entries.
    pub datasets: usize,
    pub successes: usize,
    pub trials: usize,
    /// Per-dataset success ratios, for the mean-of-ratios aggregate.
    ratios: Vec<f64>,
}

impl LKCell {
    /// Pooled accuracy: all successes over all trials.
    pub fn accuracy(&self) -> Option<f64> {
        (self.trials > 0).then(|| self.successes as f64 / self.trials as f64)
    }

    pub fn mean_ratio(&self) -> Option<f64> {
        (!self.ratios.is_empty()).then(|| self.ratios.iter().sum::<f64>() / self.ratios.len() as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LKMatrix {
    pub k_max: usize,
    /// `cells[l][k - 1]`.
    pub cells: Vec<Vec<LKCell>>,
}

impl LKMatrix {
    pub fn cell(&self, l: usize, k: usize) -> Option<&LKCell> {
        self.cells.get(l).and_then(|row| row.get(k.checked_sub(1)?))
    }

    /// Accuracy at `k` averaged over `L`, weighted by dataset count.
    pub fn weighted_average(&self, k: usize) -> Option<f64> {
        let (mut num, mut den) = (0.0, 0usize);
        for row in &self.cells {
            let c = &row[k - 1];
            if let Some(a) = c.accuracy() {
                num += a * c.datasets as f64;
                den += c.datasets;
            }
        }
        (den > 0).then(|| num / den as f64)
    }
}

pub fn lk_matrix(records: &[DatasetEvalRecord], k_max: usize) -> LKMatrix {
    let max_l = records.iter().map(DatasetEvalRecord::real_positives).max().unwrap_or(0);
    let mut cells = vec![vec![LKCell::default(); k_max]; max_l + 1];
    for r in records {
        let order = evaluation_ordering(r);
        let l = r.real_positives();
        for k in 1..=k_max.min(r.len()) {
            let s = successes(r, &order, l, k);
            let trials = if k <= l { k } else { k - l };
            let c = &mut cells[l][k - 1];
            c.datasets += 1;
            c.successes += s;
            c.trials += trials;
            c.ratios.push(s as f64 / trials as f64);
        }
    }
    LKMatrix { k_max, cells }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BaselineCell {
    pub datasets: usize,
    /// Mean random-picker accuracy over the cell's datasets.
    pub random: Option<f64>,
    /// Upper binomial tail of the observed successes against `random`.
    pub p_value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineMatrix {
    pub rate: f64,
    pub cells: Vec<Vec<BaselineCell>>,
}

impl BaselineMatrix {
    /// Random accuracy at `k` averaged over `L`, weighted by dataset count.
    pub fn weighted_average(&self, k: usize) -> Option<f64> {
        let (mut num, mut den) = (0.0, 0usize);
        for row in &self.cells {
            let c = &row[k - 1];
            if let Some(p) = c.random {
                num += p * c.datasets as f64;
                den += c.datasets;
            }
        }
        (den > 0).then(|| num / den as f64)
    }
}

/// Random-picker expectation and significance for every populated cell of
/// `lk`, with `rate` the share of real positives.
pub fn baseline_matrix(records: &[DatasetEvalRecord], lk: &LKMatrix, rate: f64) -> BaselineMatrix {
    let mut sums = vec![vec![(0usize, 0.0f64); lk.k_max]; lk.cells.len()];
    for r in records {
        let l = r.real_positives();
        for k in 1..=lk.k_max.min(r.len()) {
            let s = &mut sums[l][k - 1];
            s.0 += 1;
            s.1 += random_pick_probability(r.len(), l, k, rate);
        }
    }
    let cells = sums
        .iter()
        .zip(&lk.cells)
        .map(|(row, lk_row)| {
            row.iter()
                .zip(lk_row)
                .map(|(&(n, total), c)| {
                    let random = (n > 0).then(|| total / n as f64);
                    BaselineCell {
                        datasets: n,
                        random,
                        p_value: random.map(|p| binomial_significance(c.successes as u64, c.trials as u64, p)),
                    }
                })
                .collect()
        })
        .collect();
    BaselineMatrix { rate, cells }
}
