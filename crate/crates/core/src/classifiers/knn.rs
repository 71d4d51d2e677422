//! k-nearest neighbours with internal min-max scaling.
//!
//! Continuous attributes are rescaled to [0, 1] using the training range;
//! categorical attributes contribute 0 on a match and 1 otherwise. A missing
//! value on either side contributes 1. Distance ties (relative 1e-9) resolve
//! to the lower training row.

use super::{argmax, check_schema, Learner, Prediction};
use crate::dataset::{Cell, Dataset};
use crate::error::Result;

#[derive(Clone, Copy, Debug)]
pub struct KNearest {
    pub k: usize,
}

enum Scaled {
    Num(Vec<Option<f64>>),
    Cat(Vec<Option<usize>>),
}

fn scale(ds: &Dataset, attrs: &[usize], ranges: &[(f64, f64)]) -> Vec<Scaled> {
    attrs
        .iter()
        .zip(ranges)
        .map(|(&a, &(lo, hi))| {
            let col = ds.column(a);
            if ds.attribute(a).is_continuous() {
                Scaled::Num(
                    col.iter()
                        .map(|c| c.num().map(|x| if hi > lo { (x - lo) / (hi - lo) } else { 0.0 }))
                        .collect(),
                )
            } else {
                Scaled::Cat(col.iter().map(Cell::cat).collect())
            }
        })
        .collect()
}

fn distance(train: &[Scaled], i: usize, test: &[Scaled], j: usize) -> f64 {
    train
        .iter()
        .zip(test)
        .map(|(a, b)| match (a, b) {
            (Scaled::Num(a), Scaled::Num(b)) => match (a[i], b[j]) {
                (Some(x), Some(y)) => (x - y) * (x - y),
                _ => 1.0,
            },
            (Scaled::Cat(a), Scaled::Cat(b)) => match (a[i], b[j]) {
                (Some(x), Some(y)) if x == y => 0.0,
                _ => 1.0,
            },
            _ => unreachable!("schemas checked"),
        })
        .sum()
}

/// Indices of the `k` nearest rows in `dist`, ties broken by lowest index.
pub(crate) fn nearest(dist: &[f64], k: usize) -> Vec<usize> {
    let mut taken = vec![false; dist.len()];
    let mut out = Vec::with_capacity(k);
    for _ in 0..k.min(dist.len()) {
        let min = dist
            .iter()
            .zip(&taken)
            .filter(|(_, t)| !**t)
            .map(|(d, _)| *d)
            .fold(f64::INFINITY, f64::min);
        let tol = 1e-9 * min.abs() + 1e-12;
        let pick = (0..dist.len()).find(|&i| !taken[i] && dist[i] <= min + tol).unwrap();
        taken[pick] = true;
        out.push(pick);
    }
    out
}

impl Learner for KNearest {
    fn name(&self) -> String {
        format!("knn:{}", self.k)
    }

    fn fit_predict(&self, train: &Dataset, test: &Dataset, _seed: u64) -> Result<Vec<Prediction>> {
        check_schema(train, test)?;
        let attrs: Vec<usize> = train.predictors().collect();
        let ranges: Vec<(f64, f64)> = attrs
            .iter()
            .map(|&a| {
                train
                    .column(a)
                    .iter()
                    .filter_map(Cell::num)
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
            })
            .collect();
        let tr = scale(train, &attrs, &ranges);
        let te = scale(test, &attrs, &ranges);
        let labels = train.class_labels();
        let n_classes = train.n_classes();
        let k = self.k.max(1);
        let mut dist = vec![0.0; train.n_rows()];
        Ok((0..test.n_rows())
            .map(|j| {
                for (i, d) in dist.iter_mut().enumerate() {
                    *d = distance(&tr, i, &te, j);
                }
                let near = nearest(&dist, k);
                let mut scores = vec![0.0; n_classes];
                for &i in &near {
                    scores[labels[i]] += 1.0 / near.len() as f64;
                }
                Prediction { class: argmax(&scores), scores }
            })
            .collect())
    }
}
