//! Naive Bayes: Gaussian likelihoods for continuous attributes, Laplace
//! smoothed frequencies for categorical ones. Missing values are skipped.

use super::{argmax, check_schema, Learner, Prediction};
use crate::dataset::{Cell, Dataset};
use crate::error::Result;

#[derive(Clone, Copy, Debug, Default)]
pub struct NaiveBayes;

enum Model {
    /// Per class (mean, std).
    Gauss(Vec<(f64, f64)>),
    /// Per class, per category log probability.
    Freq(Vec<Vec<f64>>),
}

fn gauss_params(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    Some((m, var.sqrt()))
}

fn fit(train: &Dataset) -> (Vec<f64>, Vec<(usize, Model)>) {
    let labels = train.class_labels();
    let c = train.n_classes();
    let n = labels.len() as f64;
    let mut class_n = vec![0.0; c];
    for &l in &labels {
        class_n[l] += 1.0;
    }
    let log_prior: Vec<f64> = class_n.iter().map(|k| ((k + 1.0) / (n + c as f64)).ln()).collect();

    let models = train
        .predictors()
        .map(|a| {
            let col = train.column(a);
            let model = if train.attribute(a).is_continuous() {
                let all: Vec<f64> = col.iter().filter_map(Cell::num).collect();
                let (lo, hi) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
                let floor = if hi > lo { 1e-6 * (hi - lo) } else { 1e-12 };
                let overall = gauss_params(&all).unwrap_or((0.0, 1.0));
                Model::Gauss(
                    (0..c)
                        .map(|k| {
                            let xs: Vec<f64> = col
                                .iter()
                                .zip(&labels)
                                .filter(|(_, &l)| l == k)
                                .filter_map(|(v, _)| v.num())
                                .collect();
                            let (m, s) = gauss_params(&xs).unwrap_or(overall);
                            (m, s.max(floor))
                        })
                        .collect(),
                )
            } else {
                let k_cats = train.attribute(a).categories.len();
                let mut counts = vec![vec![0.0; k_cats]; c];
                for (v, &l) in col.iter().zip(&labels) {
                    if let Some(v) = v.cat() {
                        counts[l][v] += 1.0;
                    }
                }
                Model::Freq(
                    counts
                        .iter()
                        .map(|row| {
                            let total: f64 = row.iter().sum();
                            row.iter().map(|x| ((x + 1.0) / (total + k_cats as f64)).ln()).collect()
                        })
                        .collect(),
                )
            };
            (a, model)
        })
        .collect();
    (log_prior, models)
}

fn log_normal(x: f64, m: f64, s: f64) -> f64 {
    let z = (x - m) / s;
    -0.5 * z * z - s.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

impl Learner for NaiveBayes {
    fn name(&self) -> String {
        "nb".into()
    }

    fn fit_predict(&self, train: &Dataset, test: &Dataset, _seed: u64) -> Result<Vec<Prediction>> {
        check_schema(train, test)?;
        let (log_prior, models) = fit(train);
        Ok((0..test.n_rows())
            .map(|r| {
                let mut lp = log_prior.clone();
                for (a, model) in &models {
                    match (model, test.cell(r, *a)) {
                        (Model::Gauss(p), Cell::Num(x)) => {
                            for (k, &(m, s)) in p.iter().enumerate() {
                                lp[k] += log_normal(x, m, s);
                            }
                        }
                        (Model::Freq(p), Cell::Cat(v)) => {
                            for (k, row) in p.iter().enumerate() {
                                lp[k] += row[v as usize];
                            }
                        }
                        _ => {}
                    }
                }
                let max = lp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let z: f64 = lp.iter().map(|x| (x - max).exp()).sum();
                let scores: Vec<f64> = lp.iter().map(|x| (x - max).exp() / z).collect();
                Prediction { class: argmax(&lp), scores }
            })
            .collect())
    }
}
