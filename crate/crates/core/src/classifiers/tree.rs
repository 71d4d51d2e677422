//! Unpruned information-gain decision tree.
//!
//! Continuous attributes split at the midpoint between adjacent training
//! values, categorical attributes split multiway. A split is allowed only when
//! at least two branches receive `min_leaf` rows. Rows missing the split
//! attribute follow the branch that received the most training rows.

use super::{argmax, check_schema, Learner, Prediction};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::stats::entropy_bits;

#[derive(Clone, Debug)]
pub struct DecisionTree {
    pub min_leaf: usize,
}

impl Default for DecisionTree {
    fn default() -> Self {
        DecisionTree { min_leaf: 2 }
    }
}

#[derive(Clone, Debug)]
enum Node {
    Leaf {
        dist: Vec<f64>,
    },
    Threshold {
        attr: usize,
        /// Largest training value routed left and smallest routed right.
        lo: f64,
        hi: f64,
        left: Box<Node>,
        right: Box<Node>,
        missing_left: bool,
    },
    Multiway {
        attr: usize,
        children: Vec<Node>,
        missing_child: usize,
    },
}

impl Node {
    fn predict(&self, ds: &Dataset, row: usize) -> &[f64] {
        match self {
            Node::Leaf { dist } => dist,
            Node::Threshold { attr, lo, hi, left, right, missing_left } => {
                let go_left = match ds.cell(row, *attr).num() {
                    None => *missing_left,
                    // tolerance relative to the gap keeps routing stable
                    // under affine rescaling of the attribute
                    Some(x) => x <= lo + (hi - lo) / 2.0 + 1e-9 * (hi - lo),
                };
                if go_left { left.predict(ds, row) } else { right.predict(ds, row) }
            }
            Node::Multiway { attr, children, missing_child } => {
                let child = match ds.cell(row, *attr).cat() {
                    Some(c) if c < children.len() => c,
                    _ => *missing_child,
                };
                children[child].predict(ds, row)
            }
        }
    }
}

enum Split {
    Threshold { attr: usize, lo: f64, hi: f64 },
    Multiway { attr: usize },
}

struct Builder<'a> {
    ds: &'a Dataset,
    labels: Vec<usize>,
    n_classes: usize,
    min_leaf: usize,
}

impl Builder<'_> {
    fn counts(&self, rows: &[usize]) -> Vec<f64> {
        let mut c = vec![0.0; self.n_classes];
        for &r in rows {
            c[self.labels[r]] += 1.0;
        }
        c
    }

    fn build(&self, rows: &[usize]) -> Node {
        let dist = self.counts(rows);
        let leaf = || Node::Leaf { dist: normalize(&dist) };
        if rows.len() < 2 * self.min_leaf || dist.iter().filter(|&&c| c > 0.0).count() <= 1 {
            return leaf();
        }
        let Some(split) = self.best_split(rows) else {
            return leaf();
        };
        match split {
            Split::Threshold { attr, lo, hi } => {
                let mid = lo + (hi - lo) / 2.0;
                let (mut l, mut r, mut missing) = (Vec::new(), Vec::new(), Vec::new());
                for &row in rows {
                    match self.ds.cell(row, attr).num() {
                        None => missing.push(row),
                        Some(x) if x <= mid => l.push(row),
                        Some(_) => r.push(row),
                    }
                }
                let missing_left = l.len() >= r.len();
                if missing_left { l.extend(missing) } else { r.extend(missing) }
                l.sort_unstable();
                r.sort_unstable();
                Node::Threshold {
                    attr,
                    lo,
                    hi,
                    left: Box::new(self.build(&l)),
                    right: Box::new(self.build(&r)),
                    missing_left,
                }
            }
            Split::Multiway { attr } => {
                let k = self.ds.attribute(attr).categories.len();
                let mut parts: Vec<Vec<usize>> = vec![Vec::new(); k];
                let mut missing = Vec::new();
                for &row in rows {
                    match self.ds.cell(row, attr).cat() {
                        Some(c) => parts[c].push(row),
                        None => missing.push(row),
                    }
                }
                let missing_child = (0..k).fold(0, |b, c| if parts[c].len() > parts[b].len() { c } else { b });
                parts[missing_child].extend(missing);
                parts[missing_child].sort_unstable();
                let children = parts
                    .iter()
                    .map(|p| if p.is_empty() { leaf() } else { self.build(p) })
                    .collect();
                Node::Multiway { attr, children, missing_child }
            }
        }
    }

    /// Highest gain split; earlier attributes and lower thresholds win ties.
    fn best_split(&self, rows: &[usize]) -> Option<Split> {
        let mut best: Option<(f64, Split)> = None;
        let n = rows.len() as f64;
        for attr in self.ds.predictors() {
            let known: Vec<usize> = rows.iter().copied().filter(|&r| !self.ds.cell(r, attr).is_missing()).collect();
            if known.len() < 2 * self.min_leaf {
                continue;
            }
            let known_frac = known.len() as f64 / n;
            let total = self.counts(&known);
            let base = entropy_bits(&total);
            let kn = known.len() as f64;
            let candidate = if self.ds.attribute(attr).is_continuous() {
                let mut sorted: Vec<(f64, usize)> = known
                    .iter()
                    .map(|&r| (self.ds.cell(r, attr).num().unwrap(), self.labels[r]))
                    .collect();
                sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut left = vec![0.0; self.n_classes];
                let mut found: Option<(f64, f64, f64)> = None;
                for i in 1..sorted.len() {
                    left[sorted[i - 1].1] += 1.0;
                    if sorted[i - 1].0 == sorted[i].0 || i < self.min_leaf || sorted.len() - i < self.min_leaf {
                        continue;
                    }
                    let right: Vec<f64> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
                    let e = (i as f64 * entropy_bits(&left) + (kn - i as f64) * entropy_bits(&right)) / kn;
                    let gain = (base - e) * known_frac;
                    if found.is_none_or(|(g, _, _)| gain > g) {
                        found = Some((gain, sorted[i - 1].0, sorted[i].0));
                    }
                }
                found.map(|(g, lo, hi)| (g, Split::Threshold { attr, lo, hi }))
            } else {
                let k = self.ds.attribute(attr).categories.len();
                let mut per = vec![vec![0.0; self.n_classes]; k];
                for &r in &known {
                    per[self.ds.cell(r, attr).cat().unwrap()][self.labels[r]] += 1.0;
                }
                let sizes: Vec<f64> = per.iter().map(|c| c.iter().sum()).collect();
                let big = sizes.iter().filter(|&&s| s >= self.min_leaf as f64).count();
                if big < 2 {
                    None
                } else {
                    let e: f64 = per.iter().zip(&sizes).map(|(c, s)| s * entropy_bits(c)).sum::<f64>() / kn;
                    Some(((base - e) * known_frac, Split::Multiway { attr }))
                }
            };
            if let Some((gain, split)) = candidate {
                if gain > 1e-12 && best.as_ref().is_none_or(|(g, _)| gain > *g) {
                    best = Some((gain, split));
                }
            }
        }
        best.map(|(_, s)| s)
    }
}

fn normalize(counts: &[f64]) -> Vec<f64> {
    let total: f64 = counts.iter().sum();
    if total > 0.0 {
        counts.iter().map(|c| c / total).collect()
    } else {
        vec![1.0 / counts.len() as f64; counts.len()]
    }
}

impl Learner for DecisionTree {
    fn name(&self) -> String {
        "tree".into()
    }

    fn fit_predict(&self, train: &Dataset, test: &Dataset, _seed: u64) -> Result<Vec<Prediction>> {
        check_schema(train, test)?;
        let builder = Builder {
            ds: train,
            labels: train.class_labels(),
            n_classes: train.n_classes(),
            min_leaf: self.min_leaf.max(1),
        };
        let rows: Vec<usize> = (0..train.n_rows()).collect();
        let root = builder.build(&rows);
        Ok((0..test.n_rows())
            .map(|r| {
                let scores = root.predict(test, r).to_vec();
                Prediction { class: argmax(&scores), scores }
            })
            .collect())
    }
}
