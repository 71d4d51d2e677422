//! Tri-class random forest over meta-database rows, and leave-one-dataset-out
//! evaluation of it.
//!
//! Rows are drawn into each bootstrap with probability proportional to their
//! dataset weight `1/|T_d|`, so every source dataset carries the same mass.
//! Feature subsampling is keyed by feature id rather than column position,
//! which makes a model independent of the column order it was trained with.

use std::io::{Read, Write};
use std::path::Path;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifiers::{ClassifierKind, Measure};
use crate::error::{Error, Result};
use crate::exec;
use crate::metadb::{feature_ids, MetaDatabase, ResponseClass};
use crate::transforms::TransformationSpec;

pub const MODEL_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_TREES: usize = 100;
pub const MIN_NODE_SIZE: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        /// Branch for a not-applicable value: the heavier side at training.
        missing_left: bool,
    },
    Leaf {
        /// Class weight in positive, negative, zero order.
        weights: [f64; 3],
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    fn leaf_for(&self, row: &[Option<f64>]) -> &[f64; 3] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Leaf { weights } => return weights,
                TreeNode::Split { feature, threshold, left, right, missing_left } => {
                    let go_left = match row[*feature] {
                        Some(x) => x <= *threshold,
                        None => *missing_left,
                    };
                    i = if go_left { *left } else { *right };
                }
            }
        }
    }

    /// Hard vote: the heaviest class in the reached leaf.
    pub fn vote(&self, row: &[Option<f64>]) -> ResponseClass {
        ResponseClass::ORDER[argmax3(self.leaf_for(row))]
    }
}

fn argmax3(w: &[f64; 3]) -> usize {
    (1..3).fold(0, |b, i| if w[i] > w[b] { i } else { b })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub format_version: u32,
    pub algorithm: Option<ClassifierKind>,
    pub measure: Option<Measure>,
    pub feature_ids: Vec<String>,
    pub class_order: [ResponseClass; 3],
    pub n_trees: usize,
    pub seed: u64,
    /// Free-form `key=value` lines describing how the model was produced.
    #[serde(default)]
    pub provenance: Vec<String>,
    pub trees: Vec<Tree>,
}

impl ForestModel {
    /// Fraction of trees voting (positive, negative, zero).
    pub fn predict_proba(&self, features: &[Option<f64>]) -> Result<[f64; 3]> {
        if features.len() != self.feature_ids.len() {
            return Err(Error::SchemaMismatch(format!(
                "model expects {} features, got {}",
                self.feature_ids.len(),
                features.len()
            )));
        }
        let mut votes = [0usize; 3];
        for t in &self.trees {
            votes[t.vote(features).index()] += 1;
        }
        let n = self.trees.len().max(1) as f64;
        Ok(votes.map(|v| v as f64 / n))
    }

    pub fn predict(&self, features: &[Option<f64>]) -> Result<(ResponseClass, [f64; 3])> {
        let p = self.predict_proba(features)?;
        Ok((ResponseClass::ORDER[argmax3(&p)], p))
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer(out, self).map_err(|e| Error::Model(e.to_string()))
    }

    pub fn read_from<R: Read>(input: R) -> Result<Self> {
        let model: ForestModel = serde_json::from_reader(input).map_err(|e| Error::Model(e.to_string()))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::SchemaVersion { found: model.format_version, expected: MODEL_FORMAT_VERSION });
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        buf.push(b'\n');
        std::fs::write(path, buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// Training rows for the forest, independent of the meta-database layout.
#[derive(Clone, Debug)]
pub struct TrainingSet {
    pub feature_ids: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub labels: Vec<ResponseClass>,
    pub weights: Vec<f64>,
}

impl TrainingSet {
    pub fn from_db(db: &MetaDatabase) -> Self {
        Self::from_db_rows(db, &(0..db.rows.len()).collect::<Vec<_>>())
    }

    /// Rows `idx` of `db`, weighted `1/|T_d|` within the subset.
    pub fn from_db_rows(db: &MetaDatabase, idx: &[usize]) -> Self {
        let mut counts = std::collections::HashMap::<&str, usize>::new();
        for &i in idx {
            *counts.entry(&db.rows[i].dataset).or_default() += 1;
        }
        TrainingSet {
            feature_ids: feature_ids(),
            rows: idx.iter().map(|&i| db.rows[i].feature_row()).collect(),
            labels: idx.iter().map(|&i| db.rows[i].response_class).collect(),
            weights: idx.iter().map(|&i| 1.0 / counts[db.rows[i].dataset.as_str()] as f64).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ForestOptions {
    pub n_trees: usize,
    pub seed: u64,
    pub min_node_size: usize,
}

impl Default for ForestOptions {
    fn default() -> Self {
        ForestOptions { n_trees: DEFAULT_TREES, seed: 42, min_node_size: MIN_NODE_SIZE }
    }
}

pub fn train_forest(db: &MetaDatabase, n_trees: usize, seed: u64) -> Result<ForestModel> {
    let mut model = train_forest_on(&TrainingSet::from_db(db), &ForestOptions { n_trees, seed, ..Default::default() })?;
    model.algorithm = Some(db.algorithm);
    model.measure = Some(db.measure);
    Ok(model)
}

/// Fails on an empty set or when fewer than two response classes occur.
pub fn train_forest_on(data: &TrainingSet, opts: &ForestOptions) -> Result<ForestModel> {
    if data.rows.is_empty() {
        return Err(Error::Model("no training rows".into()));
    }
    let first = data.labels[0];
    if data.labels.iter().all(|&l| l == first) {
        return Err(Error::Model(format!("only one response class ({first}) present")));
    }
    Ok(grow_forest(data, opts))
}

fn grow_forest(data: &TrainingSet, opts: &ForestOptions) -> ForestModel {
    let p = data.feature_ids.len();
    // canonical feature order by id, so sampling ignores column positions
    let mut by_id: Vec<usize> = (0..p).collect();
    by_id.sort_by(|&a, &b| data.feature_ids[a].cmp(&data.feature_ids[b]).then(a.cmp(&b)));
    let mtry = (p as f64).sqrt().ceil() as usize;
    let labels: Vec<usize> = data.labels.iter().map(|l| l.index()).collect();
    let sampler = WeightedIndex::new(&data.weights).ok();

    let trees = exec::map_range(opts.n_trees, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(t as u64);
        let n = data.rows.len();
        let mut mult = vec![0.0; n];
        for _ in 0..n {
            let i = match &sampler {
                Some(s) => s.sample(&mut rng),
                None => rng.gen_range(0..n),
            };
            mult[i] += 1.0;
        }
        let in_bag: Vec<usize> = (0..n).filter(|&i| mult[i] > 0.0).collect();
        let mut g = Grower { data, labels: &labels, mult: &mult, by_id: &by_id, mtry, min_node: opts.min_node_size, nodes: Vec::new(), rng };
        g.grow(in_bag);
        Tree { nodes: g.nodes }
    });
    ForestModel {
        format_version: MODEL_FORMAT_VERSION,
        algorithm: None,
        measure: None,
        feature_ids: data.feature_ids.clone(),
        class_order: ResponseClass::ORDER,
        n_trees: opts.n_trees,
        seed: opts.seed,
        provenance: Vec::new(),
        trees,
    }
}

struct Grower<'a> {
    data: &'a TrainingSet,
    labels: &'a [usize],
    mult: &'a [f64],
    by_id: &'a [usize],
    mtry: usize,
    min_node: usize,
    nodes: Vec<TreeNode>,
    rng: ChaCha8Rng,
}

fn gini(w: &[f64; 3]) -> f64 {
    let t = w[0] + w[1] + w[2];
    if t <= 0.0 {
        return 0.0;
    }
    1.0 - w.iter().map(|x| (x / t) * (x / t)).sum::<f64>()
}

impl Grower<'_> {
    fn class_weights(&self, rows: &[usize]) -> [f64; 3] {
        let mut w = [0.0; 3];
        for &r in rows {
            w[self.labels[r]] += self.mult[r];
        }
        w
    }

    /// Appends the subtree for `rows` and returns its node index.
    fn grow(&mut self, rows: Vec<usize>) -> usize {
        let w = self.class_weights(&rows);
        let size: f64 = w.iter().sum();
        let id = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { weights: w });
        if size < self.min_node as f64 || w.iter().filter(|&&x| x > 0.0).count() <= 1 {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(&rows, &w) else {
            return id;
        };
        let (mut left, mut right, mut missing) = (Vec::new(), Vec::new(), Vec::new());
        for &r in &rows {
            match self.data.rows[r][feature] {
                Some(x) if x <= threshold => left.push(r),
                Some(_) => right.push(r),
                None => missing.push(r),
            }
        }
        let lw: f64 = left.iter().map(|&r| self.mult[r]).sum();
        let rw: f64 = right.iter().map(|&r| self.mult[r]).sum();
        let missing_left = lw >= rw;
        if missing_left { left.extend(missing) } else { right.extend(missing) }
        left.sort_unstable();
        right.sort_unstable();
        let l = self.grow(left);
        let r = self.grow(right);
        self.nodes[id] = TreeNode::Split { feature, threshold, left: l, right: r, missing_left };
        id
    }

    fn best_split(&mut self, rows: &[usize], total: &[f64; 3]) -> Option<(usize, f64)> {
        let mut order: Vec<usize> = self.by_id.to_vec();
        order.shuffle(&mut self.rng);
        let mut best: Option<(f64, usize, f64)> = None;
        for (tried, &f) in order.iter().enumerate() {
            if tried >= self.mtry && best.is_some() {
                break;
            }
            let mut vals: Vec<(f64, usize)> =
                rows.iter().filter_map(|&r| self.data.rows[r][f].map(|x| (x, r))).collect();
            if vals.len() < 2 {
                continue;
            }
            vals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let known = {
                let mut k = [0.0; 3];
                for &(_, r) in &vals {
                    k[self.labels[r]] += self.mult[r];
                }
                k
            };
            let known_total: f64 = known.iter().sum();
            let miss_total: f64 = total.iter().sum::<f64>() - known_total;
            let mut left = [0.0; 3];
            for i in 1..vals.len() {
                let r = vals[i - 1].1;
                left[self.labels[r]] += self.mult[r];
                if vals[i - 1].0 == vals[i].0 {
                    continue;
                }
                let right = [known[0] - left[0], known[1] - left[1], known[2] - left[2]];
                let lt: f64 = left.iter().sum();
                let rt = known_total - lt;
                // impurity over known values, scaled by their share of the node
                let child = (lt * gini(&left) + rt * gini(&right)) / known_total;
                let decrease = (gini(&known) - child) * known_total / (known_total + miss_total);
                if decrease > 1e-12 && best.is_none_or(|(d, _, _)| decrease > d) {
                    let (a, b) = (vals[i - 1].0, vals[i].0);
                    let mut thr = a + (b - a) / 2.0;
                    if thr >= b {
                        thr = a;
                    }
                    best = Some((decrease, f, thr));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

/// One held-out meta-instance as predicted by the model trained without its
/// source dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct LoovPrediction {
    pub row: usize,
    pub transformation: TransformationSpec,
    pub proba: [f64; 3],
    pub predicted: ResponseClass,
    pub real: ResponseClass,
    pub impact: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoovFold {
    pub dataset: String,
    /// Meta-database row indices used for training this fold.
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub predictions: Vec<LoovPrediction>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoovReport {
    pub folds: Vec<LoovFold>,
}

impl LoovReport {
    /// Checks from provenance that no fold trained on its held-out dataset.
    pub fn audit(&self, db: &MetaDatabase) -> Result<()> {
        for fold in &self.folds {
            if let Some(&r) = fold.train_rows.iter().find(|&&r| db.rows[r].dataset == fold.dataset) {
                return Err(Error::Evaluation(format!(
                    "fold `{}` trained on its own row {r}",
                    fold.dataset
                )));
            }
            if fold.test_rows.iter().any(|&r| db.rows[r].dataset != fold.dataset) {
                return Err(Error::Evaluation(format!("fold `{}` tests a foreign row", fold.dataset)));
            }
        }
        Ok(())
    }
}

/// Trains one forest per source dataset on all other datasets' rows and
/// predicts the held-out rows. A training fold holding a single response
/// class yields a forest that always predicts that class.
pub fn loov_evaluate(db: &MetaDatabase, n_trees: usize, seed: u64) -> Result<LoovReport> {
    let datasets = db.datasets();
    if datasets.len() < 2 {
        return Err(Error::Evaluation("leave-one-dataset-out needs at least two datasets".into()));
    }
    let opts = ForestOptions { n_trees, seed, ..Default::default() };
    let folds = exec::map(&datasets, |&d| {
        let (test_rows, train_rows): (Vec<usize>, Vec<usize>) =
            (0..db.rows.len()).partition(|&r| db.rows[r].dataset == d);
        let model = grow_forest(&TrainingSet::from_db_rows(db, &train_rows), &opts);
        let predictions = test_rows
            .iter()
            .map(|&r| {
                let row = &db.rows[r];
                let (predicted, proba) = model.predict(&row.feature_row())?;
                Ok(LoovPrediction {
                    row: r,
                    transformation: row.transformation.clone(),
                    proba,
                    predicted,
                    real: row.response_class,
                    impact: row.response_value,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LoovFold { dataset: d.to_string(), train_rows, test_rows, predictions })
    });
    Ok(LoovReport { folds: folds.into_iter().collect::<Result<_>>()? })
}
