//! The pre-processing operator catalog: enumeration and application.

pub mod discretize;
pub mod pca;
mod spec;

use std::collections::HashSet;

pub use spec::{enumerate_applicable, Scope, TransformKind, TransformationSpec};

use crate::dataset::{Attribute, Cell, Dataset};
use crate::error::{Error, Result};
use crate::stats::{mean, sample_std};

/// A dataset produced by one transformation, with its provenance.
#[derive(Clone, Debug)]
pub struct TransformedDataset {
    pub dataset: Dataset,
    pub source: String,
    pub spec: TransformationSpec,
}

/// Replacement for one source attribute: zero or more new columns.
type Replacement = Vec<(Attribute, Vec<Cell>)>;

/// Applies `spec` to `ds`, returning a fresh dataset. The class column and
/// row count never change; only supervised kinds read the class.
pub fn apply(spec: &TransformationSpec, ds: &Dataset) -> Result<TransformedDataset> {
    spec.check_applicable(ds)?;
    let targets: Vec<usize> = match spec.scope {
        Scope::Local(i) => vec![i],
        Scope::LocalAll | Scope::Global => ds.predictors_of(spec.kind.input_kind()),
    };
    let mut replaced: Vec<Option<Replacement>> = vec![None; ds.n_attributes()];

    match spec.kind {
        TransformKind::DiscretizeUnsupervised => {
            let bins = spec.param("bins").expect("bins default") as usize;
            for &j in &targets {
                let cells = discretize::equal_width(ds.column(j), bins);
                let labels = (0..bins).map(|b| format!("bin{b}"));
                replaced[j] = Some(vec![(Attribute::categorical(ds.attribute(j).name.clone(), labels), cells)]);
            }
        }
        TransformKind::DiscretizeSupervised => {
            let labels = ds.class_labels();
            for &j in &targets {
                let (xs, ys): (Vec<f64>, Vec<usize>) = ds
                    .column(j)
                    .iter()
                    .zip(&labels)
                    .filter_map(|(c, &y)| c.num().map(|x| (x, y)))
                    .unzip();
                let cuts = discretize::mdl_cut_points(&xs, &ys, ds.n_classes());
                let cells = ds
                    .column(j)
                    .iter()
                    .map(|c| match c.num() {
                        None => Cell::Missing,
                        Some(x) => Cell::Cat(cuts.partition_point(|&cut| cut < x) as u32),
                    })
                    .collect();
                let names = (0..=cuts.len()).map(|b| format!("bin{b}"));
                replaced[j] = Some(vec![(Attribute::categorical(ds.attribute(j).name.clone(), names), cells)]);
            }
        }
        TransformKind::NominalToBinaryUnsupervised => {
            for &j in &targets {
                replaced[j] = Some(one_hot(ds, j));
            }
        }
        TransformKind::NominalToBinarySupervised => {
            for &j in &targets {
                replaced[j] = Some(ordered_cumulative(ds, j));
            }
        }
        TransformKind::Normalize | TransformKind::Standardize => {
            for &j in &targets {
                let col = ds.column(j);
                let xs: Vec<f64> = col.iter().filter_map(Cell::num).collect();
                let (shift, scale) = if spec.kind == TransformKind::Normalize {
                    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    (lo, hi - lo)
                } else {
                    (mean(&xs), sample_std(&xs))
                };
                let cells = col
                    .iter()
                    .map(|c| match c.num() {
                        None => Cell::Missing,
                        Some(_) if !(scale > 0.0) => Cell::Num(0.0),
                        Some(x) => Cell::Num((x - shift) / scale),
                    })
                    .collect();
                replaced[j] = Some(vec![(ds.attribute(j).clone(), cells)]);
            }
        }
        TransformKind::ImputeMissingContinuous => {
            for &j in &targets {
                let col = ds.column(j);
                let xs: Vec<f64> = col.iter().filter_map(Cell::num).collect();
                let fill = mean(&xs);
                let cells = col.iter().map(|c| Cell::Num(c.num().unwrap_or(fill))).collect();
                replaced[j] = Some(vec![(ds.attribute(j).clone(), cells)]);
            }
        }
        TransformKind::ImputeMissingCategorical => {
            for &j in &targets {
                let col = ds.column(j);
                let mut counts = vec![0usize; ds.attribute(j).categories.len()];
                for c in col.iter().filter_map(Cell::cat) {
                    counts[c] += 1;
                }
                // mode, lowest index on ties
                let mode = (0..counts.len()).fold(0, |best, c| if counts[c] > counts[best] { c } else { best });
                let cells = col
                    .iter()
                    .map(|c| if c.is_missing() { Cell::Cat(mode as u32) } else { *c })
                    .collect();
                replaced[j] = Some(vec![(ds.attribute(j).clone(), cells)]);
            }
        }
        TransformKind::PrincipalComponents => {
            let coverage = spec.param("var").expect("var default");
            let cols: Vec<&[Cell]> = targets.iter().map(|&j| ds.column(j)).collect();
            let fit = pca::fit(&cols, coverage);
            let pcs: Replacement = fit
                .scores()
                .into_iter()
                .enumerate()
                .map(|(i, s)| {
                    (
                        Attribute::continuous(format!("pc{}", i + 1)),
                        s.into_iter().map(Cell::Num).collect(),
                    )
                })
                .collect();
            replaced[targets[0]] = Some(pcs);
            for &j in &targets[1..] {
                replaced[j] = Some(Vec::new());
            }
        }
    }

    let dataset = assemble(ds, replaced).map_err(|e| Error::IllegalTransformation {
        spec: spec.to_string(),
        reason: e.to_string(),
    })?;
    Ok(TransformedDataset {
        dataset,
        source: ds.name().to_string(),
        spec: spec.clone(),
    })
}

/// Rebuilds the attribute list, substituting replacements in place and
/// de-duplicating new names.
fn assemble(ds: &Dataset, replaced: Vec<Option<Replacement>>) -> std::result::Result<Dataset, crate::error::DatasetError> {
    let mut taken: HashSet<String> = ds
        .attributes()
        .iter()
        .enumerate()
        .filter(|(j, _)| replaced[*j].is_none())
        .map(|(_, a)| a.name.clone())
        .collect();
    let mut attributes = Vec::new();
    let mut columns = Vec::new();
    let mut class_index = 0;
    for (j, slot) in replaced.into_iter().enumerate() {
        match slot {
            None => {
                if j == ds.class_index() {
                    class_index = attributes.len();
                }
                attributes.push(ds.attribute(j).clone());
                columns.push(ds.column(j).to_vec());
            }
            Some(parts) => {
                for (mut attr, cells) in parts {
                    let base = attr.name.clone();
                    let mut suffix = 1;
                    while taken.contains(&attr.name) {
                        attr.name = format!("{base}_{suffix}");
                        suffix += 1;
                    }
                    taken.insert(attr.name.clone());
                    attributes.push(attr);
                    columns.push(cells);
                }
            }
        }
    }
    Dataset::new(ds.name(), attributes, class_index, columns)
}

/// k indicators for a k-category attribute (one indicator when k = 2).
fn one_hot(ds: &Dataset, j: usize) -> Replacement {
    let attr = ds.attribute(j);
    let col = ds.column(j);
    let k = attr.categories.len();
    let coded: Vec<usize> = if k == 2 { vec![1] } else { (0..k).collect() };
    coded
        .into_iter()
        .map(|c| {
            let cells = col
                .iter()
                .map(|cell| match cell.cat() {
                    None => Cell::Missing,
                    Some(v) => Cell::Num(if v == c { 1.0 } else { 0.0 }),
                })
                .collect();
            (Attribute::continuous(format!("{}={}", attr.name, attr.categories[c])), cells)
        })
        .collect()
}

/// Supervised nominal-to-binary coding.
///
/// Categories are ordered by the mean class index of their rows (unobserved
/// categories last, ties by category index). A category at rank `r` is then
/// coded by `k - 1` cumulative indicators, indicator `t` being 1 iff `r >= t`,
/// so the coding preserves the class-association order.
fn ordered_cumulative(ds: &Dataset, j: usize) -> Replacement {
    let attr = ds.attribute(j);
    let col = ds.column(j);
    let k = attr.categories.len();
    let labels = ds.class_labels();
    let mut sum = vec![0.0; k];
    let mut count = vec![0.0; k];
    for (cell, &y) in col.iter().zip(&labels) {
        if let Some(v) = cell.cat() {
            sum[v] += y as f64;
            count[v] += 1.0;
        }
    }
    let assoc: Vec<f64> = (0..k)
        .map(|v| if count[v] > 0.0 { sum[v] / count[v] } else { f64::INFINITY })
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| assoc[a].total_cmp(&assoc[b]).then(a.cmp(&b)));
    let mut rank = vec![0; k];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }
    (1..k.max(2))
        .map(|t| {
            let cells = col
                .iter()
                .map(|cell| match cell.cat() {
                    None => Cell::Missing,
                    Some(v) => Cell::Num(if rank[v] >= t { 1.0 } else { 0.0 }),
                })
                .collect();
            let label = order.get(t).map_or("", |&c| attr.categories[c].as_str());
            (Attribute::continuous(format!("{}>={}", attr.name, label)), cells)
        })
        .collect()
}
