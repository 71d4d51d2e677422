#![allow(dead_code)]

pub mod oracles;
pub mod records;

use preprank_core::dataset::{Attribute, Cell, Dataset};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct Layout {
    pub rows: usize,
    pub continuous: usize,
    pub categorical: usize,
    pub classes: usize,
    pub missing: f64,
    pub seed: u64,
}

/// A dataset with awkward but legal content: quoted names, repeated values,
/// missing cells, a class column that need not be last.
pub fn random_dataset(l: &Layout) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(l.seed);
    let mut labels: Vec<u32> = (0..l.rows).map(|i| (i % l.classes) as u32).collect();
    labels.shuffle(&mut rng);
    let mut attrs = Vec::new();
    let mut cols = Vec::new();
    for j in 0..l.continuous {
        let scale = [0.01, 1.0, 1000.0][j % 3];
        let col = labels
            .iter()
            .map(|&y| {
                if rng.gen_bool(l.missing) {
                    Cell::Missing
                } else if rng.gen_bool(0.2) {
                    Cell::Num(y as f64 * scale)
                } else {
                    Cell::Num(((rng.gen_range(-5.0..5.0) + y as f64) * scale * 1000.0).round() / 1000.0)
                }
            })
            .collect();
        attrs.push(Attribute::continuous(if j == 0 { "x 0".to_string() } else { format!("x{j}") }));
        cols.push(col);
    }
    for j in 0..l.categorical {
        let k = 2 + j % 3;
        let col = labels
            .iter()
            .map(|&y| {
                if rng.gen_bool(l.missing) {
                    Cell::Missing
                } else if rng.gen_bool(0.5) {
                    Cell::Cat(y % k as u32)
                } else {
                    Cell::Cat(rng.gen_range(0..k as u32))
                }
            })
            .collect();
        let values = (0..k).map(|v| if v == 0 { "it's".to_string() } else { format!("v {v}") });
        attrs.push(Attribute::categorical(format!("c{j}"), values));
        cols.push(col);
    }
    let class_at = rng.gen_range(0..=attrs.len());
    attrs.insert(class_at, Attribute::categorical("class", (0..l.classes).map(|c| format!("k{c}"))));
    cols.insert(class_at, labels.into_iter().map(Cell::Cat).collect());
    Dataset::new(format!("gen-{}", l.seed), attrs, class_at, cols).expect("generator keeps invariants")
}

pub fn arb_layout() -> impl Strategy<Value = Layout> {
    (6usize..40, 0usize..4, 0usize..3, 2usize..4, prop_oneof![Just(0.0), 0.0..0.3f64], any::<u64>())
        .prop_filter("at least one predictor", |t| t.1 + t.2 > 0)
        .prop_map(|(rows, continuous, categorical, classes, missing, seed)| Layout {
            rows,
            continuous,
            categorical,
            classes,
            missing,
            seed,
        })
}

pub fn arb_dataset() -> impl Strategy<Value = Dataset> {
    arb_layout().prop_map(|l| random_dataset(&l))
}

/// Rows reordered by `perm`.
pub fn permute_rows(ds: &Dataset, perm: &[usize]) -> Dataset {
    ds.select_rows(perm)
}

/// Columns reordered by `order` (a permutation of attribute indices).
pub fn permute_columns(ds: &Dataset, order: &[usize]) -> Dataset {
    let attrs = order.iter().map(|&j| ds.attribute(j).clone()).collect();
    let cols = order.iter().map(|&j| ds.column(j).to_vec()).collect();
    let class = order.iter().position(|&j| j == ds.class_index()).expect("class kept");
    Dataset::new(ds.name(), attrs, class, cols).expect("same content")
}

/// A seeded shuffle of `0..n`.
pub fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    v
}
