//! In-memory tabular datasets.
//!
//! Cells are stored column-major. Categorical cells hold an index into the
//! attribute's category list, so equality checks in entropy and mutual
//! information computations never touch strings.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::DatasetError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttributeKind {
    Continuous,
    Categorical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
    /// Ordered category labels; empty for continuous attributes.
    pub categories: Vec<String>,
}

impl Attribute {
    pub fn continuous(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Continuous,
            categories: Vec::new(),
        }
    }

    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        categories: impl IntoIterator<Item = S>,
    ) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Categorical,
            categories: categories.into_iter().map(Into::into).collect(),
        }
    }

    pub fn is_continuous(&self) -> bool {
        self.kind == AttributeKind::Continuous
    }

    pub fn is_categorical(&self) -> bool {
        self.kind == AttributeKind::Categorical
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    Missing,
    Num(f64),
    Cat(u32),
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    pub fn num(&self) -> Option<f64> {
        match *self {
            Cell::Num(v) => Some(v),
            _ => None,
        }
    }

    pub fn cat(&self) -> Option<usize> {
        match *self {
            Cell::Cat(c) => Some(c as usize),
            _ => None,
        }
    }
}

/// Immutable, validated tabular dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    name: String,
    attributes: Vec<Attribute>,
    class_index: usize,
    columns: Vec<Vec<Cell>>,
}

impl Dataset {
    /// Builds a dataset from column-major cells, checking every invariant.
    pub fn new(
        name: impl Into<String>,
        attributes: Vec<Attribute>,
        class_index: usize,
        columns: Vec<Vec<Cell>>,
    ) -> Result<Self, DatasetError> {
        if attributes.len() < 2 || class_index >= attributes.len() {
            return Err(DatasetError::TooFewAttributes);
        }
        if columns.len() != attributes.len() {
            return Err(DatasetError::RaggedColumn {
                column: columns.len(),
                expected: attributes.len(),
                found: columns.len(),
            });
        }
        let n = columns[0].len();
        if n == 0 {
            return Err(DatasetError::NoRows);
        }
        let mut seen = HashSet::new();
        for (j, (attr, col)) in attributes.iter().zip(&columns).enumerate() {
            if !seen.insert(attr.name.as_str()) {
                return Err(DatasetError::DuplicateName(attr.name.clone()));
            }
            if col.len() != n {
                return Err(DatasetError::RaggedColumn {
                    column: j,
                    expected: n,
                    found: col.len(),
                });
            }
            match attr.kind {
                AttributeKind::Continuous => {
                    if !attr.categories.is_empty() {
                        return Err(DatasetError::UnexpectedCategories(attr.name.clone()));
                    }
                }
                AttributeKind::Categorical => {
                    if attr.categories.is_empty() {
                        return Err(DatasetError::NoCategories(attr.name.clone()));
                    }
                }
            }
            for (row, cell) in col.iter().enumerate() {
                let bad = |message: &str| DatasetError::BadCell {
                    attribute: attr.name.clone(),
                    row,
                    message: message.to_string(),
                };
                match (attr.kind, *cell) {
                    (_, Cell::Missing) => {}
                    (AttributeKind::Continuous, Cell::Num(v)) if !v.is_finite() => {
                        return Err(bad("non-finite value"))
                    }
                    (AttributeKind::Continuous, Cell::Num(_)) => {}
                    (AttributeKind::Categorical, Cell::Cat(c))
                        if (c as usize) >= attr.categories.len() =>
                    {
                        return Err(bad("category index out of range"))
                    }
                    (AttributeKind::Categorical, Cell::Cat(_)) => {}
                    _ => return Err(bad("cell kind does not match attribute kind")),
                }
            }
        }
        let class = &attributes[class_index];
        if !class.is_categorical() || class.categories.len() < 2 {
            return Err(DatasetError::BadClass);
        }
        if let Some(row) = columns[class_index].iter().position(Cell::is_missing) {
            return Err(DatasetError::MissingClass(row));
        }
        Ok(Dataset {
            name: name.into(),
            attributes,
            class_index,
            columns,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, index: usize) -> &Attribute {
        &self.attributes[index]
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn class_attribute(&self) -> &Attribute {
        &self.attributes[self.class_index]
    }

    pub fn n_rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_attribute().categories.len()
    }

    pub fn column(&self, index: usize) -> &[Cell] {
        &self.columns[index]
    }

    pub fn columns(&self) -> &[Vec<Cell>] {
        &self.columns
    }

    pub fn cell(&self, row: usize, col: usize) -> Cell {
        self.columns[col][row]
    }

    /// Class category index of every row.
    pub fn class_labels(&self) -> Vec<usize> {
        self.columns[self.class_index]
            .iter()
            .map(|c| c.cat().expect("class cells are never missing"))
            .collect()
    }

    /// Indices of all non-class attributes, in attribute order.
    pub fn predictors(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.attributes.len()).filter(move |&j| j != self.class_index)
    }

    pub fn predictors_of(&self, kind: AttributeKind) -> Vec<usize> {
        self.predictors()
            .filter(|&j| self.attributes[j].kind == kind)
            .collect()
    }

    /// Sub-dataset holding the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let columns = self
            .columns
            .iter()
            .map(|col| rows.iter().map(|&r| col[r]).collect())
            .collect();
        Dataset {
            name: self.name.clone(),
            attributes: self.attributes.clone(),
            class_index: self.class_index,
            columns,
        }
    }

    pub fn into_parts(self) -> (String, Vec<Attribute>, usize, Vec<Vec<Cell>>) {
        (self.name, self.attributes, self.class_index, self.columns)
    }
}

/// Stratified assignment of rows to cross-validation folds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldAssignment {
    pub fold_of_row: Vec<usize>,
    pub k: usize,
    pub seed: u64,
}

impl FoldAssignment {
    /// Rows of fold `fold`, ascending.
    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of_row.len())
            .filter(|&r| self.fold_of_row[r] == fold)
            .collect()
    }

    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of_row.len())
            .filter(|&r| self.fold_of_row[r] != fold)
            .collect()
    }
}

/// Shuffles each class's rows with a seeded generator and deals them
/// round-robin, continuing the fold cursor from one class to the next so
/// fold sizes stay balanced overall.
pub fn stratified_folds(ds: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment, DatasetError> {
    let n = ds.n_rows();
    if k < 2 || k > n {
        return Err(DatasetError::BadFoldCount { k, n });
    }
    let labels = ds.class_labels();
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); ds.n_classes()];
    for (row, &c) in labels.iter().enumerate() {
        by_class[c].push(row);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of_row = vec![0; n];
    let mut cursor = 0;
    for rows in &mut by_class {
        rows.shuffle(&mut rng);
        for &row in rows.iter() {
            fold_of_row[row] = cursor % k;
            cursor += 1;
        }
    }
    Ok(FoldAssignment {
        fold_of_row,
        k,
        seed,
    })
}
