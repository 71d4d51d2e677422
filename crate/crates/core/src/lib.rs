//! Meta-learned recommendation of data pre-processing transformations.
//!
//! The pipeline measures how each catalog transformation changes a
//! classifier's cross-validated performance on a corpus of datasets, stores
//! the outcomes with dataset characteristics in a meta-database, trains a
//! random forest on it, and uses that forest to rank transformations for a
//! new dataset without running the classifier on any transformed version.

pub mod arff;
pub mod classifiers;
pub mod csv_io;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod exec;
pub mod metadb;
pub mod metafeatures;
pub mod metalearner;
pub mod ranker;
pub mod stats;
pub mod synth;
pub mod transforms;

pub use dataset::{Attribute, AttributeKind, Cell, Dataset, FoldAssignment};
pub use error::{Error, Result};
