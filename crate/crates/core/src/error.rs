use thiserror::Error;

/// Errors raised while reading ARFF or CSV sources.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header: {message}")]
    MalformedHeader { line: usize, message: String },
    #[error("line {line}: unknown attribute type `{found}`")]
    UnknownAttributeType { line: usize, found: String },
    #[error("line {line}: row has {found} values, expected {expected}")]
    ArityMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: undeclared nominal value `{value}` for attribute `{attribute}`")]
    UndeclaredNominalValue {
        line: usize,
        attribute: String,
        value: String,
    },
    #[error("line {line}: `{value}` is not a finite number")]
    InvalidNumber { line: usize, value: String },
    #[error("line {line}: sparse ARFF rows are not supported")]
    SparseUnsupported { line: usize },
    #[error("no @data section")]
    MissingData,
    #[error("no nominal attribute usable as class")]
    NoClassAttribute,
    #[error("class column `{0}` not found")]
    MissingClassColumn(String),
    #[error("line {line}: class column has a missing cell")]
    ClassHasMissing { line: usize },
    #[error("empty input")]
    Empty,
    #[error("io: {0}")]
    Io(String),
    #[error("invalid dataset: {0}")]
    Invalid(#[from] DatasetError),
}

/// Violations of the dataset invariants.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("dataset needs at least one row")]
    NoRows,
    #[error("dataset needs a class and at least one predictor")]
    TooFewAttributes,
    #[error("duplicate attribute name `{0}`")]
    DuplicateName(String),
    #[error("class attribute must be categorical with at least two categories")]
    BadClass,
    #[error("class attribute has a missing cell at row {0}")]
    MissingClass(usize),
    #[error("categorical attribute `{0}` has no categories")]
    NoCategories(String),
    #[error("continuous attribute `{0}` declares categories")]
    UnexpectedCategories(String),
    #[error("attribute `{attribute}` row {row}: {message}")]
    BadCell {
        attribute: String,
        row: usize,
        message: String,
    },
    #[error("column {column} has {found} rows, expected {expected}")]
    RaggedColumn {
        column: usize,
        expected: usize,
        found: usize,
    },
    #[error("fold count {k} invalid for {n} rows")]
    BadFoldCount { k: usize, n: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("transformation `{spec}` cannot be applied: {reason}")]
    IllegalTransformation { spec: String, reason: String },
    #[error("invalid transformation text `{0}`")]
    SpecSyntax(String),
    #[error("classifier: {0}")]
    Classifier(String),
    #[error("attribute `{0}` is not categorical")]
    NotCategorical(String),
    #[error("meta-feature key sets differ")]
    KeyMismatch,
    #[error("meta-database: {0}")]
    MetaDb(String),
    #[error("schema version {found} not supported (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("model: {0}")]
    Model(String),
    #[error("feature schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("rules line {line}: {message}")]
    Rules { line: usize, message: String },
    #[error("evaluation: {0}")]
    Evaluation(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
