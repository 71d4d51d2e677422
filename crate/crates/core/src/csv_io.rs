//! CSV ingestion with per-column type inference.

use std::collections::HashMap;
use std::io::Read;

use crate::dataset::{Attribute, AttributeKind, Cell, Dataset};
use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassColumn {
    Name(String),
    Index(usize),
    /// The final column.
    Last,
}

impl From<&str> for ClassColumn {
    fn from(s: &str) -> Self {
        ClassColumn::Name(s.to_string())
    }
}

impl From<usize> for ClassColumn {
    fn from(i: usize) -> Self {
        ClassColumn::Index(i)
    }
}

fn is_missing(s: &str) -> bool {
    s.is_empty() || s == "NA" || s == "?"
}

fn finite(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses a CSV file with a header row.
///
/// `type_hints` maps column names to a forced kind; other columns are
/// continuous only when every non-missing cell is a finite number. The class
/// column is always categorical.
pub fn parse_csv<R: Read>(
    source: R,
    name: &str,
    class_column: ClassColumn,
    type_hints: &HashMap<String, AttributeKind>,
) -> Result<Dataset, ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(ParseError::Empty);
    }
    let class_index = match &class_column {
        ClassColumn::Name(n) => header
            .iter()
            .position(|h| h == n)
            .ok_or_else(|| ParseError::MissingClassColumn(n.clone()))?,
        ClassColumn::Index(i) if *i < header.len() => *i,
        ClassColumn::Index(i) => return Err(ParseError::MissingClassColumn(i.to_string())),
        ClassColumn::Last => header.len() - 1,
    };

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        // header is line 1
        let line = r + 2;
        if record.len() != header.len() {
            return Err(ParseError::ArityMismatch {
                line,
                expected: header.len(),
                found: record.len(),
            });
        }
        for (j, field) in record.iter().enumerate() {
            if j == class_index && is_missing(field) {
                return Err(ParseError::ClassHasMissing { line });
            }
            raw[j].push(field.to_string());
        }
    }
    if raw[0].is_empty() {
        return Err(ParseError::Empty);
    }

    let mut attributes = Vec::with_capacity(header.len());
    let mut columns = Vec::with_capacity(header.len());
    for (j, values) in raw.into_iter().enumerate() {
        let kind = if j == class_index {
            AttributeKind::Categorical
        } else if let Some(&k) = type_hints.get(&header[j]) {
            k
        } else if values.iter().filter(|v| !is_missing(v)).all(|v| finite(v).is_some()) {
            AttributeKind::Continuous
        } else {
            AttributeKind::Categorical
        };
        match kind {
            AttributeKind::Continuous => {
                let mut col = Vec::with_capacity(values.len());
                for (r, v) in values.iter().enumerate() {
                    if is_missing(v) {
                        col.push(Cell::Missing);
                    } else {
                        let x = finite(v).ok_or_else(|| ParseError::InvalidNumber {
                            line: r + 2,
                            value: v.clone(),
                        })?;
                        col.push(Cell::Num(x));
                    }
                }
                attributes.push(Attribute::continuous(header[j].clone()));
                columns.push(col);
            }
            AttributeKind::Categorical => {
                let mut categories: Vec<String> = Vec::new();
                let mut index: HashMap<String, u32> = HashMap::new();
                let col = values
                    .into_iter()
                    .map(|v| {
                        if is_missing(&v) {
                            Cell::Missing
                        } else {
                            let next = index.len() as u32;
                            let c = *index.entry(v.clone()).or_insert_with(|| {
                                categories.push(v);
                                next
                            });
                            Cell::Cat(c)
                        }
                    })
                    .collect();
                if categories.is_empty() {
                    categories.push("?".into());
                }
                attributes.push(Attribute::categorical(header[j].clone(), categories));
                columns.push(col);
            }
        }
    }
    Ok(Dataset::new(name, attributes, class_index, columns)?)
}

fn csv_error(e: csv::Error) -> ParseError {
    match e.kind() {
        csv::ErrorKind::UnequalLengths {
            pos,
            expected_len,
            len,
        } => ParseError::ArityMismatch {
            line: pos.as_ref().map(|p| p.line() as usize).unwrap_or(0),
            expected: *expected_len as usize,
            found: *len as usize,
        },
        _ => ParseError::Io(e.to_string()),
    }
}
