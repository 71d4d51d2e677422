//! Dense ARFF reader and writer.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Read;

use crate::dataset::{Attribute, AttributeKind, Cell, Dataset};
use crate::error::ParseError;

/// Parses a dense ARFF document.
///
/// The class is the attribute named `class` (case-insensitive) if one exists,
/// otherwise the last nominal attribute.
pub fn parse_arff<R: Read>(mut source: R) -> Result<Dataset, ParseError> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| ParseError::Io(e.to_string()))?;
    parse_arff_str(&text)
}

pub fn parse_arff_str(text: &str) -> Result<Dataset, ParseError> {
    parse_arff_with_class(text, None)
}

/// Parses with an explicit class attribute name, falling back to the default
/// rule when `class_name` is `None`.
pub fn parse_arff_with_class(text: &str, class_name: Option<&str>) -> Result<Dataset, ParseError> {
    let mut relation: Option<String> = None;
    let mut attributes: Vec<Attribute> = Vec::new();
    let mut lookups: Vec<HashMap<String, u32>> = Vec::new();
    let mut columns: Vec<Vec<Cell>> = Vec::new();
    let mut in_data = false;
    let mut saw_content = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        saw_content = true;
        if in_data {
            if line.starts_with('{') {
                return Err(ParseError::SparseUnsupported { line: line_no });
            }
            let values = split_values(line, line_no)?;
            if values.len() != attributes.len() {
                return Err(ParseError::ArityMismatch {
                    line: line_no,
                    expected: attributes.len(),
                    found: values.len(),
                });
            }
            for (j, value) in values.into_iter().enumerate() {
                let cell = match value {
                    Token::Bare(v) if v == "?" => Cell::Missing,
                    Token::Bare(v) | Token::Quoted(v) => match attributes[j].kind {
                        AttributeKind::Continuous => {
                            let parsed: f64 = v.parse().map_err(|_| ParseError::InvalidNumber {
                                line: line_no,
                                value: v.clone(),
                            })?;
                            if !parsed.is_finite() {
                                return Err(ParseError::InvalidNumber { line: line_no, value: v });
                            }
                            Cell::Num(parsed)
                        }
                        AttributeKind::Categorical => match lookups[j].get(&v) {
                            Some(&c) => Cell::Cat(c),
                            None => {
                                return Err(ParseError::UndeclaredNominalValue {
                                    line: line_no,
                                    attribute: attributes[j].name.clone(),
                                    value: v,
                                })
                            }
                        },
                    },
                };
                columns[j].push(cell);
            }
            continue;
        }

        let lower = line.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            let rest = line[9..].trim();
            let (name, _) = take_name(rest, line_no)?;
            relation = Some(name);
        } else if lower.starts_with("@attribute") {
            let rest = line[10..].trim();
            let (name, ty) = take_name(rest, line_no)?;
            let ty = ty.trim();
            let attr = if ty.starts_with('{') {
                let Some(inner) = ty.strip_prefix('{').and_then(|s| s.strip_suffix('}')) else {
                    return Err(ParseError::MalformedHeader {
                        line: line_no,
                        message: "unterminated nominal list".into(),
                    });
                };
                let labels: Vec<String> = split_values(inner, line_no)?
                    .into_iter()
                    .map(Token::into_string)
                    .collect();
                if labels.is_empty() || labels.iter().any(String::is_empty) {
                    return Err(ParseError::MalformedHeader {
                        line: line_no,
                        message: "empty nominal list".into(),
                    });
                }
                Attribute::categorical(name, labels)
            } else {
                match ty.to_ascii_lowercase().as_str() {
                    "numeric" | "real" | "integer" => Attribute::continuous(name),
                    "" => {
                        return Err(ParseError::MalformedHeader {
                            line: line_no,
                            message: "attribute without type".into(),
                        })
                    }
                    _ => {
                        return Err(ParseError::UnknownAttributeType {
                            line: line_no,
                            found: ty.to_string(),
                        })
                    }
                }
            };
            let lookup = attr
                .categories
                .iter()
                .enumerate()
                .map(|(i, c)| (c.clone(), i as u32))
                .collect();
            attributes.push(attr);
            lookups.push(lookup);
            columns.push(Vec::new());
        } else if lower.starts_with("@data") {
            if relation.is_none() || attributes.is_empty() {
                return Err(ParseError::MalformedHeader {
                    line: line_no,
                    message: "@data before @relation/@attribute".into(),
                });
            }
            in_data = true;
        } else {
            return Err(ParseError::MalformedHeader {
                line: line_no,
                message: format!("unexpected line `{line}`"),
            });
        }
    }

    if !saw_content {
        return Err(ParseError::Empty);
    }
    if !in_data {
        return Err(ParseError::MissingData);
    }
    let class_index = match class_name {
        Some(c) => attributes
            .iter()
            .position(|a| a.name == c)
            .ok_or_else(|| ParseError::MissingClassColumn(c.to_string()))?,
        None => attributes
            .iter()
            .position(|a| a.name.eq_ignore_ascii_case("class"))
            .or_else(|| attributes.iter().rposition(Attribute::is_categorical))
            .ok_or(ParseError::NoClassAttribute)?,
    };
    let name = relation.unwrap_or_default();
    Ok(Dataset::new(name, attributes, class_index, columns)?)
}

/// Serializes a dataset as dense ARFF. Missing cells become `?`.
pub fn write_arff(ds: &Dataset) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "@relation {}", quote(ds.name()));
    out.push('\n');
    for attr in ds.attributes() {
        match attr.kind {
            AttributeKind::Continuous => {
                let _ = writeln!(out, "@attribute {} numeric", quote(&attr.name));
            }
            AttributeKind::Categorical => {
                let labels: Vec<String> = attr.categories.iter().map(|c| quote(c)).collect();
                let _ = writeln!(out, "@attribute {} {{{}}}", quote(&attr.name), labels.join(","));
            }
        }
    }
    out.push_str("\n@data\n");
    for row in 0..ds.n_rows() {
        let fields: Vec<String> = (0..ds.n_attributes())
            .map(|j| match ds.cell(row, j) {
                Cell::Missing => "?".to_string(),
                Cell::Num(v) => format!("{v}"),
                Cell::Cat(c) => quote(&ds.attribute(j).categories[c as usize]),
            })
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn quote(s: &str) -> String {
    let plain = !s.is_empty()
        && s != "?"
        && !s.starts_with('%')
        && s.chars().all(|c| {
            !c.is_whitespace() && !matches!(c, ',' | '\'' | '"' | '{' | '}' | '\\')
        });
    if plain {
        s.to_string()
    } else {
        let mut q = String::with_capacity(s.len() + 2);
        q.push('\'');
        for c in s.chars() {
            if c == '\'' || c == '\\' {
                q.push('\\');
            }
            q.push(c);
        }
        q.push('\'');
        q
    }
}

enum Token {
    Bare(String),
    Quoted(String),
}

impl Token {
    fn into_string(self) -> String {
        match self {
            Token::Bare(s) | Token::Quoted(s) => s,
        }
    }
}

/// Splits a comma-separated list, honoring single/double quotes and
/// backslash escapes inside quotes.
fn split_values(line: &str, line_no: usize) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = line.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        let token = match chars.peek() {
            None => {
                if !out.is_empty() {
                    return Err(ParseError::MalformedHeader {
                        line: line_no,
                        message: "trailing comma".into(),
                    });
                }
                break;
            }
            Some(&q) if q == '\'' || q == '"' => {
                chars.next();
                let mut s = String::new();
                let mut closed = false;
                while let Some(c) = chars.next() {
                    if c == '\\' {
                        if let Some(e) = chars.next() {
                            s.push(e);
                        }
                    } else if c == q {
                        closed = true;
                        break;
                    } else {
                        s.push(c);
                    }
                }
                if !closed {
                    return Err(ParseError::MalformedHeader {
                        line: line_no,
                        message: "unterminated quote".into(),
                    });
                }
                Token::Quoted(s)
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c == ',' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                Token::Bare(s.trim_end().to_string())
            }
        };
        out.push(token);
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        match chars.next() {
            None => break,
            Some(',') => continue,
            Some(c) => {
                return Err(ParseError::MalformedHeader {
                    line: line_no,
                    message: format!("unexpected `{c}` after value"),
                })
            }
        }
    }
    Ok(out)
}

/// Reads a possibly quoted name and returns it with the remainder of the line.
fn take_name(rest: &str, line_no: usize) -> Result<(String, &str), ParseError> {
    let malformed = |m: &str| ParseError::MalformedHeader {
        line: line_no,
        message: m.to_string(),
    };
    let mut chars = rest.char_indices();
    match chars.next() {
        None => Err(malformed("missing name")),
        Some((_, q)) if q == '\'' || q == '"' => {
            let mut name = String::new();
            let mut escaped = false;
            for (i, c) in chars {
                if escaped {
                    name.push(c);
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    return Ok((name, &rest[i + c.len_utf8()..]));
                } else {
                    name.push(c);
                }
            }
            Err(malformed("unterminated quoted name"))
        }
        Some(_) => {
            let end = rest
                .find(|c: char| c.is_whitespace() || c == '{')
                .unwrap_or(rest.len());
            Ok((rest[..end].to_string(), &rest[end..]))
        }
    }
}
