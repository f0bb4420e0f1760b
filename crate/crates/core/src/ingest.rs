//! LIBSVM sparse text format.
//!
//! ```text
//! # comment
//! +1 3:0.5 7:-2
//! -1
//! ```
//!
//! One record per line: a label followed by `index:value` pairs with 1-based,
//! strictly increasing indices. Blank lines and `#` comments are skipped; text
//! after a `#` on a record line is ignored. Errors carry `line:column`, both
//! 1-based, pointing at the offending token.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseRow {
    pub label: f64,
    /// 1-based feature indices, strictly increasing.
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseRow {
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedDataset {
    pub rows: Vec<SparseRow>,
    /// Largest index seen; 0 when no row has features.
    pub max_index: u32,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Splits on ASCII whitespace, yielding `(1-based column, token)`.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_ascii_whitespace().map(move |tok| {
        let offset = tok.as_ptr() as usize - line.as_ptr() as usize;
        (offset + 1, tok)
    })
}

fn parse_line(text: &str, line_no: usize) -> Result<Option<SparseRow>> {
    let body = match text.find('#') {
        Some(pos) => &text[..pos],
        None => text,
    };
    let mut toks = tokens(body);
    let Some((col, label_tok)) = toks.next() else {
        return Ok(None);
    };
    let label: f64 = label_tok
        .parse()
        .map_err(|_| parse_err(line_no, col, format!("invalid label `{label_tok}`")))?;
    if !label.is_finite() {
        return Err(parse_err(
            line_no,
            col,
            format!("non-finite label `{label_tok}`"),
        ));
    }

    let mut indices: Vec<u32> = Vec::new();
    let mut values = Vec::new();
    for (col, tok) in toks {
        let Some((idx_str, val_str)) = tok.split_once(':') else {
            return Err(parse_err(
                line_no,
                col,
                format!("malformed feature pair `{tok}`"),
            ));
        };
        let idx: i64 = idx_str
            .parse()
            .map_err(|_| parse_err(line_no, col, format!("invalid feature index `{idx_str}`")))?;
        if idx <= 0 {
            return Err(parse_err(
                line_no,
                col,
                format!("feature index must be positive, got {idx}"),
            ));
        }
        let idx = u32::try_from(idx)
            .map_err(|_| parse_err(line_no, col, format!("feature index {idx} too large")))?;
        if let Some(&prev) = indices.last() {
            if idx == prev {
                return Err(parse_err(line_no, col, format!("duplicate index {idx}")));
            }
            if idx < prev {
                return Err(parse_err(
                    line_no,
                    col,
                    format!("non-increasing index {idx} after {prev}"),
                ));
            }
        }
        let value_col = col + idx_str.len() + 1;
        let value: f64 = val_str.parse().map_err(|_| {
            parse_err(
                line_no,
                value_col,
                format!("invalid feature value `{val_str}`"),
            )
        })?;
        if !value.is_finite() {
            return Err(parse_err(
                line_no,
                value_col,
                format!("non-finite feature value `{val_str}`"),
            ));
        }
        indices.push(idx);
        values.push(value);
    }
    Ok(Some(SparseRow {
        label,
        indices,
        values,
    }))
}

/// Parses a LIBSVM stream line by line.
pub fn parse_libsvm<R: BufRead>(mut reader: R) -> Result<ParsedDataset> {
    let mut out = ParsedDataset::default();
    let mut buf = String::new();
    let mut line_no = 0usize;
    loop {
        buf.clear();
        line_no += 1;
        let read = reader
            .read_line(&mut buf)
            .map_err(|e| parse_err(line_no, 1, format!("unreadable line: {e}")))?;
        if read == 0 {
            break;
        }
        if let Some(row) = parse_line(&buf, line_no)? {
            if let Some(&last) = row.indices.last() {
                out.max_index = out.max_index.max(last);
            }
            out.rows.push(row);
        }
    }
    Ok(out)
}

pub fn parse_libsvm_file(path: impl AsRef<Path>) -> Result<ParsedDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_libsvm(BufReader::new(file))
}

/// Canonical form: single spaces, shortest round-trip float representation.
pub fn write_libsvm<W: Write>(rows: &[SparseRow], mut out: W) -> std::io::Result<()> {
    for row in rows {
        write!(out, "{}", row.label)?;
        for (i, v) in row.indices.iter().zip(&row.values) {
            write!(out, " {i}:{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn to_libsvm_string(rows: &[SparseRow]) -> String {
    let mut buf = Vec::new();
    write_libsvm(rows, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("formatted numbers are ASCII")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub count: usize,
    pub max_index: u32,
    pub nnz: usize,
    /// Fraction of rows with a positive label; 0 for an empty dataset.
    pub label_balance: f64,
}

pub fn dataset_stats(rows: &[SparseRow]) -> DatasetStats {
    let positives = rows.iter().filter(|r| r.label > 0.0).count();
    DatasetStats {
        count: rows.len(),
        max_index: rows
            .iter()
            .filter_map(|r| r.indices.last().copied())
            .max()
            .unwrap_or(0),
        nnz: rows.iter().map(SparseRow::nnz).sum(),
        label_balance: if rows.is_empty() {
            0.0
        } else {
            positives as f64 / rows.len() as f64
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ParsedDataset> {
        parse_libsvm(text.as_bytes())
    }

    fn parse_error(text: &str) -> (usize, usize, String) {
        match parse(text) {
            Err(Error::Parse {
                line,
                column,
                message,
            }) => (line, column, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn reads_basic_record() {
        let ds = parse("1 3:0.5 7:-2\n").unwrap();
        assert_eq!(ds.rows.len(), 1);
        assert_eq!(ds.rows[0].label, 1.0);
        assert_eq!(ds.rows[0].indices, vec![3, 7]);
        assert_eq!(ds.rows[0].values, vec![0.5, -2.0]);
        assert_eq!(ds.max_index, 7);
    }

    #[test]
    fn label_only_line() {
        let ds = parse("-1").unwrap();
        assert_eq!(ds.rows[0].label, -1.0);
        assert!(ds.rows[0].indices.is_empty());
        assert_eq!(ds.max_index, 0);
    }

    #[test]
    fn skips_blank_and_comment_lines() {
        let ds = parse("# header\n\n  \n+1 1:1 # trailing\r\n-1 2:3\n").unwrap();
        assert_eq!(ds.rows.len(), 2);
        assert_eq!(ds.rows[0].indices, vec![1]);
        assert_eq!(ds.max_index, 2);
    }

    #[test]
    fn non_increasing_index() {
        let (line, col, msg) = parse_error("1 5:0.1 2:0.3");
        assert_eq!((line, col), (1, 9));
        assert!(msg.contains("non-increasing index"), "{msg}");
    }

    #[test]
    fn error_positions() {
        assert_eq!(parse_error("1 1:1\nabc 1:2\n").0, 2);
        let (line, col, msg) = parse_error("1 1:1\n\n-1 0:2\n");
        assert_eq!((line, col), (3, 4));
        assert!(msg.contains("positive"));
        let (_, col, msg) = parse_error("1 -2:1");
        assert_eq!(col, 3);
        assert!(msg.contains("positive"));
        let (_, col, msg) = parse_error("1 1:1  4");
        assert_eq!(col, 8);
        assert!(msg.contains("malformed"));
        let (_, col, msg) = parse_error("1 12:x");
        assert_eq!(col, 6);
        assert!(msg.contains("value"));
        let (_, _, msg) = parse_error("1 a:1");
        assert!(msg.contains("index"));
        let (_, _, msg) = parse_error("1 2:1 2:3");
        assert!(msg.contains("duplicate"));
        let (_, _, msg) = parse_error("1 2:nan");
        assert!(msg.contains("non-finite"));
    }

    #[test]
    fn stats() {
        assert_eq!(
            dataset_stats(&[]),
            DatasetStats {
                count: 0,
                max_index: 0,
                nnz: 0,
                label_balance: 0.0
            }
        );
        let ds = parse("1 1:1 2:2 9:3\n-1\n").unwrap();
        let s = dataset_stats(&ds.rows);
        assert_eq!((s.count, s.nnz, s.max_index), (2, 3, 9));
        assert_eq!(s.label_balance, 0.5);
    }

    #[test]
    fn canonical_form() {
        let ds = parse("+1   3:0.50   7:-2e0\n-1\n").unwrap();
        assert_eq!(to_libsvm_string(&ds.rows), "1 3:0.5 7:-2\n-1\n");
    }
}
