//! Reading and writing parity-check matrices in alist form.
//!
//! The writer emits the unpadded dialect: each index line carries
//! exactly the entries of its column or row, none of the zero fill the
//! padded dialect uses to square lines off to the maximum weight. The
//! reader accepts both dialects, bare or CRLF line endings, and stray
//! surrounding whitespace, and cross-checks the column and row lists
//! against each other so a corrupted file cannot slip through as a
//! different matrix.

use std::fmt::Write as _;

use thiserror::Error;

use crate::gf2::BinaryMatrix;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlistError {
    #[error("file ends before {expected}")]
    Truncated { expected: &'static str },
    #[error("line {line}: expected an integer, found {token:?}")]
    Parse { line: usize, token: String },
    #[error("line {line}: index {value} is outside 1..={max}")]
    IndexOutOfRange { line: usize, value: usize, max: usize },
    #[error("line {line}: {reason}")]
    Inconsistent { line: usize, reason: String },
}

/// Serializes a matrix in alist form, columns first. First line is
/// `columns rows`.
#[must_use]
pub fn write_alist(h: &BinaryMatrix) -> String {
    let n = h.cols();
    let m = h.rows();
    let col_support: Vec<Vec<usize>> = (0..n)
        .map(|c| (0..m).filter(|&r| h.get(r, c)).collect())
        .collect();
    let row_support: Vec<Vec<usize>> = (0..m)
        .map(|r| (0..n).filter(|&c| h.get(r, c)).collect())
        .collect();
    let max_col = col_support.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = row_support.iter().map(Vec::len).max().unwrap_or(0);

    let mut out = String::new();
    let _ = writeln!(out, "{n} {m}");
    let _ = writeln!(out, "{max_col} {max_row}");
    let weights = |supports: &[Vec<usize>]| {
        supports
            .iter()
            .map(|s| s.len().to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(out, "{}", weights(&col_support));
    let _ = writeln!(out, "{}", weights(&row_support));
    let index_line = |support: &[usize]| {
        support
            .iter()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    for support in &col_support {
        let _ = writeln!(out, "{}", index_line(support));
    }
    for support in &row_support {
        let _ = writeln!(out, "{}", index_line(support));
    }
    out
}

struct Lines<'a> {
    lines: std::str::Lines<'a>,
    number: usize,
}

impl<'a> Lines<'a> {
    fn next_record(&mut self, expected: &'static str) -> Result<(usize, &'a str), AlistError> {
        for line in self.lines.by_ref() {
            self.number += 1;
            return Ok((self.number, line));
        }
        Err(AlistError::Truncated { expected })
    }

    fn next_numbers(&mut self, expected: &'static str) -> Result<(usize, Vec<usize>), AlistError> {
        let (number, line) = self.next_record(expected)?;
        let mut values = Vec::new();
        for token in line.split_whitespace() {
            let value = token.parse().map_err(|_| AlistError::Parse {
                line: number,
                token: token.to_string(),
            })?;
            values.push(value);
        }
        Ok((number, values))
    }
}

fn read_exact(
    lines: &mut Lines<'_>,
    expected: &'static str,
    count: usize,
) -> Result<Vec<usize>, AlistError> {
    let (number, values) = lines.next_numbers(expected)?;
    if values.len() != count {
        return Err(AlistError::Inconsistent {
            line: number,
            reason: format!("{expected}: wanted {count} entries, found {}", values.len()),
        });
    }
    Ok(values)
}

fn read_support(
    lines: &mut Lines<'_>,
    expected: &'static str,
    declared: usize,
    max: usize,
) -> Result<Vec<usize>, AlistError> {
    let (number, values) = lines.next_numbers(expected)?;
    // padded files fill to the maximum weight with zeros
    let mut support = Vec::with_capacity(declared);
    for &value in &values {
        if value == 0 {
            continue;
        }
        if value > max {
            return Err(AlistError::IndexOutOfRange {
                line: number,
                value,
                max,
            });
        }
        support.push(value - 1);
    }
    if support.len() != declared {
        return Err(AlistError::Inconsistent {
            line: number,
            reason: format!(
                "{expected}: declared weight {declared}, found {} indices",
                support.len()
            ),
        });
    }
    Ok(support)
}

pub fn read_alist(text: &str) -> Result<BinaryMatrix, AlistError> {
    let mut lines = Lines {
        lines: text.lines(),
        number: 0,
    };
    let shape = read_exact(&mut lines, "the size line", 2)?;
    let (n, m) = (shape[0], shape[1]);
    // the maximum-weight line is advisory in both dialects
    read_exact(&mut lines, "the maximum-weight line", 2)?;
    let col_weights = read_exact(&mut lines, "the column-weight line", n)?;
    let row_weights = read_exact(&mut lines, "the row-weight line", m)?;

    let mut h = BinaryMatrix::zeros(m, n);
    for (c, &w) in col_weights.iter().enumerate() {
        for r in read_support(&mut lines, "a column index line", w, m)? {
            h.set(r, c, true);
        }
    }
    for (r, &w) in row_weights.iter().enumerate() {
        let (number, support) = {
            let s = read_support(&mut lines, "a row index line", w, n)?;
            (lines.number, s)
        };
        let from_columns: Vec<usize> = (0..n).filter(|&c| h.get(r, c)).collect();
        if support != from_columns {
            return Err(AlistError::Inconsistent {
                line: number,
                reason: format!("row {} disagrees with the column lists", r + 1),
            });
        }
    }
    Ok(h)
}
