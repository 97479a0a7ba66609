// SPDX-License-Identifier: Apache-2.0

//! Matrix Market reader/writer.
//!
//! Sparse operators use the `coordinate` format, vectors the `array`
//! format with one column. Indices are 1-based on disk.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use super::{ComplexVector, SparseOperator};
use crate::error::{Error, Result};

/// Largest dimension accepted from a file.
pub const MAX_DIM: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    SkewSymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

struct Header {
    layout: Layout,
    field: Field,
    symmetry: Symmetry,
}

fn parse_header(line: &str) -> Result<Header> {
    let lower = line.trim().to_ascii_lowercase();
    let mut it = lower.split_whitespace();
    if it.next() != Some("%%matrixmarket") {
        return Err(Error::parse(1, "missing %%MatrixMarket banner"));
    }
    if it.next() != Some("matrix") {
        return Err(Error::parse(1, "only the 'matrix' object is supported"));
    }
    let layout = match it.next() {
        Some("coordinate") => Layout::Coordinate,
        Some("array") => Layout::Array,
        other => return Err(Error::parse(1, format!("unknown format {other:?}"))),
    };
    let field = match it.next() {
        Some("real") | Some("double") => Field::Real,
        Some("complex") => Field::Complex,
        Some("integer") => Field::Integer,
        Some("pattern") => Field::Pattern,
        other => return Err(Error::parse(1, format!("unknown field {other:?}"))),
    };
    let symmetry = match it.next() {
        Some("general") => Symmetry::General,
        Some("symmetric") => Symmetry::Symmetric,
        Some("hermitian") => Symmetry::Hermitian,
        Some("skew-symmetric") => Symmetry::SkewSymmetric,
        other => return Err(Error::parse(1, format!("unknown symmetry {other:?}"))),
    };
    if layout == Layout::Array && field == Field::Pattern {
        return Err(Error::parse(1, "pattern field is not allowed for array format"));
    }
    Ok(Header {
        layout,
        field,
        symmetry,
    })
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what}")))
}

fn parse_f64(tok: Option<&str>, line: usize, what: &str) -> Result<f64> {
    let v: f64 = tok
        .ok_or_else(|| Error::parse(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what}")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite {what}")));
    }
    Ok(v)
}

fn parse_value<'a>(
    field: Field,
    toks: &mut impl Iterator<Item = &'a str>,
    line: usize,
) -> Result<Complex64> {
    match field {
        Field::Pattern => Ok(Complex64::new(1.0, 0.0)),
        Field::Real | Field::Integer => Ok(Complex64::new(parse_f64(toks.next(), line, "value")?, 0.0)),
        Field::Complex => {
            let re = parse_f64(toks.next(), line, "real part")?;
            let im = parse_f64(toks.next(), line, "imaginary part")?;
            Ok(Complex64::new(re, im))
        }
    }
}

/// Parses a square sparse operator from Matrix Market coordinate text.
pub fn parse_sparse(text: &str) -> Result<SparseOperator> {
    let first = text.lines().next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let header = parse_header(first)?;
    if header.layout != Layout::Coordinate {
        return Err(Error::parse(1, "expected coordinate format for a sparse operator"));
    }
    let mut lines = data_lines(text);
    let (ln, size) = lines.next().ok_or_else(|| Error::parse(2, "missing size line"))?;
    let mut toks = size.split_whitespace();
    let rows = parse_usize(toks.next(), ln, "row count")?;
    let cols = parse_usize(toks.next(), ln, "column count")?;
    let nnz = parse_usize(toks.next(), ln, "entry count")?;
    if rows != cols {
        return Err(Error::parse(ln, format!("operator must be square, got {rows}x{cols}")));
    }
    if rows == 0 || rows > MAX_DIM {
        return Err(Error::parse(ln, format!("dimension {rows} out of range")));
    }

    let mut triplets = Vec::with_capacity(nnz.min(1 << 16));
    let mut seen = 0usize;
    for (ln, l) in lines {
        if seen == nnz {
            return Err(Error::parse(ln, "more entries than declared"));
        }
        let mut toks = l.split_whitespace();
        let i = parse_usize(toks.next(), ln, "row index")?;
        let j = parse_usize(toks.next(), ln, "column index")?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(Error::parse(ln, format!("index ({i}, {j}) out of range")));
        }
        let v = parse_value(header.field, &mut toks, ln)?;
        let (r, c) = (i - 1, j - 1);
        triplets.push((r, c, v));
        if r != c {
            match header.symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => triplets.push((c, r, v)),
                Symmetry::Hermitian => triplets.push((c, r, v.conj())),
                Symmetry::SkewSymmetric => triplets.push((c, r, -v)),
            }
        } else if header.symmetry == Symmetry::SkewSymmetric {
            return Err(Error::parse(ln, "skew-symmetric files cannot store diagonal entries"));
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(Error::parse(0, format!("declared {nnz} entries, found {seen}")));
    }
    SparseOperator::from_triplets(rows, &triplets)
}

/// Parses a dense column vector from Matrix Market array text.
pub fn parse_vector(text: &str) -> Result<ComplexVector> {
    let first = text.lines().next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let header = parse_header(first)?;
    if header.layout != Layout::Array {
        return Err(Error::parse(1, "expected array format for a vector"));
    }
    if header.symmetry != Symmetry::General {
        return Err(Error::parse(1, "vectors must be stored as general arrays"));
    }
    let mut lines = data_lines(text);
    let (ln, size) = lines.next().ok_or_else(|| Error::parse(2, "missing size line"))?;
    let mut toks = size.split_whitespace();
    let rows = parse_usize(toks.next(), ln, "row count")?;
    let cols = parse_usize(toks.next(), ln, "column count")?;
    if cols != 1 {
        return Err(Error::parse(ln, format!("expected one column, got {cols}")));
    }
    if rows == 0 || rows > MAX_DIM {
        return Err(Error::parse(ln, format!("dimension {rows} out of range")));
    }
    let mut values = Vec::with_capacity(rows.min(1 << 16));
    for (ln, l) in lines {
        if values.len() == rows {
            return Err(Error::parse(ln, "more entries than declared"));
        }
        let mut toks = l.split_whitespace();
        values.push(parse_value(header.field, &mut toks, ln)?);
    }
    if values.len() != rows {
        return Err(Error::parse(0, format!("declared {rows} entries, found {}", values.len())));
    }
    Ok(ComplexVector::from_vec(values))
}

pub fn format_sparse(a: &SparseOperator) -> String {
    let mut s = String::from("%%MatrixMarket matrix coordinate complex general\n");
    s.push_str(&format!("{} {} {}\n", a.n(), a.n(), a.nnz()));
    for (r, c, v) in a.triplets() {
        s.push_str(&format!("{} {} {:e} {:e}\n", r + 1, c + 1, v.re, v.im));
    }
    s
}

pub fn format_vector(v: &[Complex64]) -> String {
    let mut s = String::from("%%MatrixMarket matrix array complex general\n");
    s.push_str(&format!("{} 1\n", v.len()));
    for x in v {
        s.push_str(&format!("{:e} {:e}\n", x.re, x.im));
    }
    s
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::File::create(path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
}

pub fn read_sparse(path: &Path) -> Result<SparseOperator> {
    parse_sparse(&read(path)?)
}

pub fn read_vector(path: &Path) -> Result<ComplexVector> {
    parse_vector(&read(path)?)
}

pub fn write_sparse(path: &Path, a: &SparseOperator) -> Result<()> {
    write(path, &format_sparse(a))
}

pub fn write_vector(path: &Path, v: &[Complex64]) -> Result<()> {
    write(path, &format_vector(v))
}
