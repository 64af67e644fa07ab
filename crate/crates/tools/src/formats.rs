//! Plain-text formats for generator matrices and symbolic matrices.
//!
//! Generator: header `K N q`, then `K` rows of `N` residues.
//! Symbolic matrix: header `N r M rows`, then one row per line; empty
//! cells are written as `0`.

use std::fs;
use std::path::Path;

use oneshot_pir::{FieldModulus, GeneratorSpec, PirError, SymbolicMatrix};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Scheme(#[from] PirError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn numbers(line: &str, lineno: usize) -> Result<Vec<i64>, FormatError> {
    line.split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| FormatError::Syntax { line: lineno, msg: format!("not an integer: {t:?}") }))
        .collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn write_generator(g: &GeneratorSpec) -> String {
    let mut out = format!("{} {} {}\n", g.dimension(), g.servers(), g.modulus().q());
    for row in g.matrix().to_rows() {
        out.push_str(&join(&row));
        out.push('\n');
    }
    out
}

pub fn parse_generator(text: &str) -> Result<GeneratorSpec, FormatError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(FormatError::Syntax { line: 1, msg: "missing header `K N q`".into() })?;
    let h = numbers(header, hl)?;
    let [k, n, q] = h[..] else {
        return Err(FormatError::Syntax { line: hl, msg: "header must be `K N q`".into() });
    };
    let modulus = FieldModulus::new(u32::try_from(q).unwrap_or(0))?;
    let mut rows = Vec::new();
    for (ln, line) in lines {
        let row = numbers(line, ln)?;
        if row.len() as i64 != n {
            return Err(FormatError::Syntax { line: ln, msg: format!("expected {n} entries, got {}", row.len()) });
        }
        rows.push(row);
    }
    if rows.len() as i64 != k {
        return Err(FormatError::Syntax { line: hl, msg: format!("header announces {k} rows, found {}", rows.len()) });
    }
    Ok(GeneratorSpec::from_rows(modulus, &rows)?)
}

pub fn write_symbolic(s: &SymbolicMatrix) -> String {
    let (n, r, m) = s.provenance().unwrap_or((s.columns(), 0, s.max_value() as usize));
    let mut out = format!("{n} {r} {m} {}\n", s.rows());
    for row in s.entries() {
        out.push_str(&join(row));
        out.push('\n');
    }
    out
}

/// Returns the header `(N, r, M)` and the matrix.
pub fn parse_symbolic(text: &str) -> Result<((usize, usize, usize), SymbolicMatrix), FormatError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(FormatError::Syntax { line: 1, msg: "missing header `N r M rows`".into() })?;
    let h = numbers(header, hl)?;
    let [n, r, m, rows] = h[..] else {
        return Err(FormatError::Syntax { line: hl, msg: "header must be `N r M rows`".into() });
    };
    if h.iter().any(|&x| x < 0) {
        return Err(FormatError::Syntax { line: hl, msg: "header entries must be nonnegative".into() });
    }
    let mut entries = Vec::new();
    for (ln, line) in lines {
        let row = numbers(line, ln)?;
        if row.len() as i64 != n || row.iter().any(|&x| x < 0) {
            return Err(FormatError::Syntax { line: ln, msg: format!("expected {n} nonnegative entries") });
        }
        entries.push(row.into_iter().map(|x| x as u32).collect());
    }
    if entries.len() as i64 != rows {
        return Err(FormatError::Syntax { line: hl, msg: format!("header announces {rows} rows, found {}", entries.len()) });
    }
    let s = SymbolicMatrix::from_rows(n as usize, entries)?;
    Ok(((n as usize, r as usize, m as usize), s))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn read_file(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn write_file(path: &Path, text: &str) -> Result<(), FormatError> {
    fs::write(path, text).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}
