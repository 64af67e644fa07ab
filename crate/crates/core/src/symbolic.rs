//! Symbolic matrices: nonnegative integer matrices whose entry `k` in
//! column `j` stands for every sum of `k` queries on distinct message
//! blocks sent to server `j`. Zero is an empty cell.
//!
//! Positions are 0-based `(row, col)` and ordered row-major.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{param, PirError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

impl Position {
    pub fn new(row: usize, col: usize) -> Self {
        Position { row, col }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolicMatrix {
    columns: usize,
    entries: Vec<Vec<u32>>,
    /// `(N, r, M)` for matrices produced by [`build_symbolic`].
    provenance: Option<(usize, usize, usize)>,
}

impl SymbolicMatrix {
    pub fn from_rows(columns: usize, entries: Vec<Vec<u32>>) -> Result<Self> {
        if columns == 0 {
            return param("a symbolic matrix needs at least one column");
        }
        if entries.iter().any(|r| r.len() != columns) {
            return param(format!("every row must have {columns} entries"));
        }
        Ok(SymbolicMatrix { columns, entries, provenance: None })
    }

    /// `S_2`: `r` ones followed by `N - r` twos.
    pub fn base(n: usize, r: usize) -> Result<Self> {
        if r == 0 || r >= n {
            return param(format!("need 1 <= r < N, got r={r} N={n}"));
        }
        let row = (0..n).map(|j| if j < r { 1 } else { 2 }).collect();
        Ok(SymbolicMatrix { columns: n, entries: vec![row], provenance: Some((n, r, 2)) })
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, p: Position) -> u32 {
        self.entries[p.row][p.col]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i]
    }

    pub fn entries(&self) -> &[Vec<u32>] {
        &self.entries
    }

    pub fn provenance(&self) -> Option<(usize, usize, usize)> {
        self.provenance
    }

    /// Largest entry.
    pub fn max_value(&self) -> u32 {
        self.entries.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Nonzero entries in column `j`, top to bottom.
    pub fn column_entries(&self, j: usize) -> Vec<Position> {
        (0..self.rows()).map(|i| Position::new(i, j)).filter(|&p| self.get(p) != 0).collect()
    }
}

/// `sigma(S)[i][j] = S[i][j + 1]`, cyclically.
pub fn shift_columns(s: &SymbolicMatrix) -> SymbolicMatrix {
    let n = s.columns;
    let entries = s.entries.iter().map(|row| (0..n).map(|j| row[(j + 1) % n]).collect()).collect();
    SymbolicMatrix { columns: n, entries, provenance: None }
}

fn shift_by(s: &SymbolicMatrix, t: usize) -> SymbolicMatrix {
    let n = s.columns;
    let entries = s.entries.iter().map(|row| (0..n).map(|j| row[(j + t) % n]).collect()).collect();
    SymbolicMatrix { columns: n, entries, provenance: None }
}

/// Positions holding `k`, in row-major order.
pub fn entries_with_value(s: &SymbolicMatrix, k: u32) -> Vec<Position> {
    let mut out = Vec::new();
    for (i, row) in s.entries.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v == k {
                out.push(Position::new(i, j));
            }
        }
    }
    out
}

/// `tau_k(i, j) = (i + k, j - 1)`, with column 0 wrapping to `N - 1`.
pub fn tau_shift(k: usize, p: Position, n: usize) -> Position {
    Position::new(p.row + k, (p.col + n - 1) % n)
}

/// Columns touched by a set of positions.
pub fn column_projection(b: &[Position]) -> BTreeSet<usize> {
    b.iter().map(|p| p.col).collect()
}

/// The chains `B_i = {b_i, tau_l(b_i), ..., tau_l^{r-1}(b_i)}` over the
/// value-`M` entries `b_i` of `S_M`, where `l` is the row count of `S_M`.
pub fn lift_chains(s: &SymbolicMatrix, r: usize, m: usize) -> Vec<Vec<Position>> {
    let l = s.rows();
    entries_with_value(s, m as u32)
        .into_iter()
        .map(|b| {
            let mut chain = Vec::with_capacity(r);
            let mut cur = b;
            for _ in 0..r {
                chain.push(cur);
                cur = tau_shift(l, cur, s.columns);
            }
            chain
        })
        .collect()
}

/// Stacks `sigma^0(S_M), ..., sigma^{r-1}(S_M)` and the matrix `A`.
pub fn lift_once(s: &SymbolicMatrix, r: usize, n: usize, m: usize) -> Result<SymbolicMatrix> {
    if s.provenance != Some((n, r, m)) {
        return param(format!("lift expects a matrix built for (N, r, M) = ({n}, {r}, {m})"));
    }
    let mut entries = Vec::with_capacity(r * s.rows());
    for t in 0..r {
        entries.extend(shift_by(s, t).entries);
    }
    for chain in lift_chains(s, r, m) {
        let cols = column_projection(&chain);
        entries.push((0..n).map(|j| if cols.contains(&j) { 0 } else { m as u32 + 1 }).collect());
    }
    Ok(SymbolicMatrix { columns: n, entries, provenance: Some((n, r, m + 1)) })
}

/// `S_M = lift^{M-2}(S_2)`.
pub fn build_symbolic(n: usize, r: usize, m: usize) -> Result<SymbolicMatrix> {
    if m < 2 {
        return param(format!("need M >= 2, got M={m}"));
    }
    let mut s = SymbolicMatrix::base(n, r)?;
    for level in 2..m {
        s = lift_once(&s, r, n, level)?;
    }
    Ok(s)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn pow(base: usize, exp: usize) -> u128 {
    (base as u128).pow(exp as u32)
}

/// Number of entries equal to `k`, checked against `r^{M-k} (N-r)^{k-1}`.
pub fn count_value(s: &SymbolicMatrix, k: usize) -> Result<u128> {
    let count = s.entries.iter().flatten().filter(|&&v| v as usize == k).count() as u128;
    let Some((n, r, m)) = s.provenance else {
        return Ok(count);
    };
    if k == 0 || k > m {
        return Ok(count);
    }
    let expected = pow(r, m - k) * pow(n - r, k - 1);
    if count != expected {
        return Err(PirError::Internal(format!(
            "S({n},{m},{r}) has {count} entries equal to {k}, closed form gives {expected}"
        )));
    }
    Ok(count)
}

/// Query slots `sum_k #k * C(M, k)`, checked against `(N^M - r^M) / (N - r)`.
pub fn total_queries(n: usize, r: usize, m: usize) -> Result<u128> {
    let s = build_symbolic(n, r, m)?;
    let mut total = 0;
    for k in 1..=m {
        total += count_value(&s, k)? * binomial(m, k);
    }
    let expected = (pow(n, m) - pow(r, m)) / (n - r) as u128;
    if total != expected {
        return Err(PirError::Internal(format!("total query count {total} differs from closed form {expected}")));
    }
    Ok(total)
}

/// Slots involving the desired message, `sum_k #k * C(M-1, k-1)`, checked
/// against `N^{M-1}`.
pub fn informative_queries(n: usize, r: usize, m: usize) -> Result<u128> {
    let s = build_symbolic(n, r, m)?;
    let mut total = 0;
    for k in 1..=m {
        total += count_value(&s, k)? * binomial(m - 1, k - 1);
    }
    let expected = pow(n, m - 1);
    if total != expected {
        return Err(PirError::Internal(format!(
            "informative query count {total} differs from closed form {expected}"
        )));
    }
    Ok(total)
}
