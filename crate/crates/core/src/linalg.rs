//! Dense matrices over a prime field and Gaussian elimination.

use alloc::vec::Vec;

use crate::error::{param, Result};
use crate::field::FieldModulus;

/// Row-major dense matrix of residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    modulus: FieldModulus,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FieldMatrix {
    pub fn zeros(modulus: FieldModulus, rows: usize, cols: usize) -> Self {
        FieldMatrix { modulus, rows, cols, data: alloc::vec![0; rows * cols] }
    }

    pub fn identity(modulus: FieldModulus, n: usize) -> Self {
        let mut m = Self::zeros(modulus, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds from integer rows, reducing every entry.
    pub fn from_rows(modulus: FieldModulus, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return param("ragged matrix rows");
        }
        let data = rows.iter().flatten().map(|&v| modulus.reduce(v)).collect();
        Ok(FieldMatrix { modulus, rows: rows.len(), cols, data })
    }

    pub fn from_residue_rows(modulus: FieldModulus, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return param("ragged matrix rows");
        }
        let data = rows.iter().flatten().map(|&v| v % modulus.q()).collect();
        Ok(FieldMatrix { modulus, rows: rows.len(), cols, data })
    }

    pub fn modulus(&self) -> FieldModulus {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.modulus.q();
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Submatrix made of the given rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> FieldMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        FieldMatrix { modulus: self.modulus, rows: idx.len(), cols: self.cols, data }
    }

    /// Submatrix made of the given columns, in order.
    pub fn select_columns(&self, idx: &[usize]) -> FieldMatrix {
        let mut out = FieldMatrix::zeros(self.modulus, self.rows, idx.len());
        for r in 0..self.rows {
            for (k, &c) in idx.iter().enumerate() {
                out.set(r, k, self.get(r, c));
            }
        }
        out
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut out = FieldMatrix::zeros(self.modulus, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn mul(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        if self.cols != other.rows || self.modulus != other.modulus {
            return param("matrix product shape mismatch");
        }
        let m = self.modulus;
        let mut out = FieldMatrix::zeros(m, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = 0;
                for k in 0..self.cols {
                    acc = m.add(acc, m.mul(self.get(r, k), other.get(k, c)));
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        (0..self.rows).map(|r| self.modulus.dot(self.row(r), v)).collect()
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.row_reduce(self.cols)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<FieldMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = FieldMatrix::zeros(self.modulus, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        if aug.row_reduce(n) != n {
            return None;
        }
        Some(aug.select_columns(&(n..2 * n).collect::<Vec<_>>()))
    }

    /// Solves `self * x = b`. Returns one solution (free variables set to
    /// zero) or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let n = self.cols;
        let mut aug = FieldMatrix::zeros(self.modulus, self.rows, n + 1);
        for r in 0..self.rows {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n, b[r]);
        }
        let rank = aug.row_reduce(n);
        // Inconsistent if a zero row of the coefficient part has a nonzero rhs.
        for r in rank..self.rows {
            if aug.get(r, n) != 0 {
                return None;
            }
        }
        let mut x = alloc::vec![0u32; n];
        for r in 0..rank {
            let pivot = (0..n).find(|&c| aug.get(r, c) != 0).expect("pivot row");
            x[pivot] = aug.get(r, n);
        }
        Some(x)
    }

    /// Reduced row echelon form over the first `pivot_cols` columns, in
    /// place. Returns the rank of that block.
    fn row_reduce(&mut self, pivot_cols: usize) -> usize {
        let m = self.modulus;
        let mut rank = 0;
        for c in 0..pivot_cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| self.get(r, c) != 0) else {
                continue;
            };
            if p != rank {
                for k in 0..self.cols {
                    self.data.swap(p * self.cols + k, rank * self.cols + k);
                }
            }
            let inv = m.inv(self.get(rank, c)).expect("nonzero pivot");
            for k in 0..self.cols {
                let v = m.mul(self.get(rank, k), inv);
                self.set(rank, k, v);
            }
            for r in 0..self.rows {
                if r == rank {
                    continue;
                }
                let factor = self.get(r, c);
                if factor == 0 {
                    continue;
                }
                for k in 0..self.cols {
                    let v = m.sub(self.get(r, k), m.mul(factor, self.get(rank, k)));
                    self.set(r, k, v);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Rank of a family of vectors given as rows.
pub fn rank_of(modulus: FieldModulus, vectors: &[Vec<u32>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    match FieldMatrix::from_residue_rows(modulus, vectors) {
        Ok(m) => m.rank(),
        Err(_) => 0,
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> FieldModulus {
        FieldModulus::new(q).unwrap()
    }

    #[test]
    fn combinations_lex_order() {
        assert_eq!(combinations(3, 2), alloc::vec![alloc::vec![0, 1], alloc::vec![0, 2], alloc::vec![1, 2]]);
        assert_eq!(combinations(4, 0), alloc::vec![Vec::<usize>::new()]);
        assert_eq!(combinations(2, 3).len(), 0);
        assert_eq!(combinations(6, 3).len(), 20);
        let c = combinations(4, 1);
        assert_eq!(c, alloc::vec![alloc::vec![0], alloc::vec![1], alloc::vec![2], alloc::vec![3]]);
    }

    #[test]
    fn solve_and_inverse() {
        let m = f(3);
        let a = FieldMatrix::from_rows(m, &[alloc::vec![1, 1], alloc::vec![1, 2]]).unwrap();
        // (1,2) = a + 2b with a+b = 0 ... solve [[1,1],[1,2]] x = (1, 2)
        let x = a.solve(&[1, 2]).unwrap();
        assert_eq!(a.mul_vec(&x), alloc::vec![1, 2]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), FieldMatrix::identity(m, 2));
    }

    #[test]
    fn singular_and_inconsistent() {
        let m = f(5);
        let a = FieldMatrix::from_rows(m, &[alloc::vec![1, 2], alloc::vec![2, 4]]).unwrap();
        assert_eq!(a.rank(), 1);
        assert!(a.inverse().is_none());
        assert!(a.solve(&[1, 1]).is_none());
        assert!(a.solve(&[1, 2]).is_some());
    }
}
