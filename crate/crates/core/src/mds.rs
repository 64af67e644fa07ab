//! (N, K)-MDS storage: generator matrices, per-server encoding and
//! reconstruction from any K servers.
//!
//! A message `W` of length `L` (with `K | L`) is cut into `L/K` stripes of
//! `K` consecutive symbols. Server `i` stores, for stripe `s`, the symbol
//! `sum_k G[k][i] * W[s*K + k]`, so each server holds `L/K` symbols per
//! message. Server indices are 0-based throughout the library.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{param, PirError, Result};
use crate::field::{FieldModulus, FieldVector};
use crate::linalg::{combinations, FieldMatrix};

/// Global protocol parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PirParams {
    /// Number of servers `N`.
    pub servers: usize,
    /// Code dimension `K`.
    pub dimension: usize,
    /// Collusion bound `T`.
    pub collusion: usize,
    /// Number of stored messages `M`.
    pub messages: usize,
    pub modulus: FieldModulus,
}

impl PirParams {
    pub fn new(servers: usize, dimension: usize, collusion: usize, messages: usize, q: u32) -> Result<Self> {
        let modulus = FieldModulus::new(q)?;
        let p = PirParams { servers, dimension, collusion, messages, modulus };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 || self.dimension > self.servers {
            return param(format!("need 1 <= K <= N, got K={} N={}", self.dimension, self.servers));
        }
        if self.collusion == 0 || self.collusion > self.servers {
            return param(format!("need 1 <= T <= N, got T={} N={}", self.collusion, self.servers));
        }
        if self.messages == 0 {
            return param("need at least one message");
        }
        Ok(())
    }
}

/// A K x N generator whose every K x K column submatrix is invertible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    matrix: FieldMatrix,
}

impl GeneratorSpec {
    /// Validates an explicit generator given as `K` rows of `N` integers.
    pub fn from_rows(modulus: FieldModulus, rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_matrix(FieldMatrix::from_rows(modulus, rows)?)
    }

    pub fn from_matrix(matrix: FieldMatrix) -> Result<Self> {
        if matrix.rows() == 0 || matrix.rows() > matrix.cols() {
            return param(format!("generator must be K x N with 1 <= K <= N, got {} x {}", matrix.rows(), matrix.cols()));
        }
        if let Some(cols) = first_singular_subset(&matrix) {
            let cols: Vec<usize> = cols.iter().map(|c| c + 1).collect();
            return Err(PirError::Validation {
                property: format!("generator is not MDS: columns {cols:?} are dependent"),
            });
        }
        Ok(GeneratorSpec { matrix })
    }

    /// Vandermonde generator on the points `0, 1, ..., N-1`; when `N = q + 1`
    /// the last column is the point at infinity `(0, ..., 0, 1)`.
    pub fn vandermonde(servers: usize, dimension: usize, modulus: FieldModulus) -> Result<Self> {
        let q = modulus.q() as usize;
        if servers > q + 1 {
            return Err(PirError::InfeasibleParameters(format!(
                "an ({servers},{dimension}) evaluation code needs N <= q + 1 = {}",
                q + 1
            )));
        }
        if dimension == 0 || dimension > servers {
            return param(format!("need 1 <= K <= N, got K={dimension} N={servers}"));
        }
        let mut m = FieldMatrix::zeros(modulus, dimension, servers);
        for j in 0..servers {
            if j == q {
                m.set(dimension - 1, j, 1);
                continue;
            }
            for k in 0..dimension {
                m.set(k, j, modulus.pow(j as u32, k as u64));
            }
        }
        Self::from_matrix(m)
    }

    /// The all-ones `1 x N` generator: plain replication.
    pub fn replication(servers: usize, modulus: FieldModulus) -> Result<Self> {
        Self::from_rows(modulus, &[alloc::vec![1; servers]])
    }

    /// The (4, 2) code `[[1,0,1,1],[0,1,1,2]]`: servers store `a`, `b`,
    /// `a + b` and `a + 2b`.
    pub fn preset_4_2(modulus: FieldModulus) -> Result<Self> {
        Self::from_rows(modulus, &[alloc::vec![1, 0, 1, 1], alloc::vec![0, 1, 1, 2]])
    }

    pub fn modulus(&self) -> FieldModulus {
        self.matrix.modulus()
    }

    /// `K`.
    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }

    /// `N`.
    pub fn servers(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.matrix
    }

    /// Column `i`: the coefficients server `i` applies to each stripe.
    pub fn column(&self, i: usize) -> Vec<u32> {
        self.matrix.column(i)
    }

    /// The functional on `W` (length `L`) computed by `<D_i block, a>`
    /// for `a` of length `L/K`: coefficient `a[s] * G[k][i]` at `s*K + k`.
    pub fn functional(&self, server: usize, a: &[u32]) -> Vec<u32> {
        let m = self.modulus();
        let k = self.dimension();
        let col = self.column(server);
        let mut out = Vec::with_capacity(a.len() * k);
        for &x in a {
            for &g in &col {
                out.push(m.mul(x, g));
            }
        }
        out
    }

    /// Server `i`'s share of one message.
    pub fn encode_message(&self, server: usize, message: &[u32]) -> Vec<u32> {
        let m = self.modulus();
        let k = self.dimension();
        let col = self.column(server);
        message.chunks(k).map(|stripe| m.dot(stripe, &col)).collect()
    }
}

fn first_singular_subset(g: &FieldMatrix) -> Option<Vec<usize>> {
    combinations(g.cols(), g.rows())
        .into_iter()
        .find(|cols| !g.select_columns(cols).is_invertible())
}

/// Messages together with every server's stored block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Database {
    generator: GeneratorSpec,
    messages: Vec<FieldVector>,
    /// Per server, `M` blocks of `L/K` symbols, concatenated.
    blocks: Vec<FieldVector>,
    message_len: usize,
}

impl Database {
    pub fn encode(messages: Vec<FieldVector>, generator: &GeneratorSpec) -> Result<Self> {
        let modulus = generator.modulus();
        let k = generator.dimension();
        let Some(first) = messages.first() else {
            return param("database needs at least one message");
        };
        let len = first.len();
        if len == 0 || len % k != 0 {
            return param(format!("message length {len} must be a positive multiple of K={k}"));
        }
        for w in &messages {
            if w.len() != len {
                return param("all messages must have the same length");
            }
            if w.modulus() != modulus {
                return param("message modulus differs from generator modulus");
            }
        }
        let blocks = (0..generator.servers())
            .map(|i| {
                let data = messages
                    .iter()
                    .flat_map(|w| generator.encode_message(i, w.as_slice()))
                    .collect();
                FieldVector::new(modulus, data)
            })
            .collect();
        Ok(Database { generator: generator.clone(), messages, blocks, message_len: len })
    }

    pub fn generator(&self) -> &GeneratorSpec {
        &self.generator
    }

    pub fn messages(&self) -> &[FieldVector] {
        &self.messages
    }

    pub fn message(&self, j: usize) -> Option<&FieldVector> {
        self.messages.get(j)
    }

    pub fn message_count(&self) -> usize {
        self.messages.len()
    }

    /// `L`.
    pub fn message_len(&self) -> usize {
        self.message_len
    }

    /// `L / K`: symbols per message on each server.
    pub fn share_len(&self) -> usize {
        self.message_len / self.generator.dimension()
    }

    /// `D_i`.
    pub fn server_block(&self, i: usize) -> &FieldVector {
        &self.blocks[i]
    }

    /// Block `j` of `D_i`.
    pub fn share(&self, server: usize, message: usize) -> FieldVector {
        let w = self.share_len();
        let s = &self.blocks[server].as_slice()[message * w..(message + 1) * w];
        FieldVector::new(self.generator.modulus(), s.to_vec())
    }
}

/// Reconstructs a message from `K` shares `(server index, share)`.
pub fn decode_from_subset(shares: &[(usize, FieldVector)], generator: &GeneratorSpec) -> Result<FieldVector> {
    let k = generator.dimension();
    let modulus = generator.modulus();
    if shares.len() != k {
        return param(format!("need exactly K={k} shares, got {}", shares.len()));
    }
    let cols: Vec<usize> = shares.iter().map(|(i, _)| *i).collect();
    for (n, &c) in cols.iter().enumerate() {
        if c >= generator.servers() || cols[..n].contains(&c) {
            return param(format!("share indices must be distinct servers in 0..{}", generator.servers()));
        }
    }
    let width = shares[0].1.len();
    if shares.iter().any(|(_, s)| s.len() != width || s.modulus() != modulus) {
        return param("shares must have equal length and modulus");
    }
    // Stripe s satisfies sum_k G[k][c] x_k = share_c[s] for each chosen c,
    // i.e. (G_S)^T x = y.
    let system = generator.matrix().select_columns(&cols).transpose();
    let inv = system
        .inverse()
        .ok_or_else(|| PirError::Internal(format!("generator columns {cols:?} are singular")))?;
    let mut out = Vec::with_capacity(width * k);
    for s in 0..width {
        let y: Vec<u32> = shares.iter().map(|(_, sh)| sh.as_slice()[s]).collect();
        out.extend(inv.mul_vec(&y));
    }
    Ok(FieldVector::new(modulus, out))
}
