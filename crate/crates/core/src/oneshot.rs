//! One-shot schemes: one query per server, `r` pure noise queries and
//! `N - r` mixed queries carrying an informative vector on top of noise.
//!
//! The noise sent to server `i` is `sum_t lambda[i][t] * f_t` for free
//! uniform vectors `f_1..f_f`. A mixed position `p` is decodable when the
//! noise response at `p` is a fixed linear combination of the responses at
//! the noise positions, identically in the data and the free vectors:
//! `g_p (x) lambda_p = sum_n alpha_n g_n (x) lambda_n`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use crate::error::{param, PirError, Result};
use crate::field::{is_prime, next_prime, FieldModulus, FieldVector};
use crate::linalg::{combinations, FieldMatrix};
use crate::mds::{Database, GeneratorSpec, PirParams};

/// Which construction produced a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Construction {
    SecretSharing,
    Geometrical,
    Explicit,
}

impl Construction {
    pub fn name(self) -> &'static str {
        match self {
            Construction::SecretSharing => "secret_sharing",
            Construction::Geometrical => "geometrical",
            Construction::Explicit => "explicit",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "secret_sharing" => Some(Construction::SecretSharing),
            "geometrical" => Some(Construction::Geometrical),
            "explicit" => Some(Construction::Explicit),
            _ => None,
        }
    }
}

/// `<D_target, q_target> = sum_j coefficients[j] * <D_sources[j], q_sources[j]>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodingEquation {
    pub target: usize,
    pub sources: Vec<usize>,
    pub coefficients: Vec<u32>,
}

/// Data relations behind the geometrical construction.
///
/// With `T` leading servers, middle servers `T..K+T-1` and tail servers
/// `l >= K+T-1`: `g_i = sum_mid lambda[i][l][j] g_j + lambda[i][l][K-1] g_l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeometricalSpec {
    /// `lambda[i][l - (K+T-1)]`: `K` coefficients, middle servers first, then `l`.
    pub lambda: Vec<Vec<Vec<u32>>>,
    /// `gamma[i][l - (K+T-1)]`.
    pub gamma: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct IntegerData {
    generator: Vec<Vec<i64>>,
    lambda: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneShotScheme {
    params: PirParams,
    generator: GeneratorSpec,
    lambda: FieldMatrix,
    noise_positions: Vec<usize>,
    mixed_positions: Vec<usize>,
    equations: Vec<DecodingEquation>,
    rotation: usize,
    construction: Construction,
    geometrical: Option<GeometricalSpec>,
    integers: Option<IntegerData>,
}

impl OneShotScheme {
    /// Replicated storage (`K = 1`) with an `(N, T)`-MDS noise code
    /// `[I_T; C]`; codimension `T`.
    pub fn secret_sharing(servers: usize, collusion: usize, messages: usize, modulus: FieldModulus) -> Result<Self> {
        let params = PirParams::new(servers, 1, collusion, messages, modulus.q())?;
        if collusion >= servers {
            return param(format!("secret sharing needs T < N, got T={collusion} N={servers}"));
        }
        let generator = GeneratorSpec::replication(servers, modulus)?;
        let lambda = systematic_noise_code(servers, collusion, modulus)?;
        let noise: Vec<usize> = (0..collusion).collect();
        Self::assemble(params, generator, lambda, noise, 0, Construction::SecretSharing, None, None)
    }

    /// Geometrical construction of codimension `K + T - 1` over `generator`.
    pub fn geometrical(params: PirParams, generator: GeneratorSpec) -> Result<Self> {
        let n = params.servers;
        let k = params.dimension;
        let t = params.collusion;
        check_generator(&params, &generator)?;
        let r = k + t - 1;
        if r >= n {
            return param(format!("geometrical construction needs K + T - 1 < N, got K={k} T={t} N={n}"));
        }
        let m = params.modulus;
        let l0 = r;
        let mid: Vec<usize> = (t..l0).collect();
        let tails: Vec<usize> = (l0..n).collect();

        // lambda[i][l]: coordinates of g_i in the basis (g_mid..., g_l).
        let mut lam = vec![vec![Vec::new(); tails.len()]; t];
        for i in 0..t {
            let gi = generator.column(i);
            for (li, &l) in tails.iter().enumerate() {
                let mut cols = mid.clone();
                cols.push(l);
                let basis = generator.matrix().select_columns(&cols);
                lam[i][li] = basis
                    .solve(&gi)
                    .ok_or_else(|| PirError::Internal(format!("generator columns {cols:?} are singular")))?;
            }
        }

        let ss_tail = if k == 1 { Some(systematic_noise_code(n, t, m)?) } else { None };
        let mut gamma = vec![vec![1u32; tails.len()]; t];
        for i in 0..t {
            for li in 1..tails.len() {
                let mut ratio: Option<u32> = None;
                for (jj, &j) in mid.iter().enumerate() {
                    let at_l0 = lam[i][0][jj];
                    let at_l = lam[i][li][jj];
                    let unsupported = PirError::ConstructionUnsupported { i: i + 1, j: j + 1, l: tails[li] + 1 };
                    if at_l == 0 {
                        if at_l0 != 0 {
                            return Err(unsupported);
                        }
                        continue;
                    }
                    let g = m.div(at_l0, at_l)?;
                    match ratio {
                        None => ratio = Some(g),
                        Some(prev) if prev != g => return Err(unsupported),
                        _ => {}
                    }
                }
                gamma[i][li] = match (ratio, &ss_tail) {
                    (Some(g), _) => g,
                    (None, Some(code)) => {
                        // K = 1: match the secret-sharing noise code.
                        let scale = lam[i][li][k - 1];
                        m.div(code.get(tails[li], i), scale)?
                    }
                    (None, None) => 1,
                };
            }
            if let (Some(code), false) = (&ss_tail, tails.is_empty()) {
                gamma[i][0] = m.div(code.get(l0, i), lam[i][0][k - 1])?;
            }
        }

        let mut lambda = FieldMatrix::zeros(m, n, t);
        for i in 0..t {
            lambda.set(i, i, 1);
        }
        for (jj, &j) in mid.iter().enumerate() {
            for i in 0..t {
                lambda.set(j, i, lam[i][0][jj]);
            }
        }
        for (li, &l) in tails.iter().enumerate() {
            for i in 0..t {
                lambda.set(l, i, m.mul(gamma[i][li], lam[i][li][k - 1]));
            }
        }
        let spec = GeometricalSpec { lambda: lam, gamma };
        let noise: Vec<usize> = (0..r).collect();
        let scheme = Self::assemble(params, generator, lambda, noise, 0, Construction::Geometrical, Some(spec), None)?;
        scheme.check_geometrical_closed_form()?;
        Ok(scheme)
    }

    /// A scheme given by integer generator and noise-code rows, reduced
    /// mod `q`. `mixed` lists the mixed positions (0-based).
    pub fn explicit(params: PirParams, generator: &[Vec<i64>], lambda: &[Vec<i64>], mixed: &[usize]) -> Result<Self> {
        let m = params.modulus;
        let n = params.servers;
        for (what, rows) in [("generator", generator), ("noise code", lambda)] {
            for row in rows {
                for &v in row {
                    if v != 0 && m.reduce(v) == 0 {
                        return Err(PirError::InfeasibleParameters(format!(
                            "{what} coefficient {v} vanishes in characteristic {}",
                            m.q()
                        )));
                    }
                }
            }
        }
        if lambda.len() != n {
            return param(format!("noise code needs {n} rows, got {}", lambda.len()));
        }
        let gen = GeneratorSpec::from_rows(m, generator)?;
        if gen.servers() != n || gen.dimension() != params.dimension {
            return param(format!(
                "generator is {} x {}, expected {} x {n}",
                gen.dimension(),
                gen.servers(),
                params.dimension
            ));
        }
        let lam = FieldMatrix::from_rows(m, lambda)?;
        if lam.cols() < params.collusion {
            return Err(PirError::Validation {
                property: format!("noise code has {} free vectors, fewer than T={}", lam.cols(), params.collusion),
            });
        }
        let mut mixed_sorted = mixed.to_vec();
        mixed_sorted.sort_unstable();
        mixed_sorted.dedup();
        if mixed_sorted.is_empty() || mixed_sorted.len() != mixed.len() || mixed_sorted.iter().any(|&p| p >= n) {
            return param("mixed positions must be distinct servers, at least one");
        }
        if mixed_sorted.len() == n {
            return param("at least one noise position is required");
        }
        let noise: Vec<usize> = (0..n).filter(|p| !mixed_sorted.contains(p)).collect();
        rank_condition(&lam, params.collusion)?;
        let ints = IntegerData { generator: generator.to_vec(), lambda: lambda.to_vec() };
        Self::assemble(params, gen, lam, noise, 0, Construction::Explicit, None, Some(ints))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        params: PirParams,
        generator: GeneratorSpec,
        lambda: FieldMatrix,
        noise_positions: Vec<usize>,
        rotation: usize,
        construction: Construction,
        geometrical: Option<GeometricalSpec>,
        integers: Option<IntegerData>,
    ) -> Result<Self> {
        let n = params.servers;
        let mixed_positions: Vec<usize> = (0..n).filter(|p| !noise_positions.contains(p)).collect();
        let mut equations = Vec::with_capacity(mixed_positions.len());
        for &p in &mixed_positions {
            let coefficients = derive_decoding_equations(&lambda, &generator, &noise_positions, p)?;
            if let Some(ints) = &integers {
                rational_guard(ints, &noise_positions, p, params.modulus)?;
            }
            equations.push(DecodingEquation { target: p, sources: noise_positions.clone(), coefficients });
        }
        Ok(OneShotScheme {
            params,
            generator,
            lambda,
            noise_positions,
            mixed_positions,
            equations,
            rotation,
            construction,
            geometrical,
            integers,
        })
    }

    /// Same noise code with the mixed/noise roles shifted: a role at server
    /// `p` moves to server `p - offset (mod N)`. Decoding is re-derived.
    pub fn rotate(&self, offset: usize) -> Result<Self> {
        let n = self.params.servers;
        if offset >= n {
            return param(format!("rotation offset {offset} out of range 0..{n}"));
        }
        if offset == 0 {
            return Ok(self.clone());
        }
        let mut noise: Vec<usize> = self.noise_positions.iter().map(|&p| (p + n - offset) % n).collect();
        noise.sort_unstable();
        let rotated = Self::assemble(
            self.params,
            self.generator.clone(),
            self.lambda.clone(),
            noise,
            (self.rotation + offset) % n,
            self.construction,
            self.geometrical.clone(),
            self.integers.clone(),
        );
        rotated.map_err(|e| match e {
            PirError::NotDecodable { .. } | PirError::InfeasibleParameters(_) => {
                PirError::NotRotatable { offset, reason: format!("{e}") }
            }
            other => other,
        })
    }

    /// The same roles with an all-zero noise code. Not a valid scheme;
    /// used to check that the privacy audits detect missing noise.
    pub fn with_zeroed_noise(&self) -> Self {
        let mut s = self.clone();
        s.lambda = FieldMatrix::zeros(self.lambda.modulus(), self.lambda.rows(), self.lambda.cols());
        for eq in &mut s.equations {
            eq.coefficients.iter_mut().for_each(|c| *c = 0);
        }
        s.integers = None;
        s
    }

    pub fn params(&self) -> &PirParams {
        &self.params
    }

    pub fn modulus(&self) -> FieldModulus {
        self.params.modulus
    }

    pub fn generator(&self) -> &GeneratorSpec {
        &self.generator
    }

    /// `N x f` noise-code coefficients.
    pub fn noise_code(&self) -> &FieldMatrix {
        &self.lambda
    }

    /// Number of free noise vectors.
    pub fn free_vectors(&self) -> usize {
        self.lambda.cols()
    }

    pub fn servers(&self) -> usize {
        self.params.servers
    }

    /// Codimension `r`.
    pub fn codimension(&self) -> usize {
        self.noise_positions.len()
    }

    pub fn noise_positions(&self) -> &[usize] {
        &self.noise_positions
    }

    pub fn mixed_positions(&self) -> &[usize] {
        &self.mixed_positions
    }

    pub fn decoding_equations(&self) -> &[DecodingEquation] {
        &self.equations
    }

    pub fn equation_for(&self, target: usize) -> Option<&DecodingEquation> {
        self.equations.iter().find(|e| e.target == target)
    }

    pub fn rotation(&self) -> usize {
        self.rotation
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn geometrical_spec(&self) -> Option<&GeometricalSpec> {
        self.geometrical.as_ref()
    }

    /// Noise vector at `server` from the free vectors.
    pub fn noise_at(&self, server: usize, free: &[Vec<u32>]) -> Vec<u32> {
        let m = self.modulus();
        let len = free.first().map_or(0, |f| f.len());
        let mut out = vec![0u32; len];
        for (t, f) in free.iter().enumerate() {
            let c = self.lambda.get(server, t);
            if c == 0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(f) {
                *o = m.add(*o, m.mul(c, x));
            }
        }
        out
    }

    fn check_geometrical_closed_form(&self) -> Result<()> {
        let m = self.modulus();
        let spec = self.geometrical.as_ref().expect("geometrical scheme");
        let t = self.params.collusion;
        let l0 = self.codimension();
        let identity_ok = |p: usize, alpha: &[u32]| {
            let lhs = tensor(&self.generator.column(p), self.lambda.row(p), m);
            let mut rhs = vec![0u32; lhs.len()];
            for (&n, &a) in self.noise_positions.iter().zip(alpha) {
                let v = tensor(&self.generator.column(n), self.lambda.row(n), m);
                for (x, y) in rhs.iter_mut().zip(v) {
                    *x = m.add(*x, m.mul(a, y));
                }
            }
            lhs == rhs
        };
        for &l in &self.mixed_positions {
            let mut alpha = vec![0u32; l0];
            for i in 0..t {
                alpha[i] = spec.gamma[i][l - l0];
            }
            for a in alpha.iter_mut().take(l0).skip(t) {
                *a = m.neg(1);
            }
            if !identity_ok(l, &alpha) {
                return Err(PirError::Internal(format!("closed-form decoding equation fails at server {}", l + 1)));
            }
        }
        Ok(())
    }
}

/// Every `T` rows of the noise code are linearly independent.
fn rank_condition(lambda: &FieldMatrix, t: usize) -> Result<()> {
    for rows in combinations(lambda.rows(), t) {
        if lambda.select_rows(&rows).rank() < t {
            let rows: Vec<usize> = rows.iter().map(|r| r + 1).collect();
            return Err(PirError::Validation {
                property: format!("T-privacy: noise-code rows {rows:?} have rank below T={t}"),
            });
        }
    }
    Ok(())
}

fn check_generator(params: &PirParams, generator: &GeneratorSpec) -> Result<()> {
    if generator.servers() != params.servers || generator.dimension() != params.dimension {
        return param(format!(
            "generator is {} x {}, expected {} x {}",
            generator.dimension(),
            generator.servers(),
            params.dimension,
            params.servers
        ));
    }
    if generator.modulus() != params.modulus {
        return param("generator modulus differs from parameters");
    }
    Ok(())
}

fn tensor(g: &[u32], l: &[u32], m: FieldModulus) -> Vec<u32> {
    let mut out = Vec::with_capacity(g.len() * l.len());
    for &a in g {
        for &b in l {
            out.push(m.mul(a, b));
        }
    }
    out
}

/// Solves `g_p (x) lambda_p = sum_j alpha_j g_{n_j} (x) lambda_{n_j}` for `alpha`.
pub fn derive_decoding_equations(
    lambda: &FieldMatrix,
    generator: &GeneratorSpec,
    noise_positions: &[usize],
    target: usize,
) -> Result<Vec<u32>> {
    if noise_positions.contains(&target) {
        return param(format!("server {} is a noise position", target + 1));
    }
    let m = lambda.modulus();
    let k = generator.dimension();
    let f = lambda.cols();
    let mut system = FieldMatrix::zeros(m, k * f, noise_positions.len());
    for (j, &n) in noise_positions.iter().enumerate() {
        let v = tensor(&generator.column(n), lambda.row(n), m);
        for (e, x) in v.into_iter().enumerate() {
            system.set(e, j, x);
        }
    }
    let rhs = tensor(&generator.column(target), lambda.row(target), m);
    system.solve(&rhs).ok_or(PirError::NotDecodable { server: target + 1 })
}

/// Rejects a characteristic in which the rational decoding coefficients
/// of an integer scheme degenerate.
fn rational_guard(ints: &IntegerData, noise: &[usize], target: usize, modulus: FieldModulus) -> Result<()> {
    let k = ints.generator.len();
    let f = ints.lambda.first().map_or(0, |r| r.len());
    let big = |v: i64| BigRational::from_integer(BigInt::from(v));
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(k * f);
    for kk in 0..k {
        for t in 0..f {
            let mut row: Vec<BigRational> =
                noise.iter().map(|&n| big(ints.generator[kk][n] * ints.lambda[n][t])).collect();
            row.push(big(ints.generator[kk][target] * ints.lambda[target][t]));
            rows.push(row);
        }
    }
    let Some(alpha) = rational_solve(rows, noise.len()) else {
        return Ok(());
    };
    let q = BigInt::from(modulus.q());
    for a in &alpha {
        let num = a.numer();
        let den = a.denom();
        if (den % &q).is_zero() || (!num.is_zero() && (num % &q).is_zero()) {
            return Err(PirError::InfeasibleParameters(format!(
                "decoding coefficient {a} at server {} is incompatible with characteristic {}",
                target + 1,
                modulus.q()
            )));
        }
    }
    Ok(())
}

fn rational_solve(mut rows: Vec<Vec<BigRational>>, unknowns: usize) -> Option<Vec<BigRational>> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..unknowns {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(p, rank);
        let inv = rows[rank][c].recip();
        for x in rows[rank].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let factor = rows[r][c].clone();
                for cc in 0..=unknowns {
                    let v = &rows[rank][cc] * &factor;
                    rows[r][cc] -= v;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    if rows[rank..].iter().any(|r| !r[unknowns].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); unknowns];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = rows[r][unknowns].clone();
    }
    Some(x)
}

/// `[I_T; C]` with every `T` rows independent. Rows of `C` are chosen
/// greedily in lexicographic order over `{1..q-1}^T`; a systematic
/// Reed-Solomon code is the fallback.
pub fn systematic_noise_code(n: usize, t: usize, m: FieldModulus) -> Result<FieldMatrix> {
    if t == 0 || t > n {
        return param(format!("need 1 <= T <= N, got T={t} N={n}"));
    }
    if let Some(rows) = greedy_code(n, t, m) {
        return FieldMatrix::from_residue_rows(m, &rows);
    }
    if n as u64 > m.q() as u64 + 1 {
        return Err(PirError::InfeasibleParameters(format!(
            "no ({n},{t}) MDS noise code over F_{}: needs N <= q + 1",
            m.q()
        )));
    }
    let rs = GeneratorSpec::vandermonde(n, t, m)?.matrix().transpose();
    let top: Vec<usize> = (0..t).collect();
    let inv = rs
        .select_rows(&top)
        .inverse()
        .ok_or_else(|| PirError::Internal("Reed-Solomon block is singular".into()))?;
    rs.mul(&inv)
}

fn greedy_code(n: usize, t: usize, m: FieldModulus) -> Option<Vec<Vec<u32>>> {
    let mut rows: Vec<Vec<u32>> = (0..t).map(|i| (0..t).map(|j| (i == j) as u32).collect()).collect();
    let q = m.q();
    let total = (q as u64 - 1).checked_pow(t as u32)?;
    if total > 1 << 20 {
        return None;
    }
    while rows.len() < n {
        let mut found = None;
        for idx in 0..total {
            let mut cand = vec![0u32; t];
            let mut x = idx;
            for c in (0..t).rev() {
                cand[c] = (x % (q as u64 - 1)) as u32 + 1;
                x /= q as u64 - 1;
            }
            let ok = combinations(rows.len(), t - 1).into_iter().all(|subset| {
                let mut mat: Vec<Vec<u32>> = subset.iter().map(|&i| rows[i].clone()).collect();
                mat.push(cand.clone());
                FieldMatrix::from_residue_rows(m, &mat).map(|a| a.rank() == t).unwrap_or(false)
            });
            if ok {
                found = Some(cand);
                break;
            }
        }
        rows.push(found?);
    }
    Some(rows)
}

/// `(N - r) / N`.
pub fn oneshot_rate(s: &OneShotScheme) -> BigRational {
    let n = s.servers() as i64;
    BigRational::new(BigInt::from(n - s.codimension() as i64), BigInt::from(n))
}

/// Checks the noise-code rank condition, every decoding identity on
/// `trials` random databases and free vectors, and that every identity
/// extracts the informative part of a mixed query.
pub fn verify_oneshot<R: Rng + ?Sized>(s: &OneShotScheme, trials: usize, rng: &mut R) -> Result<()> {
    rank_condition(&s.lambda, s.params.collusion)?;
    let m = s.modulus();
    let q = m.q();
    let n = s.servers();
    let k = s.generator.dimension();
    let messages = s.params.messages.max(1);
    for eq in &s.equations {
        if eq.sources != s.noise_positions {
            return Err(PirError::Internal("decoding equation sources differ from noise positions".into()));
        }
    }
    for _ in 0..trials {
        let width = rng.random_range(1..=2usize);
        let msgs: Vec<FieldVector> = (0..messages)
            .map(|_| FieldVector::new(m, (0..k * width).map(|_| rng.random_range(0..q)).collect()))
            .collect();
        let db = Database::encode(msgs, &s.generator)?;
        let dim = messages * width;
        let free: Vec<Vec<u32>> =
            (0..s.free_vectors()).map(|_| (0..dim).map(|_| rng.random_range(0..q)).collect()).collect();
        let responses: Vec<u32> = (0..n).map(|i| m.dot(db.server_block(i).as_slice(), &s.noise_at(i, &free))).collect();
        for eq in &s.equations {
            let predicted = eq
                .sources
                .iter()
                .zip(&eq.coefficients)
                .fold(0, |acc, (&src, &c)| m.add(acc, m.mul(c, responses[src])));
            if predicted != responses[eq.target] {
                return Err(PirError::Validation {
                    property: format!("decoding identity fails at server {}", eq.target + 1),
                });
            }
        }
    }
    Ok(())
}

/// Smallest prime `q >= max(N, 3)` for which the construction exists, all
/// `N` rotations are decodable and explicit coefficients survive reduction.
pub fn default_modulus(
    construction: Construction,
    servers: usize,
    dimension: usize,
    collusion: usize,
    explicit: Option<(&[Vec<i64>], &[Vec<i64>], &[usize])>,
) -> Result<FieldModulus> {
    let mut q = next_prime((servers.max(3)) as u32);
    while q < 1 << 16 {
        debug_assert!(is_prime(q));
        let m = FieldModulus::new(q)?;
        let built = match construction {
            Construction::SecretSharing => OneShotScheme::secret_sharing(servers, collusion, 2, m),
            Construction::Geometrical => GeneratorSpec::vandermonde(servers, dimension, m).and_then(|g| {
                let p = PirParams::new(servers, dimension, collusion, 2, q)?;
                OneShotScheme::geometrical(p, g)
            }),
            Construction::Explicit => {
                let Some((g, l, mixed)) = explicit else {
                    return param("explicit construction needs generator and noise-code rows");
                };
                PirParams::new(servers, dimension, collusion, 2, q)
                    .and_then(|p| OneShotScheme::explicit(p, g, l, mixed))
            }
        };
        match built {
            Ok(s) => {
                if (0..servers).all(|t| s.rotate(t).is_ok()) {
                    return Ok(m);
                }
            }
            Err(PirError::Parameter(e)) => return Err(PirError::Parameter(e)),
            Err(PirError::ConstructionUnsupported { .. }) | Err(_) => {}
        }
        q = next_prime(q + 1);
    }
    Err(PirError::InfeasibleParameters(format!(
        "no prime below 2^16 supports the {} construction for N={servers} K={dimension} T={collusion}",
        construction.name()
    )))
}

/// Decoding coefficients as small signed integers, for display.
pub fn centered_coefficients(s: &OneShotScheme, eq: &DecodingEquation) -> Vec<i64> {
    eq.coefficients.iter().map(|&c| s.modulus().centered(c)).collect()
}

/// Human-readable decoding equation with 1-based server numbers.
pub fn describe_equation(s: &OneShotScheme, eq: &DecodingEquation) -> String {
    let mut out = format!("<D_{},q_{}> =", eq.target + 1, eq.target + 1);
    for (&src, c) in eq.sources.iter().zip(centered_coefficients(s, eq)) {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 { '-' } else { '+' };
        out.push_str(&format!(" {sign} {}<D_{},q_{}>", c.abs(), src + 1, src + 1));
    }
    out
}
