//! Query generation, server answers and decoding, shared by every scheme.
//!
//! A scheme describes the randomness it consumes ([`RandomnessLayout`]) and
//! turns a concrete draw into transmitted queries plus the client's private
//! decoding state. Keeping the draw explicit lets audits enumerate it.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use rand::Rng;

use crate::error::{param, PirError, Result};
use crate::field::{FieldModulus, FieldVector};
use crate::linalg::{rank_of, FieldMatrix};
use crate::mds::{Database, GeneratorSpec};
use crate::oneshot::OneShotScheme;

/// Resampling budget for rank conditions.
pub const RETRY_BUDGET: usize = 64;

/// Distribution of noise coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseSampler {
    #[default]
    Uniform,
    /// Entries drawn from `{0, 1}` only. Breaks privacy; a negative control.
    Binary,
}

impl NoiseSampler {
    fn draw<R: Rng + ?Sized>(self, q: u32, rng: &mut R) -> u32 {
        match self {
            NoiseSampler::Uniform => rng.random_range(0..q),
            NoiseSampler::Binary => rng.random_range(0..2),
        }
    }
}

/// `count` vectors of length `dim`; when `independent`, the draw is
/// conditioned on the vectors being linearly independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyShape {
    pub count: usize,
    pub dim: usize,
    pub independent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomnessLayout {
    /// Server of each informative vector, in consumption order.
    pub informative_columns: Vec<usize>,
    /// Length of each informative vector (`L / K`).
    pub informative_dim: usize,
    pub noise: Vec<FamilyShape>,
}

impl RandomnessLayout {
    /// Total number of field coordinates in one draw.
    pub fn coordinates(&self) -> usize {
        self.informative_columns.len() * self.informative_dim
            + self.noise.iter().map(|f| f.count * f.dim).sum::<usize>()
    }
}

/// One draw of all randomness a query batch needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryRandomness {
    pub informative: Vec<Vec<u32>>,
    pub noise: Vec<Vec<Vec<u32>>>,
}

/// Transmitted vectors, per server, in sending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryBatch {
    queries: Vec<Vec<FieldVector>>,
}

impl QueryBatch {
    pub fn new(queries: Vec<Vec<FieldVector>>) -> Self {
        QueryBatch { queries }
    }

    pub fn servers(&self) -> usize {
        self.queries.len()
    }

    pub fn server(&self, i: usize) -> &[FieldVector] {
        &self.queries[i]
    }

    pub fn per_server_counts(&self) -> Vec<usize> {
        self.queries.iter().map(|q| q.len()).collect()
    }

    pub fn total(&self) -> usize {
        self.queries.iter().map(|q| q.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseBatch {
    responses: Vec<Vec<u32>>,
}

impl ResponseBatch {
    pub fn new(responses: Vec<Vec<u32>>) -> Self {
        ResponseBatch { responses }
    }

    pub fn server(&self, i: usize) -> &[u32] {
        &self.responses[i]
    }

    pub fn get(&self, server: usize, index: usize) -> Option<u32> {
        self.responses.get(server).and_then(|r| r.get(index)).copied()
    }

    /// Replaces one response; used to inject faults.
    pub fn set(&mut self, server: usize, index: usize, value: u32) {
        self.responses[server][index] = value;
    }
}

/// Client-side record for one response that carries an informative part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformativeSlot {
    pub server: usize,
    pub index: usize,
    /// Informative vector placed in the desired message's block.
    pub vector: Vec<u32>,
    /// `(server, index, coefficient)` terms predicting the noise response.
    pub cancel: Vec<(usize, usize, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodingState {
    pub desired: usize,
    pub message_len: usize,
    pub slots: Vec<InformativeSlot>,
}

pub trait QueryProtocol {
    fn generator(&self) -> &GeneratorSpec;
    fn message_count(&self) -> usize;
    /// `L`.
    fn message_len(&self) -> usize;
    fn layout(&self, desired: usize) -> Result<RandomnessLayout>;
    fn assemble(&self, desired: usize, randomness: &QueryRandomness) -> Result<(QueryBatch, DecodingState)>;

    fn modulus(&self) -> FieldModulus {
        self.generator().modulus()
    }

    fn servers(&self) -> usize {
        self.generator().servers()
    }
}

fn check_desired<P: QueryProtocol + ?Sized>(p: &P, desired: usize) -> Result<()> {
    if desired >= p.message_count() {
        return param(format!("desired message {desired} out of range 0..{}", p.message_count()));
    }
    Ok(())
}

fn informative_rank(generator: &GeneratorSpec, columns: &[usize], vectors: &[Vec<u32>]) -> usize {
    let rows: Vec<Vec<u32>> = columns.iter().zip(vectors).map(|(&c, a)| generator.functional(c, a)).collect();
    rank_of(generator.modulus(), &rows)
}

/// Whether a draw lies in the support of the sampler.
pub fn accepts<P: QueryProtocol + ?Sized>(p: &P, layout: &RandomnessLayout, r: &QueryRandomness) -> bool {
    if informative_rank(p.generator(), &layout.informative_columns, &r.informative) != p.message_len() {
        return false;
    }
    layout
        .noise
        .iter()
        .zip(&r.noise)
        .all(|(shape, fam)| !shape.independent || rank_of(p.modulus(), fam) == shape.count)
}

/// Draws randomness for `layout`.
pub fn sample_randomness<P: QueryProtocol + ?Sized, R: Rng + ?Sized>(
    p: &P,
    layout: &RandomnessLayout,
    sampler: NoiseSampler,
    rng: &mut R,
) -> Result<QueryRandomness> {
    let q = p.modulus().q();
    let mut informative = None;
    for _ in 0..RETRY_BUDGET {
        let draw: Vec<Vec<u32>> = layout
            .informative_columns
            .iter()
            .map(|_| (0..layout.informative_dim).map(|_| rng.random_range(0..q)).collect())
            .collect();
        if informative_rank(p.generator(), &layout.informative_columns, &draw) == p.message_len() {
            informative = Some(draw);
            break;
        }
    }
    let informative = informative.ok_or_else(|| PirError::RetryExhausted {
        what: "informative vectors of full rank".into(),
        attempts: RETRY_BUDGET,
    })?;
    let mut noise = Vec::with_capacity(layout.noise.len());
    for shape in &layout.noise {
        let mut family = None;
        for _ in 0..RETRY_BUDGET {
            let draw: Vec<Vec<u32>> =
                (0..shape.count).map(|_| (0..shape.dim).map(|_| sampler.draw(q, rng)).collect()).collect();
            if !shape.independent || rank_of(p.modulus(), &draw) == shape.count {
                family = Some(draw);
                break;
            }
        }
        noise.push(family.ok_or_else(|| PirError::RetryExhausted {
            what: "linearly independent noise family".into(),
            attempts: RETRY_BUDGET,
        })?);
    }
    Ok(QueryRandomness { informative, noise })
}

/// Samples and assembles a query batch for message `desired`.
pub fn instantiate<P: QueryProtocol + ?Sized, R: Rng + ?Sized>(
    p: &P,
    desired: usize,
    sampler: NoiseSampler,
    rng: &mut R,
) -> Result<(QueryBatch, DecodingState)> {
    check_desired(p, desired)?;
    let layout = p.layout(desired)?;
    let r = sample_randomness(p, &layout, sampler, rng)?;
    p.assemble(desired, &r)
}

/// Each server answers every query with `<D_i, q>`.
pub fn answer_batch(db: &Database, batch: &QueryBatch) -> Result<ResponseBatch> {
    if batch.servers() != db.generator().servers() {
        return param(format!("batch addresses {} servers, database has {}", batch.servers(), db.generator().servers()));
    }
    let m = db.generator().modulus();
    let mut responses = Vec::with_capacity(batch.servers());
    for i in 0..batch.servers() {
        let d = db.server_block(i);
        let mut out = Vec::with_capacity(batch.server(i).len());
        for q in batch.server(i) {
            if q.len() != d.len() {
                return param(format!("query of length {} sent to server {} holding {} symbols", q.len(), i + 1, d.len()));
            }
            out.push(m.dot(d.as_slice(), q.as_slice()));
        }
        responses.push(out);
    }
    Ok(ResponseBatch::new(responses))
}

/// Cancels noise from every informative response and solves for `W^m`.
pub fn decode(generator: &GeneratorSpec, state: &DecodingState, responses: &ResponseBatch) -> Result<FieldVector> {
    let m = generator.modulus();
    let l = state.message_len;
    let missing = |s: usize, i: usize| PirError::Parameter(format!("missing response {i} from server {}", s + 1));
    let mut rows = Vec::with_capacity(state.slots.len());
    let mut rhs = Vec::with_capacity(state.slots.len());
    for slot in &state.slots {
        let mut v = responses.get(slot.server, slot.index).ok_or_else(|| missing(slot.server, slot.index))?;
        for &(s, i, c) in &slot.cancel {
            let noise = responses.get(s, i).ok_or_else(|| missing(s, i))?;
            v = m.sub(v, m.mul(c, noise));
        }
        rows.push(generator.functional(slot.server, &slot.vector));
        rhs.push(v);
    }
    let system = FieldMatrix::from_residue_rows(m, &rows)?;
    if system.cols() != l || system.rank() != l {
        return Err(PirError::Internal(format!(
            "informative functionals have rank {} < L = {l}",
            system.rank()
        )));
    }
    let w = system
        .solve(&rhs)
        .ok_or_else(|| PirError::Internal("responses are inconsistent with the informative functionals".into()))?;
    Ok(FieldVector::new(m, w))
}

/// Instantiates, answers and decodes in one call.
pub fn run_protocol<P: QueryProtocol + ?Sized, R: Rng + ?Sized>(
    p: &P,
    db: &Database,
    desired: usize,
    sampler: NoiseSampler,
    rng: &mut R,
) -> Result<FieldVector> {
    let (batch, state) = instantiate(p, desired, sampler, rng)?;
    let responses = answer_batch(db, &batch)?;
    decode(p.generator(), &state, &responses)
}

/// A one-shot scheme repeated over rotated rounds until `L` independent
/// symbols of the desired message are collected.
#[derive(Debug, Clone)]
pub struct OneShotRun {
    rounds: Vec<OneShotScheme>,
    messages: usize,
    message_len: usize,
}

impl OneShotRun {
    /// `lcm(N - r, L) / (N - r)` rounds; round `i` uses rotation `i mod N`.
    pub fn new(scheme: &OneShotScheme, messages: usize, message_len: usize) -> Result<Self> {
        let k = scheme.generator().dimension();
        if message_len == 0 || message_len % k != 0 {
            return Err(PirError::InfeasibleParameters(format!(
                "message length {message_len} is not a positive multiple of K={k}"
            )));
        }
        if messages == 0 {
            return param("need at least one message");
        }
        let n = scheme.servers();
        let per_round = n - scheme.codimension();
        let count = per_round.lcm(&message_len) / per_round;
        let rotations: Vec<OneShotScheme> = (0..n.min(count)).map(|t| scheme.rotate(t)).collect::<Result<_>>()?;
        let rounds = (0..count).map(|i| rotations[i % n].clone()).collect();
        Ok(OneShotRun { rounds, messages, message_len })
    }

    pub fn rounds(&self) -> usize {
        self.rounds.len()
    }

    fn share_len(&self) -> usize {
        self.message_len / self.rounds[0].generator().dimension()
    }
}

impl QueryProtocol for OneShotRun {
    fn generator(&self) -> &GeneratorSpec {
        self.rounds[0].generator()
    }

    fn message_count(&self) -> usize {
        self.messages
    }

    fn message_len(&self) -> usize {
        self.message_len
    }

    fn layout(&self, desired: usize) -> Result<RandomnessLayout> {
        check_desired(self, desired)?;
        let w = self.share_len();
        let informative_columns = self.rounds.iter().flat_map(|s| s.mixed_positions().iter().copied()).collect();
        let noise = self
            .rounds
            .iter()
            .map(|s| FamilyShape { count: s.free_vectors(), dim: self.messages * w, independent: false })
            .collect();
        Ok(RandomnessLayout { informative_columns, informative_dim: w, noise })
    }

    fn assemble(&self, desired: usize, r: &QueryRandomness) -> Result<(QueryBatch, DecodingState)> {
        check_desired(self, desired)?;
        let m = self.modulus();
        let n = self.servers();
        let w = self.share_len();
        let mut queries = vec![Vec::with_capacity(self.rounds.len()); n];
        let mut slots = Vec::new();
        let mut next = r.informative.iter();
        for (round, s) in self.rounds.iter().enumerate() {
            let free = &r.noise[round];
            for (p, out) in queries.iter_mut().enumerate() {
                let mut v = s.noise_at(p, free);
                if let Some(eq) = s.equation_for(p) {
                    let a = next.next().ok_or_else(|| PirError::Internal("too few informative vectors".into()))?;
                    for (x, &y) in v[desired * w..(desired + 1) * w].iter_mut().zip(a) {
                        *x = m.add(*x, y);
                    }
                    let cancel = eq.sources.iter().zip(&eq.coefficients).map(|(&src, &c)| (src, round, c)).collect();
                    slots.push(InformativeSlot { server: p, index: round, vector: a.clone(), cancel });
                }
                out.push(FieldVector::new(m, v));
            }
        }
        let state = DecodingState { desired, message_len: self.message_len, slots };
        Ok((QueryBatch::new(queries), state))
    }
}
