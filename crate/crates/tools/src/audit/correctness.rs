use oneshot_pir::protocol::{answer_batch, decode, instantiate, NoiseSampler, QueryProtocol};
use oneshot_pir::rng::{label, substream};
use oneshot_pir::{Database, FieldVector, Result};
use rand::Rng;
use rayon::prelude::*;

/// Deliberate fault injected after the servers answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Corruption {
    #[default]
    None,
    /// Adds one to the first informative response.
    FlipResponse,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: usize,
    pub seed: u64,
    pub desired: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectnessReport {
    pub trials: usize,
    pub failures: Vec<Counterexample>,
}

impl CorrectnessReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random messages of the protocol's shape, encoded for storage.
pub fn random_db<P: QueryProtocol + ?Sized, R: Rng>(p: &P, rng: &mut R) -> Result<Database> {
    let m = p.modulus();
    let messages = (0..p.message_count())
        .map(|_| FieldVector::new(m, (0..p.message_len()).map(|_| rng.random_range(0..m.q())).collect()))
        .collect();
    Database::encode(messages, p.generator())
}

fn trial<P: QueryProtocol + Sync + ?Sized>(p: &P, seed: u64, t: usize, corrupt: Corruption) -> Result<Option<Counterexample>> {
    let mut rng = substream(seed, &[label("correctness"), t as u64]);
    let db = random_db(p, &mut rng)?;
    let desired = rng.random_range(0..p.message_count());
    let (batch, state) = instantiate(p, desired, NoiseSampler::Uniform, &mut rng)?;
    let mut responses = answer_batch(&db, &batch)?;
    if corrupt == Corruption::FlipResponse {
        if let Some(s) = state.slots.first() {
            let v = responses.get(s.server, s.index).unwrap_or(0);
            responses.set(s.server, s.index, p.modulus().add(v, 1));
        }
    }
    let fail = |reason: String| Some(Counterexample { trial: t, seed, desired, reason });
    Ok(match decode(p.generator(), &state, &responses) {
        Ok(w) if &w == db.message(desired).expect("desired in range") => None,
        Ok(_) => fail("decoded message differs from the stored one".into()),
        Err(e) => fail(e.to_string()),
    })
}

/// Runs `trials` seeded round trips with random databases and desired
/// indices; every trial must recover the desired message exactly.
pub fn correctness_suite<P: QueryProtocol + Sync + ?Sized>(
    p: &P,
    trials: usize,
    seed: u64,
    corrupt: Corruption,
) -> Result<CorrectnessReport> {
    let outcomes: Vec<Option<Counterexample>> =
        (0..trials).into_par_iter().map(|t| trial(p, seed, t, corrupt)).collect::<Result<_>>()?;
    Ok(CorrectnessReport { trials, failures: outcomes.into_iter().flatten().collect() })
}
