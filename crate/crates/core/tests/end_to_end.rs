use oneshot_pir::field::FieldModulus;
use oneshot_pir::lifted::LiftedScheme;
use oneshot_pir::protocol::{answer_batch, decode, instantiate, NoiseSampler, OneShotRun, QueryProtocol};
use oneshot_pir::rng::substream;
use oneshot_pir::{Database, FieldVector, GeneratorSpec, OneShotScheme, PirParams};
use rand::Rng;

fn f(q: u32) -> FieldModulus {
    FieldModulus::new(q).unwrap()
}

fn check<P: QueryProtocol>(p: &P, trials: u64, seed: u64) {
    let g = p.generator().clone();
    let q = g.modulus().q();
    for trial in 0..trials {
        let mut rng = substream(seed, &[trial]);
        let msgs = (0..p.message_count())
            .map(|_| FieldVector::new(g.modulus(), (0..p.message_len()).map(|_| rng.random_range(0..q)).collect()))
            .collect();
        let db = Database::encode(msgs, &g).unwrap();
        let desired = rng.random_range(0..p.message_count());
        let (batch, state) = instantiate(p, desired, NoiseSampler::Uniform, &mut rng).unwrap();
        let responses = answer_batch(&db, &batch).unwrap();
        assert_eq!(&decode(&g, &state, &responses).unwrap(), db.message(desired).unwrap(), "trial {trial}");
    }
}

#[test]
fn oneshot_runs_recover_messages() {
    let otp = OneShotScheme::secret_sharing(2, 1, 2, f(2)).unwrap();
    check(&OneShotRun::new(&otp, 2, 1).unwrap(), 100, 1);
    let ss = OneShotScheme::secret_sharing(5, 2, 3, f(5)).unwrap();
    check(&OneShotRun::new(&ss, 3, 6).unwrap(), 100, 2);
    let coded = OneShotScheme::explicit(
        PirParams::new(4, 2, 2, 3, 3).unwrap(),
        &[vec![1, 0, 1, 1], vec![0, 1, 1, 2]],
        &[vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2]],
        &[3],
    )
    .unwrap();
    check(&OneShotRun::new(&coded, 3, 2).unwrap(), 100, 3);
}

#[test]
fn lifted_schemes_recover_messages() {
    let configs: Vec<(OneShotScheme, usize)> = vec![
        (OneShotScheme::secret_sharing(2, 1, 2, f(3)).unwrap(), 2),
        (OneShotScheme::secret_sharing(4, 2, 2, f(3)).unwrap(), 2),
        (OneShotScheme::secret_sharing(4, 2, 3, f(5)).unwrap(), 3),
        (OneShotScheme::secret_sharing(3, 1, 4, f(5)).unwrap(), 4),
        (
            OneShotScheme::geometrical(PirParams::new(4, 2, 2, 2, 3).unwrap(), GeneratorSpec::vandermonde(4, 2, f(3)).unwrap())
                .unwrap(),
            2,
        ),
        (
            OneShotScheme::geometrical(PirParams::new(6, 2, 1, 3, 7).unwrap(), GeneratorSpec::vandermonde(6, 2, f(7)).unwrap())
                .unwrap(),
            3,
        ),
    ];
    for (i, (s, m)) in configs.iter().enumerate() {
        check(&LiftedScheme::new(s, *m).unwrap(), 25, 100 + i as u64);
    }
}
