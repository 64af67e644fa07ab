//! Brute-force oracles checked against the library.

use oneshot_pir::field::FieldModulus;
use oneshot_pir::linalg::combinations;
use oneshot_pir::oneshot::{derive_decoding_equations, OneShotScheme};
use oneshot_pir::symbolic::{build_symbolic, count_value, informative_queries, total_queries};
use oneshot_pir::{decode_from_subset, Database, FieldVector, GeneratorSpec, PirParams};

fn f(q: u32) -> FieldModulus {
    FieldModulus::new(q).unwrap()
}

/// Every vector of `F_q^len`.
fn all_vectors(q: u32, len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|v| (0..q).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

fn coded_422(q: u32) -> OneShotScheme {
    OneShotScheme::explicit(
        PirParams::new(4, 2, 2, 2, q).unwrap(),
        &[vec![1, 0, 1, 1], vec![0, 1, 1, 2]],
        &[vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2]],
        &[3],
    )
    .unwrap()
}

/// Responses `<D_i, sum_t lambda[i][t] f_t>` for one database and free draw.
fn noise_responses(s: &OneShotScheme, db: &Database, free: &[Vec<u32>]) -> Vec<u32> {
    let m = s.modulus();
    (0..s.servers()).map(|i| m.dot(db.server_block(i).as_slice(), &s.noise_at(i, free))).collect()
}

#[test]
fn field_inverse_by_search() {
    for q in [2, 3, 5, 7, 11, 13] {
        let m = f(q);
        for x in 1..q {
            let brute = (1..q).find(|&y| (x * y) % q == 1).unwrap();
            assert_eq!(m.inv(x).unwrap(), brute);
        }
    }
}

#[test]
fn mds_round_trip_every_subset() {
    let m = f(7);
    for (n, k) in [(4, 2), (5, 3), (6, 1), (7, 4)] {
        let g = GeneratorSpec::vandermonde(n, k, m).unwrap();
        for w in all_vectors(7, k).into_iter().step_by(17) {
            let db = Database::encode(vec![FieldVector::new(m, w.clone())], &g).unwrap();
            for subset in combinations(n, k) {
                let shares: Vec<_> = subset.iter().map(|&i| (i, db.share(i, 0))).collect();
                assert_eq!(decode_from_subset(&shares, &g).unwrap().as_slice(), &w[..]);
            }
        }
    }
}

#[test]
fn mds_check_agrees_with_decoding() {
    // Accepted generators decode from every subset, rejected ones fail on some.
    let m = f(3);
    let candidates: Vec<Vec<Vec<i64>>> = all_vectors(3, 6)
        .into_iter()
        .map(|v| vec![v[..3].iter().map(|&x| x as i64).collect(), v[3..].iter().map(|&x| x as i64).collect()])
        .collect();
    for rows in candidates {
        let ok = GeneratorSpec::from_rows(m, &rows).is_ok();
        let brute = combinations(3, 2).into_iter().all(|c| {
            let det = rows[0][c[0]] * rows[1][c[1]] - rows[0][c[1]] * rows[1][c[0]];
            det.rem_euclid(3) != 0
        });
        assert_eq!(ok, brute, "{rows:?}");
    }
}

#[test]
fn decoding_equations_by_exhaustive_search() {
    // Search all coefficient vectors in F_3^r and keep those satisfying the
    // identity on every database (M = 2, L/K = 1) and every free draw.
    let cases = [coded_422(3), OneShotScheme::secret_sharing(4, 2, 2, f(3)).unwrap()];
    for s in &cases {
        let m = s.modulus();
        let k = s.generator().dimension();
        let dbs: Vec<Database> = all_vectors(3, 2 * k)
            .into_iter()
            .map(|w| {
                let msgs = vec![FieldVector::new(m, w[..k].to_vec()), FieldVector::new(m, w[k..].to_vec())];
                Database::encode(msgs, s.generator()).unwrap()
            })
            .collect();
        let draws: Vec<Vec<Vec<u32>>> = all_vectors(3, 2 * s.free_vectors())
            .into_iter()
            .map(|v| v.chunks(2).map(|c| c.to_vec()).collect())
            .collect();
        for eq in s.decoding_equations() {
            let valid: Vec<Vec<u32>> = all_vectors(3, eq.sources.len())
                .into_iter()
                .filter(|alpha| {
                    dbs.iter().all(|db| {
                        draws.iter().all(|free| {
                            let resp = noise_responses(s, db, free);
                            let rhs = eq.sources.iter().zip(alpha).fold(0, |a, (&src, &c)| m.add(a, m.mul(c, resp[src])));
                            rhs == resp[eq.target]
                        })
                    })
                })
                .collect();
            assert!(valid.contains(&eq.coefficients), "derived {:?} not among {valid:?}", eq.coefficients);
        }
    }
}

#[test]
fn coded_coefficients_over_f5() {
    // (-1, 2, 2) at server 4 and, with the mixed slot at server 3, (1/2, -1, 1/2).
    let s = coded_422(5);
    let m = f(5);
    let eq = derive_decoding_equations(s.noise_code(), s.generator(), &[0, 1, 2], 3).unwrap();
    assert_eq!(eq, vec![m.reduce(-1), 2, 2]);
    let eq = derive_decoding_equations(s.noise_code(), s.generator(), &[0, 1, 3], 2).unwrap();
    assert_eq!(eq, vec![3, 4, 3]);
}

#[test]
fn counts_match_closed_forms() {
    for n in 2..=6 {
        for r in 1..n {
            for m in 2..=6 {
                let s = build_symbolic(n, r, m).unwrap();
                let mut slots = 0u128;
                let mut informative = 0u128;
                for k in 1..=m {
                    let c = s.entries().iter().flatten().filter(|&&v| v as usize == k).count() as u128;
                    assert_eq!(c, (r as u128).pow((m - k) as u32) * ((n - r) as u128).pow(k as u32 - 1));
                    assert_eq!(count_value(&s, k).unwrap(), c);
                    slots += c * binom(m, k);
                    informative += c * binom(m - 1, k - 1);
                }
                assert_eq!(slots * (n - r) as u128, (n as u128).pow(m as u32) - (r as u128).pow(m as u32));
                assert_eq!(informative, (n as u128).pow(m as u32 - 1));
                assert_eq!(total_queries(n, r, m).unwrap(), slots);
                assert_eq!(informative_queries(n, r, m).unwrap(), informative);
            }
        }
    }
}

fn binom(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}
