use oneshot_pir::protocol::{NoiseSampler, QueryProtocol};
use oneshot_pir::PirError;
use oneshot_pir_tools::audit::{
    correctness_suite, enumerate_query_distribution, privacy_exact_check, privacy_statistical_check, Corruption,
    StatConfig, Status,
};
use oneshot_pir_tools::{Pipeline, SchemeConfig};

fn pipeline(toml: &str) -> Pipeline {
    SchemeConfig::from_toml(toml).unwrap().build_pipeline().unwrap()
}

fn one_time_pad() -> Pipeline {
    pipeline("kind = \"secret_sharing\"\nmode = \"oneshot\"\nN = 2\nT = 1\nM = 2\nq = 2\nmessage_len = 1\n")
}

fn refined_f3() -> Pipeline {
    pipeline("kind = \"secret_sharing\"\nN = 2\nT = 1\nM = 2\nq = 3\n")
}

#[test]
fn one_time_pad_second_server_sees_uniform_vectors() {
    let p = one_time_pad();
    for m in 0..2 {
        let t = enumerate_query_distribution(&p, &[1], m).unwrap();
        assert_eq!(t.total, 4);
        assert_eq!(t.counts.len(), 4);
        assert!(t.counts.values().all(|&c| c == 1));
        assert_eq!(t.counts.values().sum::<u64>(), t.total);
    }
}

#[test]
fn refined_enumeration_sizes() {
    let p = refined_f3();
    assert_eq!(p.layout(0).unwrap().coordinates(), 6);
    let a = enumerate_query_distribution(&p, &[0], 0).unwrap();
    let b = enumerate_query_distribution(&p, &[0], 1).unwrap();
    assert_eq!(a.total, 384);
    assert_eq!(a, b);
}

#[test]
fn enumeration_refuses_large_spaces() {
    let p = pipeline("kind = \"secret_sharing\"\nN = 4\nT = 2\nM = 3\nq = 5\n");
    assert!(matches!(enumerate_query_distribution(&p, &[0, 1], 0), Err(PirError::InfeasibleParameters(_))));
}

#[test]
fn zeroed_noise_names_subset_and_witness() {
    let p = one_time_pad().with_zeroed_noise().unwrap();
    let r = privacy_exact_check(&p, 1, (0, 1)).unwrap();
    assert_eq!(r.status(), Status::Fail);
    let fail = r.failures().next().unwrap();
    assert!(fail.scope.contains("J={2}"));
    assert!(fail.detail.starts_with("witness"));
}

#[test]
fn corrupted_response_is_caught() {
    let p = refined_f3();
    assert!(correctness_suite(&p, 20, 1, Corruption::None).unwrap().passed());
    let r = correctness_suite(&p, 20, 1, Corruption::FlipResponse).unwrap();
    assert_eq!(r.failures.len(), 20);
    assert_eq!(r.failures[0].seed, 1);
}

#[test]
fn correctness_is_deterministic() {
    let p = pipeline("kind = \"geometrical\"\nN = 4\nK = 2\nT = 2\nM = 2\nq = 3\n");
    let a = correctness_suite(&p, 10, 9, Corruption::FlipResponse).unwrap();
    let b = correctness_suite(&p, 10, 9, Corruption::FlipResponse).unwrap();
    assert_eq!(a, b);
}

#[test]
fn statistical_width_zero_is_inconclusive() {
    let p = refined_f3();
    let cfg = StatConfig { trials: 10_000, width: 0, ..StatConfig::default() };
    let r = privacy_statistical_check(&p, 1, &p.slot_supports(), &cfg).unwrap();
    assert_eq!(r.status(), Status::Inconclusive);
    assert!(r.passed());
}

#[test]
fn statistical_passes_and_catches_bias() {
    let p = pipeline("kind = \"secret_sharing\"\nN = 5\nT = 2\nM = 2\nq = 11\n");
    let cfg = StatConfig { trials: 20_000, seed: 4, ..StatConfig::default() };
    let report = privacy_statistical_check(&p, 2, &p.slot_supports(), &cfg).unwrap();
    assert_eq!(report.status(), Status::Pass);
    assert_eq!(report.rows.iter().filter(|r| r.check == "fingerprint_two_sample").count(), 10);
    let biased = StatConfig { sampler: NoiseSampler::Binary, ..cfg };
    assert_eq!(privacy_statistical_check(&p, 2, &p.slot_supports(), &biased).unwrap().status(), Status::Fail);
}

#[test]
fn small_fields_skip_uniformity_but_compare_indices() {
    let p = refined_f3();
    let cfg = StatConfig { trials: 20_000, seed: 4, ..StatConfig::default() };
    let r = privacy_statistical_check(&p, 1, &p.slot_supports(), &cfg).unwrap();
    assert_eq!(r.status(), Status::Inconclusive);
    assert!(r.rows.iter().filter(|r| r.check == "slot_uniformity").all(|r| r.status == Status::Inconclusive));
    assert!(r.rows.iter().filter(|r| r.check != "slot_uniformity").all(|r| r.status == Status::Pass));
}

#[test]
fn statistical_preconditions() {
    let p = refined_f3();
    let few = StatConfig { trials: 100, ..StatConfig::default() };
    assert!(privacy_statistical_check(&p, 1, &p.slot_supports(), &few).is_err());
    let bad = StatConfig { significance: 0.0, ..StatConfig::default() };
    assert!(privacy_statistical_check(&p, 1, &p.slot_supports(), &bad).is_err());
}
