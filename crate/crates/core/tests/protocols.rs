use tripartite_core::engine::{
    check_message_hygiene, estimate_qber, run_qkd, run_secret_sharing, BasisChoice, CharlieMode, ClassicalMessage,
    EveStrategy, Party, ProtocolId, QkdConfig, RoundKind, SecretSharingConfig, SubspacePolicy, Transcript,
};
use tripartite_core::oracle::{qkd_exact, OracleConstants};
use tripartite_core::par::Execution;
use tripartite_core::stats::within_sigma;
use tripartite_core::Error;

fn constants() -> OracleConstants {
    OracleConstants::from_toml(include_str!("../data/oracle_constants.toml")).unwrap()
}

fn qkd(trials: u64, seed: u64) -> QkdConfig {
    QkdConfig {
        trials,
        seed,
        ..Default::default()
    }
}

#[test]
fn transcripts_are_reproducible_and_mode_independent() {
    let base = SecretSharingConfig {
        trials: 3000,
        seed: 99,
        execution: Execution::Sequential,
        ..Default::default()
    };
    let a = run_secret_sharing(&base).unwrap();
    let b = run_secret_sharing(&base).unwrap();
    let c = run_secret_sharing(&SecretSharingConfig {
        execution: Execution::Parallel,
        ..base.clone()
    })
    .unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);

    let cfg = QkdConfig {
        eve: Some(EveStrategy::subspace(Party::Bob)),
        subspace_policy: SubspacePolicy::Random,
        ..qkd(3000, 5)
    };
    let x = run_qkd(&cfg).unwrap();
    let y = run_qkd(&QkdConfig {
        execution: Execution::Sequential,
        ..cfg
    })
    .unwrap();
    assert_eq!(x, y);
}

#[test]
fn sifted_sharing_rounds_are_permutations_or_reconstructible() {
    let t = run_secret_sharing(&SecretSharingConfig {
        trials: 20_000,
        seed: 17,
        ..Default::default()
    })
    .unwrap();
    for r in t.records.iter().filter(|r| r.sifted) {
        let o: Vec<u8> = r.outcomes.iter().map(|o| o.unwrap()).collect();
        match r.bases[0] {
            BasisChoice::Computational => {
                let mut s = o.clone();
                s.sort();
                assert_eq!(s, vec![0, 1, 2]);
            }
            _ => assert_eq!(r.reconstruction_ok(), Some(true)),
        }
    }
    assert_eq!(t.stats.mixed_basis_rounds, t.stats.rounds - t.stats.sifted);
}

#[test]
fn fourier_only_sharing_always_sifts() {
    let t = run_secret_sharing(&SecretSharingConfig {
        trials: 2000,
        seed: 1,
        basis_set: vec![BasisChoice::Fourier],
        ..Default::default()
    })
    .unwrap();
    assert_eq!(t.stats.sifted, 2000);
    assert_eq!(t.stats.reconstruction_failures, 0);
}

#[test]
fn message_log_never_leaks_outcomes_early() {
    let t = run_qkd(&qkd(2000, 3)).unwrap();
    for r in &t.records {
        check_message_hygiene(r).unwrap();
    }
    let s = run_secret_sharing(&SecretSharingConfig {
        trials: 2000,
        seed: 3,
        ..Default::default()
    })
    .unwrap();
    let mut leaked = s.records.iter().find(|r| r.sifted).unwrap().clone();
    leaked.messages.insert(0, ClassicalMessage::share(Party::Bob, leaked.trial, 1));
    assert!(matches!(check_message_hygiene(&leaked), Err(Error::InvalidRecord(_))));
    let mut rejected = s.records.iter().find(|r| !r.sifted).unwrap().clone();
    rejected.messages.push(ClassicalMessage::share(Party::Charlie, rejected.trial, 0));
    assert!(check_message_hygiene(&rejected).is_err());
}

#[test]
fn qkd_rejection_precedence() {
    let t = run_qkd(&QkdConfig {
        subspace_policy: SubspacePolicy::Random,
        ..qkd(5000, 8)
    })
    .unwrap();
    let s = &t.stats;
    assert_eq!(s.sifted + s.rejected_basis + s.rejected_subspace + s.rejected_click, s.rounds);
    for r in &t.records {
        assert!(r.is_consistent());
        if !r.bases[0].same_kind(r.bases[1]) {
            assert_eq!(r.reason, tripartite_core::engine::SiftReason::BasisMismatch);
        }
    }
    assert!(s.rejected_subspace > 0);
}

#[test]
fn full_basis_eve_matches_exact_channel() {
    let k = constants();
    let t = run_qkd(&QkdConfig {
        eve: Some(EveStrategy::full(Party::Bob)),
        ..qkd(60_000, 21)
    })
    .unwrap();
    assert!(within_sigma(t.stats.sifted, t.stats.rounds, k.eve_full_sift).pass);
    assert!(within_sigma(t.stats.key_errors, t.stats.qkd_sifted, k.eve_full_qber).pass);
}

#[test]
fn eve_on_alice_matches_exact_channel() {
    let eve = EveStrategy::subspace(Party::Alice);
    let exact = qkd_exact(SubspacePolicy::default(), Some(&eve));
    let t = run_qkd(&QkdConfig {
        eve: Some(eve),
        ..qkd(60_000, 22)
    })
    .unwrap();
    assert!(within_sigma(t.stats.key_errors, t.stats.qkd_sifted, exact.qber).pass);
}

#[test]
fn eve_with_random_subspaces_matches_exact_channel() {
    let eve = EveStrategy::subspace(Party::Bob);
    let exact = qkd_exact(SubspacePolicy::Random, Some(&eve));
    let t = run_qkd(&QkdConfig {
        eve: Some(eve),
        subspace_policy: SubspacePolicy::Random,
        ..qkd(120_000, 23)
    })
    .unwrap();
    assert!(within_sigma(t.stats.sifted, t.stats.rounds, exact.sift_fraction).pass);
    assert!(within_sigma(t.stats.key_errors, t.stats.qkd_sifted, exact.qber).pass);
}

#[test]
fn lossy_charlie_splits_rounds() {
    let t = run_qkd(&QkdConfig {
        charlie: CharlieMode::Lossy {
            loss_probability: 0.3,
            survivors_share: true,
        },
        ..qkd(20_000, 4)
    })
    .unwrap();
    assert!(within_sigma(t.stats.qkd_rounds, t.stats.rounds, 0.3).pass);
    assert_eq!(t.stats.key_errors, 0);
    assert_eq!(t.stats.reconstruction_failures, 0);
    for r in &t.records {
        assert_eq!(r.hidden.charlie_lost, r.kind == RoundKind::Qkd);
    }
}

#[test]
fn estimate_on_clean_key() {
    let t = run_qkd(&qkd(4000, 12)).unwrap();
    let n = t.stats.qkd_sifted as usize;
    assert_eq!(n % 2, 0, "pick a seed with an even key length");
    let e = estimate_qber(&t, 0.5).unwrap();
    assert_eq!(e.estimate, 0.0);
    assert_eq!(e.remaining_key.len(), n / 2);
    assert_eq!(e.interval.0, 0.0);
}

#[test]
fn estimate_on_corrupted_key() {
    let t = run_qkd(&qkd(2000, 13)).unwrap();
    let mut records = t.records.clone();
    for r in records.iter_mut().filter(|r| r.sifted) {
        r.outcomes[1] = r.outcomes[1].map(|b| 1 - b);
    }
    let bad = Transcript::new(t.seed, ProtocolId::Qkd, records);
    assert_eq!(bad.stats.error_rate, Some(1.0));
    let e = estimate_qber(&bad, 0.25).unwrap();
    assert_eq!(e.estimate, 1.0);
    assert_eq!(e.interval.1, 1.0);
}

#[test]
fn estimate_rejects_bad_input() {
    let t = run_qkd(&qkd(100, 1)).unwrap();
    assert!(estimate_qber(&t, 0.0).is_err());
    assert!(estimate_qber(&t, 1.0).is_err());
    let sharing = run_secret_sharing(&SecretSharingConfig {
        trials: 100,
        ..Default::default()
    })
    .unwrap();
    assert!(matches!(estimate_qber(&sharing, 0.5), Err(Error::Empty(_))));
}

#[test]
fn interval_coverage_under_eve() {
    let q = constants().eve_subspace_qber;
    let covered = (0..100u64)
        .filter(|rep| {
            let t = run_qkd(&QkdConfig {
                eve: Some(EveStrategy::subspace(Party::Bob)),
                ..qkd(3000, 0xC0FE_0000_0000 + (rep << 32))
            })
            .unwrap();
            let e = estimate_qber(&t, 0.5).unwrap();
            e.interval.0 <= q && q <= e.interval.1
        })
        .count();
    println!("interval covered the exact error rate in {covered}/100 repetitions");
    assert!(covered >= 95, "coverage {covered}/100");
}
