use std::fs;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;
use tripartite_cli::config::{BackendKind, ExperimentConfig, Format, OutputSpec, Protocol, SharingBasis};
use tripartite_core::engine::{CharlieMode, EveStrategy, Party, SubspacePolicy};
use tripartite_core::par::Execution;
use tripartite_core::qudit::LevelPair;

fn tripartite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tripartite"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let out = tripartite(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

fn checks_pass(report: &Value) -> bool {
    report["checks"].as_array().unwrap().iter().all(|c| c["pass"] == Value::Bool(true))
}

#[test]
fn qkd_honest_report() {
    let (code, r) = json_report(&["run", "--protocol", "qkd", "--trials", "6000", "--seed", "3"]);
    assert_eq!(code, 0);
    assert!(checks_pass(&r));
    assert_eq!(r["stats"]["key_errors"], Value::from(0));
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"qkd_sift_fraction") && names.contains(&"qber"));
    assert!(r["constants"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"] == "qkd_sift_fixed" && !c["provenance"].as_str().unwrap().is_empty()));
}

#[test]
fn qkd_with_full_basis_eve() {
    let (code, r) = json_report(&["run", "--protocol", "qkd", "--trials", "6000", "--eve", "intercept:bob:full"]);
    assert_eq!(code, 0);
    assert!(r["stats"]["error_rate"].as_f64().unwrap() > 0.2);
}

#[test]
fn secret_sharing_report() {
    let (code, r) = json_report(&["run", "--protocol", "secret-sharing", "--trials", "6000"]);
    assert_eq!(code, 0);
    assert_eq!(r["stats"]["reconstruction_failures"], Value::from(0));
}

#[test]
fn verify_paper_exits_zero() {
    let (code, r) = json_report(&["run", "--protocol", "verify-paper"]);
    assert_eq!(code, 0);
    assert_eq!(r["stats"]["collapse_relations"].as_array().unwrap().len(), 9);
    assert_eq!(r["stats"]["stated_vectors_matched"]["alice-conjugated"], Value::from(9));
}

#[test]
fn herald_and_sorter_check() {
    let (code, r) = json_report(&["run", "--protocol", "herald"]);
    assert_eq!(code, 0);
    assert!((r["stats"]["success_probability"].as_f64().unwrap() - 2.0 / 243.0).abs() < 1e-12);
    let (code, r) = json_report(&["run", "--protocol", "sorter-check", "--trials", "3000"]);
    assert_eq!(code, 0);
    assert_eq!(r["stats"]["routing_table"][2]["port"], "01");
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, "protocol = \"secret-sharing\"\ntrials = 500\nseed = 4\n").unwrap();
    let (code, r) = json_report(&["run", "--config", cfg.to_str().unwrap(), "--trials", "300"]);
    assert_eq!(code, 0);
    assert_eq!(r["config"]["trials"], Value::from(300));
    assert_eq!(r["config"]["seed"], Value::from(4));
    assert_eq!(r["stats"]["rounds"], Value::from(300));
}

#[test]
fn csv_and_transcript_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rounds.csv");
    let tr = dir.path().join("transcript.json");
    let out = tripartite(&[
        "run",
        "--protocol",
        "secret-sharing",
        "--trials",
        "40",
        "--format",
        "csv",
        "--output",
        csv.to_str().unwrap(),
        "--transcript",
        tr.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trial,kind,basis_alice,basis_bob,basis_charlie,click_alice,click_bob,click_charlie,\
         outcome_alice,outcome_bob,outcome_charlie,sifted,reason"
    );
    assert_eq!(lines.count(), 40);
    let t: Value = serde_json::from_str(&fs::read_to_string(&tr).unwrap()).unwrap();
    assert_eq!(t["records"].as_array().unwrap().len(), 40);
}

fn qkd_stdout(extra: &[&str]) -> Vec<u8> {
    let mut args = vec!["run", "--protocol", "qkd", "--trials", "2000", "--seed", "77"];
    args.extend_from_slice(extra);
    let out = tripartite(&args);
    assert_eq!(out.status.code(), Some(0));
    out.stdout
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = qkd_stdout(&[]);
    assert_eq!(a, qkd_stdout(&[]));
    let seq = String::from_utf8(qkd_stdout(&["--execution", "sequential"])).unwrap();
    assert_eq!(seq.replace("\"sequential\"", "\"parallel\"").as_bytes(), a.as_slice());
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["run", "--protocol", "bb84"][..],
        &["run", "--trials", "0"],
        &["run", "--basis-set", "diagonal"],
        &["run", "--protocol", "qkd", "--eve", "intercept:charlie:full"],
        &["run", "--protocol", "herald", "--format", "csv"],
        &["run", "--sample-fraction", "1.5"],
        &["frobnicate"],
    ] {
        assert_eq!(tripartite(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn io_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    assert_eq!(tripartite(&["run", "--config", missing.to_str().unwrap()]).status.code(), Some(4));
    let unwritable = dir.path().join("no/such/dir/out.json");
    let out = tripartite(&["run", "--protocol", "verify-paper", "--output", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn stale_constants_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("constants.toml");
    let text = String::from_utf8(tripartite(&["oracle"]).stdout).unwrap();
    fs::write(&path, text.replace("qkd_sift_fixed = 0.16666666666666666", "qkd_sift_fixed = 0.2")).unwrap();
    let out = tripartite(&["run", "--protocol", "verify-paper", "--constants", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oracle_output_matches_shipped_table() {
    let out = tripartite(&["oracle"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        include_str!("../../core/data/oracle_constants.toml")
    );
}

#[test]
fn print_config_round_trips() {
    let out = tripartite(&["run", "--protocol", "qkd", "--eve", "intercept:alice:subspace", "--print-config"]);
    assert_eq!(out.status.code(), Some(0));
    let cfg = ExperimentConfig::from_toml(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(cfg.protocol, Protocol::Qkd);
    assert_eq!(cfg.eve, Some(EveStrategy::subspace(Party::Alice)));
}

fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
    let protocol = prop::sample::select(Protocol::ALL.to_vec());
    let bases = prop::sample::select(vec![
        vec![SharingBasis::Computational],
        vec![SharingBasis::Fourier],
        vec![SharingBasis::Fourier, SharingBasis::Computational],
    ]);
    let policy = prop_oneof![
        Just(SubspacePolicy::Random),
        prop::sample::select(LevelPair::qutrit_pairs().to_vec()).prop_map(SubspacePolicy::Fixed),
    ];
    let eve = prop_oneof![
        Just(None),
        Just(Some(EveStrategy::full(Party::Bob))),
        Just(Some(EveStrategy::subspace(Party::Alice))),
    ];
    let charlie = prop_oneof![
        Just(CharlieMode::Lost),
        (0.0..=1.0f64, any::<bool>()).prop_map(|(loss_probability, survivors_share)| CharlieMode::Lossy {
            loss_probability,
            survivors_share
        }),
    ];
    let format = prop::sample::select(vec![Format::Json, Format::Csv, Format::Text]);
    (
        protocol,
        1..1_000_000u64,
        any::<u64>(),
        bases,
        policy,
        eve,
        any::<bool>(),
        0.01..0.99f64,
        charlie,
        format,
        prop::option::of("[a-z]{1,8}\\.json"),
    )
        .prop_map(|(protocol, trials, seed, basis_set, subspace_policy, eve, optical, sample_fraction, charlie, format, path)| {
            ExperimentConfig {
                protocol,
                trials,
                seed,
                basis_set,
                subspace_policy,
                eve,
                backend: if optical { BackendKind::Optical } else { BackendKind::Abstract },
                execution: if optical { Execution::Sequential } else { Execution::Parallel },
                sample_fraction,
                charlie,
                optical: None,
                output: OutputSpec {
                    format,
                    path: path.map(Into::into),
                    transcript: None,
                },
            }
        })
}

proptest! {
    #[test]
    fn config_toml_round_trip(cfg in arb_config()) {
        let text = cfg.to_toml();
        prop_assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
    }
}
