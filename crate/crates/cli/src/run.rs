//! Runs one configured experiment and assembles its report.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde_json::{json, Value};
use tripartite_core::engine::{
    check_message_hygiene, estimate_qber, run_qkd, run_secret_sharing, Backend, BasisChoice, CharlieMode, EveStrategy,
    Party, QkdConfig, RoundKind, SecretSharingConfig, SubspacePolicy, Transcript,
};
use tripartite_core::optics::{fourier_three_port, herald, sample_port, sorter_route, CouplerSpec};
use tripartite_core::oracle::{self, qkd_exact, OracleConstants};
use tripartite_core::qudit::{
    apply_local_phases, equal_up_to_local_diagonal_phases, fourier_basis, partial_trace, sample_index, Basis, MixedState,
    PureState, C64,
};
use tripartite_core::rng::trial_rng;
use tripartite_core::states::{
    collapse_relations, correlation_table, is_permutation, marginal_components, max_single_party_marginal_deviation,
    symmetric_state, ProjectionConvention,
};
use tripartite_core::stats::{within_sigma, FrequencyCheck};

use crate::config::{BackendKind, ExperimentConfig, Protocol};
use crate::report::{Check, ConstantUse, ReportBundle};
use crate::CliError;

/// Constants file compiled into the binary.
pub const EMBEDDED_CONSTANTS: &str = include_str!("../../core/data/oracle_constants.toml");

/// Oracle constants with the provenance comment of each entry.
pub struct Constants {
    pub values: OracleConstants,
    provenance: BTreeMap<String, String>,
    table: serde_json::Map<String, Value>,
}

impl Constants {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let values = OracleConstants::from_toml(text).map_err(|e| CliError::Usage(format!("constants: {e}")))?;
        let mut provenance = BTreeMap::new();
        let mut comment = String::new();
        for line in text.lines() {
            if let Some(c) = line.strip_prefix("# ") {
                comment = c.to_string();
            } else if let Some((key, _)) = line.split_once(" = ") {
                provenance.insert(key.trim().to_string(), std::mem::take(&mut comment));
            }
        }
        let table = match serde_json::to_value(&values).expect("constants serialize") {
            Value::Object(m) => m,
            _ => unreachable!("struct serializes to an object"),
        };
        Ok(Self {
            values,
            provenance,
            table,
        })
    }

    fn scalar(&self, name: &str) -> f64 {
        self.table[name].as_f64().expect("scalar constant")
    }

    fn matrix(&self, name: &str) -> [[f64; 3]; 3] {
        serde_json::from_value(self.table[name].clone()).expect("3x3 constant")
    }

    fn provenance(&self, name: &str) -> String {
        self.provenance.get(name).cloned().unwrap_or_default()
    }
}

/// Collects checks and the constants they used.
struct Builder<'a> {
    constants: &'a Constants,
    checks: Vec<Check>,
    used: Vec<ConstantUse>,
    stats: BTreeMap<String, Value>,
}

impl<'a> Builder<'a> {
    fn new(constants: &'a Constants) -> Self {
        let mut b = Self {
            constants,
            checks: Vec::new(),
            used: Vec::new(),
            stats: BTreeMap::new(),
        };
        let fresh = OracleConstants::compute();
        let dev = fresh.max_deviation(&constants.values);
        b.check("constants_match_exact_recomputation", json!(dev), json!(0.0), "1e-12", "OracleConstants::compute", dev <= 1e-12);
        b
    }

    fn constant(&mut self, name: &str) -> f64 {
        let value = self.constants.scalar(name);
        self.use_constant(name, value);
        value
    }

    fn constant_matrix(&mut self, name: &str) -> [[f64; 3]; 3] {
        let m = self.constants.matrix(name);
        if !self.used.iter().any(|u| u.name == name) {
            for (x, row) in m.iter().enumerate() {
                for (a, &v) in row.iter().enumerate() {
                    self.used.push(ConstantUse {
                        name: format!("{name}[{x}][{a}]"),
                        value: v,
                        provenance: self.constants.provenance(name),
                    });
                }
            }
        }
        m
    }

    fn use_constant(&mut self, name: &str, value: f64) {
        if !self.used.iter().any(|u| u.name == name) {
            self.used.push(ConstantUse {
                name: name.to_string(),
                value,
                provenance: self.constants.provenance(name),
            });
        }
    }

    fn check(&mut self, name: &str, observed: Value, expected: Value, tolerance: &str, reference: &str, pass: bool) {
        self.checks.push(Check {
            name: name.to_string(),
            observed,
            expected,
            tolerance: tolerance.to_string(),
            reference: reference.to_string(),
            pass,
        });
    }

    fn frequency(&mut self, name: &str, f: &FrequencyCheck, reference: &str) {
        let tol = if f.expected == 0.0 || f.expected == 1.0 { "exact" } else { "4 sigma" };
        self.check(name, json!(f.observed), json!(f.expected), tol, reference, f.pass);
    }

    fn stat(&mut self, name: &str, v: Value) {
        self.stats.insert(name.to_string(), v);
    }

    fn finish(self, config: &ExperimentConfig) -> ReportBundle {
        ReportBundle {
            config: config.clone(),
            stats: self.stats,
            checks: self.checks,
            constants: self.used,
        }
    }
}

fn backend(cfg: &ExperimentConfig) -> Result<Backend, CliError> {
    Ok(match cfg.backend {
        BackendKind::Abstract => Backend::Abstract,
        BackendKind::Optical => Backend::optical(&cfg.optical_setup())?,
    })
}

fn transcript_checks(b: &mut Builder, t: &Transcript) {
    let bad = t.records.iter().filter(|r| check_message_hygiene(r).is_err()).count();
    b.check("message_hygiene", json!(bad), json!(0), "exact", "no outcome announced before sifting", bad == 0);
    let inconsistent = t.records.iter().filter(|r| !r.is_consistent()).count();
    b.check(
        "records_consistent",
        json!(inconsistent),
        json!(0),
        "exact",
        "outcome present iff click; sift flag matches reason",
        inconsistent == 0,
    );
    b.check(
        "stats_recomputable",
        json!(t.stats_consistent()),
        json!(true),
        "exact",
        "TranscriptStats::from_records",
        t.stats_consistent(),
    );
    let stats = serde_json::to_value(&t.stats).expect("stats serialize");
    if let Value::Object(m) = stats {
        for (k, v) in m {
            b.stat(&k, v);
        }
    }
}

/// Sift, reconstruction and conditional-uniformity checks for the sharing
/// rounds of a transcript.
fn sharing_checks(b: &mut Builder, t: &Transcript, bases: &[BasisChoice], check_sift: bool) {
    let rounds = t.records.iter().filter(|r| r.kind == RoundKind::SecretSharing);
    let sifted: Vec<_> = rounds.clone().filter(|r| r.sifted).collect();
    let n_rounds = rounds.count() as u64;
    if check_sift {
        let (expected, reference) = if bases.len() == 2 {
            (b.constant("sharing_sift_fraction"), "sharing_sift_fraction")
        } else {
            (oracle::sharing_sift_fraction(bases.len()), "formula |basis set|^-2")
        };
        let f = within_sigma(sifted.len() as u64, n_rounds, expected);
        b.frequency("sharing_sift_fraction", &f, reference);
    }
    b.check(
        "reconstruction_failures",
        json!(t.stats.reconstruction_failures),
        json!(0),
        "exact",
        "reconstruct_alice on every sifted round",
        t.stats.reconstruction_failures == 0,
    );
    for (other, name) in [(1usize, "bob"), (2, "charlie")] {
        let key = format!("sharing_alice_given_{name}");
        let (expected, reference) = if bases.len() == 2 {
            (b.constant_matrix(&key), key.clone())
        } else {
            (
                oracle::sharing_conditional_in_basis(other, bases[0] == BasisChoice::Fourier),
                format!("oracle::sharing_conditional_in_basis({name})"),
            )
        };
        let mut counts = [[0u64; 3]; 3];
        for r in &sifted {
            counts[r.outcomes[other].unwrap_or(0) as usize][r.outcomes[0].unwrap_or(0) as usize] += 1;
        }
        let mut pass = true;
        let mut observed = [[0.0; 3]; 3];
        for x in 0..3 {
            let n: u64 = counts[x].iter().sum();
            for a in 0..3 {
                let f = within_sigma(counts[x][a], n, expected[x][a]);
                pass &= f.pass;
                observed[x][a] = f.observed;
            }
        }
        b.check(
            &format!("alice_given_{name}_only"),
            json!(observed),
            json!(expected),
            "4 sigma per cell",
            &reference,
            pass,
        );
    }
}

fn secret_sharing(cfg: &ExperimentConfig, constants: &Constants) -> Result<(ReportBundle, Option<Transcript>), CliError> {
    let bases: Vec<BasisChoice> = cfg.basis_set.iter().map(|&b| b.into()).collect();
    let t = run_secret_sharing(&SecretSharingConfig {
        trials: cfg.trials,
        seed: cfg.seed,
        basis_set: bases.clone(),
        backend: backend(cfg)?,
        execution: cfg.execution,
    })?;
    let mut b = Builder::new(constants);
    transcript_checks(&mut b, &t);
    sharing_checks(&mut b, &t, &bases, true);
    Ok((b.finish(cfg), Some(t)))
}

/// Frozen constants covering this key-distribution setup, if any.
fn frozen_qkd(policy: SubspacePolicy, eve: Option<&EveStrategy>) -> Option<(&'static str, &'static str)> {
    let default_pair = policy == SubspacePolicy::default();
    match eve {
        None if default_pair => Some(("qkd_sift_fixed", "qkd_qber_honest")),
        None if policy == SubspacePolicy::Random => Some(("qkd_sift_random", "qkd_qber_honest")),
        Some(e) if default_pair && *e == EveStrategy::subspace(Party::Bob) => Some(("eve_subspace_sift", "eve_subspace_qber")),
        Some(e) if default_pair && *e == EveStrategy::full(Party::Bob) => Some(("eve_full_sift", "eve_full_qber")),
        _ => None,
    }
}

fn qkd(cfg: &ExperimentConfig, constants: &Constants) -> Result<(ReportBundle, Option<Transcript>), CliError> {
    let t = run_qkd(&QkdConfig {
        trials: cfg.trials,
        seed: cfg.seed,
        subspace_policy: cfg.subspace_policy,
        eve: cfg.eve.clone(),
        charlie: cfg.charlie,
        backend: backend(cfg)?,
        execution: cfg.execution,
    })?;
    let mut b = Builder::new(constants);
    transcript_checks(&mut b, &t);

    let exact = qkd_exact(cfg.subspace_policy, cfg.eve.as_ref());
    let (sift_p, qber_p, sift_ref, qber_ref) = match frozen_qkd(cfg.subspace_policy, cfg.eve.as_ref()) {
        Some((s, q)) => (b.constant(s), b.constant(q), s.to_string(), q.to_string()),
        None => (
            exact.sift_fraction,
            exact.qber,
            "oracle::qkd_exact sift fraction".to_string(),
            "oracle::qkd_exact error rate".to_string(),
        ),
    };
    let f = within_sigma(t.stats.qkd_sifted, t.stats.qkd_rounds, sift_p);
    b.frequency("qkd_sift_fraction", &f, &sift_ref);
    // Exact zero when the oracle says zero.
    let qber_p = if qber_p.abs() < 1e-12 { 0.0 } else { qber_p };
    let f = within_sigma(t.stats.key_errors, t.stats.qkd_sifted, qber_p);
    b.frequency("qber", &f, &qber_ref);

    if cfg.eve.is_none() {
        if let SubspacePolicy::Fixed(pair) = cfg.subspace_policy {
            let double = t
                .records
                .iter()
                .filter(|r| r.kind == RoundKind::Qkd && r.hidden.latent_branch != Some(pair))
                .filter(|r| r.clicks[0] && r.clicks[1])
                .count();
            b.use_constant("qkd_off_branch_double_click", constants.scalar("qkd_off_branch_double_click"));
            b.check(
                "off_branch_double_clicks",
                json!(double),
                json!(0),
                "exact",
                "qkd_off_branch_double_click",
                double == 0,
            );
        }
    }
    if matches!(cfg.charlie, CharlieMode::Lossy { survivors_share: true, .. }) && t.stats.sharing_rounds > 0 {
        sharing_checks(&mut b, &t, &[BasisChoice::Computational, BasisChoice::Fourier], false);
    }
    if t.stats.qkd_sifted > 0 {
        let e = estimate_qber(&t, cfg.sample_fraction)?;
        b.stat(
            "estimate",
            json!({
                "sample_size": e.sample_size,
                "sample_errors": e.sample_errors,
                "qber": e.estimate,
                "interval": [e.interval.0, e.interval.1],
                "remaining_key_length": e.remaining_key.len(),
            }),
        );
    }
    Ok((b.finish(cfg), Some(t)))
}

fn phase_turns(phases: &[Vec<C64>]) -> Value {
    json!(phases
        .iter()
        .map(|p| p.iter().map(|z| z.arg().rem_euclid(2.0 * PI) / (2.0 * PI)).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn herald_report(cfg: &ExperimentConfig, constants: &Constants) -> Result<(ReportBundle, Option<Transcript>), CliError> {
    let setup = cfg.optical_setup();
    let coupler = setup.coupler()?;
    let assign = setup.assignment()?;
    let source = setup.source_spec()?;
    let h = herald(&coupler, &assign, &source)?;
    let mut b = Builder::new(constants);
    b.stat("success_probability", json!(h.success_probability));

    let off_support = h.state.support(1e-12).iter().filter(|(l, _)| !is_permutation(l)).count();
    b.check(
        "support_on_permutations",
        json!(off_support),
        json!(0),
        "exact",
        "permutation structure of full coincidences",
        off_support == 0,
    );
    b.check(
        "success_probability_in_range",
        json!(h.success_probability),
        json!("(0, 1]"),
        "exact",
        "probability bound",
        h.success_probability > 0.0 && h.success_probability <= 1.0,
    );

    let default_optics = setup.ports == [0, 1, 2] && setup.source.is_empty() && setup.l_max == 2;
    if default_optics {
        let brute = oracle::herald_success_brute_force(coupler.matrix());
        b.check(
            "success_matches_enumeration",
            json!(h.success_probability),
            json!(brute),
            "1e-12",
            "oracle::herald_success_brute_force",
            (h.success_probability - brute).abs() <= 1e-12,
        );
        let target = symmetric_state(3)?.into_state();
        let witness = equal_up_to_local_diagonal_phases(&h.state, &target, 1e-10);
        b.stat("local_phase_equivalent_to_symmetric_state", json!(witness.is_some()));
        if let Some(w) = &witness {
            let fid = apply_local_phases(&h.state, w).fidelity(&target)?;
            b.stat("witness_phase_turns", phase_turns(w));
            b.stat("corrected_fidelity", json!(fid));
        }
        match setup.coupler {
            CouplerSpec::Dft => {
                let p = b.constant("herald_dft_success");
                b.check(
                    "dft_success_probability",
                    json!(h.success_probability),
                    json!(p),
                    "1e-12",
                    "herald_dft_success",
                    (h.success_probability - p).abs() <= 1e-12,
                );
                let fid = witness
                    .as_ref()
                    .map_or(0.0, |w| apply_local_phases(&h.state, w).fidelity(&target).unwrap_or(0.0));
                b.check(
                    "corrected_fidelity",
                    json!(fid),
                    json!(1.0),
                    "1e-10",
                    "equal_up_to_local_diagonal_phases",
                    (fid - 1.0).abs() <= 1e-10,
                );
            }
            CouplerSpec::Identity => {
                let p = b.constant("herald_identity_success");
                let ket = PureState::basis_ket(vec![3, 3, 3], &[0, 1, 2])?;
                let fid = h.state.fidelity(&ket)?;
                b.check(
                    "identity_success_probability",
                    json!(h.success_probability),
                    json!(p),
                    "1e-12",
                    "herald_identity_success",
                    (h.success_probability - p).abs() <= 1e-12,
                );
                b.check("identity_yields_012", json!(fid), json!(1.0), "1e-10", "single routing term", (fid - 1.0).abs() <= 1e-10);
            }
            CouplerSpec::Matrix { .. } => {}
        }
    }
    Ok((b.finish(cfg), None))
}

fn max_entry<'m>(entries: impl IntoIterator<Item = &'m C64>) -> f64 {
    entries.into_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn sorter_check(cfg: &ExperimentConfig, constants: &Constants) -> Result<(ReportBundle, Option<Transcript>), CliError> {
    let setup = cfg.optical_setup();
    let stages = setup.sorter_stages()?;
    let d = setup.l_max + 1;
    let mut b = Builder::new(constants);

    let mut table = Vec::new();
    let mut deterministic = true;
    for l in 0..d {
        let ket: Vec<C64> = (0..d).map(|k| C64::new(if k == l { 1.0 } else { 0.0 }, 0.0)).collect();
        let ports = sorter_route(&ket, &stages)?;
        deterministic &= ports.len() == 1 && (ports[0].probability - 1.0).abs() <= 1e-12;
        table.push(json!({"l": l, "port": ports[0].label}));
    }
    b.stat("routing_table", json!(table));
    b.check("eigenstates_route_deterministically", json!(deterministic), json!(true), "exact", "port rule", deterministic);

    // Fixed test photon with unequal weights and phases on every level.
    let raw: Vec<C64> = (0..d).map(|l| C64::from_polar(1.0 + l as f64, 0.7 * l as f64)).collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let photon: Vec<C64> = raw.iter().map(|a| a / norm).collect();
    let ports = sorter_route(&photon, &stages)?;
    let mut counts = vec![0u64; ports.len()];
    for t in 0..cfg.trials {
        counts[sample_port(&ports, &mut trial_rng(cfg.seed, t))] += 1;
    }
    let mut pass = true;
    let mut observed = Vec::new();
    for (p, &k) in ports.iter().zip(&counts) {
        let f = within_sigma(k, cfg.trials, p.probability);
        pass &= f.pass;
        observed.push(json!({"port": p.label, "observed": f.observed, "expected": f.expected}));
    }
    b.stat("sorter_sampling", json!(observed));
    b.check("sorter_sampling_matches_born_rule", json!(pass), json!(true), "4 sigma per port", "|amplitude|^2 per level", pass);

    if d == 3 {
        let probs = fourier_three_port(&photon)?;
        let u = fourier_basis(3)?;
        let psi = PureState::normalized(vec![3], photon.clone())?;
        let born = tripartite_core::qudit::born_probabilities(&psi, &[&u])?;
        let exact_dev = (0..3).map(|m| (probs[m] - born.get(&[m])).abs()).fold(0.0, f64::max);
        b.check(
            "three_port_equals_fourier_measurement",
            json!(exact_dev),
            json!(0.0),
            "1e-10",
            "born_probabilities in fourier_basis(3)",
            exact_dev <= 1e-10,
        );
        let mut counts = [0u64; 3];
        for t in 0..cfg.trials {
            counts[sample_index(&probs, &mut trial_rng(cfg.seed ^ (1 << 48), t))] += 1;
        }
        let pass = (0..3).all(|m| within_sigma(counts[m], cfg.trials, born.get(&[m])).pass);
        b.check(
            "three_port_sampling_matches_born_rule",
            json!(counts.iter().map(|&k| k as f64 / cfg.trials as f64).collect::<Vec<_>>()),
            json!((0..3).map(|m| born.get(&[m])).collect::<Vec<_>>()),
            "4 sigma per port",
            "born_probabilities in fourier_basis(3)",
            pass,
        );
        let det = setup.detector()?;
        let levels = Basis::computational(3);
        let mut dev: f64 = 0.0;
        for m in 0..3 {
            dev = dev.max(max_entry(&(&det.level_projectors()[m] - levels.projector(m))));
            dev = dev.max(max_entry(&(&det.superposition_projectors()?[m] - u.projector(m))));
        }
        b.check(
            "optical_chain_equals_abstract_measurement",
            json!(dev),
            json!(0.0),
            "1e-10",
            "computational and Fourier projectors",
            dev <= 1e-10,
        );
    }
    Ok((b.finish(cfg), None))
}

fn verify_paper(cfg: &ExperimentConfig, constants: &Constants) -> Result<(ReportBundle, Option<Transcript>), CliError> {
    let mut b = Builder::new(constants);
    let report = collapse_relations()?;
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            let conv: serde_json::Map<String, Value> = r
                .outcomes
                .iter()
                .map(|o| {
                    (
                        serde_json::to_value(o.convention).unwrap().as_str().unwrap().to_string(),
                        json!({
                            "fourier_index": o.fourier_index,
                            "vector_matches": o.vector_matches,
                            "phase_matches": o.phase_matches,
                            "weight": o.weight,
                        }),
                    )
                })
                .collect();
            json!({
                "bob": r.relation.bob,
                "alice": r.relation.alice,
                "stated_charlie": r.relation.charlie,
                "conventions": conv,
            })
        })
        .collect();
    b.stat("collapse_relations", json!(rows));
    let counts: serde_json::Map<String, Value> = ProjectionConvention::ALL
        .iter()
        .map(|&c| {
            (
                serde_json::to_value(c).unwrap().as_str().unwrap().to_string(),
                json!(report.matched_count(c)),
            )
        })
        .collect();
    b.stat("stated_vectors_matched", json!(counts));

    let named = [ProjectionConvention::Conjugated, ProjectionConvention::Unconjugated];
    let single = report
        .rows
        .iter()
        .all(|r| named.iter().all(|&c| r.outcome(c).fourier_index.is_some()));
    b.check(
        "collapse_onto_single_fourier_vector",
        json!(single),
        json!(true),
        "1e-10",
        "27-amplitude contraction, conjugated and unconjugated",
        single,
    );

    let psi = symmetric_state(3)?;
    let rho = partial_trace(psi.state(), &[0, 1])?;
    let pairs = marginal_components();
    let third = 1.0 / 3.0;
    let mix = MixedState::mixture(&[
        (third, pairs[0].state()),
        (third, pairs[1].state()),
        (third, pairs[2].state()),
    ])?;
    let dev = rho.max_abs_diff(&mix);
    b.check("reduced_state_is_pair_mixture", json!(dev), json!(0.0), "1e-10", "uniform mixture of symmetric pairs", dev <= 1e-10);

    let marginal = max_single_party_marginal_deviation(&psi)?;
    b.check("single_party_marginal_is_maximally_mixed", json!(marginal), json!(0.0), "1e-10", "I/3", marginal <= 1e-10);

    let table = correlation_table(&fourier_basis(3)?)?;
    let diag = b.constant("fourier_diagonal_probability");
    let perm = b.constant("fourier_permutation_probability");
    let dev = table
        .entries
        .iter()
        .map(|(&(a, bb), &(_, p))| (p - if a == bb { diag } else { perm }).abs())
        .fold(0.0, f64::max);
    b.check(
        "fourier_correlation_table",
        json!(dev),
        json!(0.0),
        "1e-12",
        "fourier_diagonal_probability, fourier_permutation_probability",
        dev <= 1e-12 && table.entries.len() == 9,
    );
    Ok((b.finish(cfg), None))
}

/// Runs the configured protocol. The transcript is returned for protocols
/// that produce one.
pub fn run(cfg: &ExperimentConfig, constants: &Constants) -> Result<(ReportBundle, Option<Transcript>), CliError> {
    cfg.validate()?;
    match cfg.protocol {
        Protocol::SecretSharing => secret_sharing(cfg, constants),
        Protocol::Qkd => qkd(cfg, constants),
        Protocol::Herald => herald_report(cfg, constants),
        Protocol::SorterCheck => sorter_check(cfg, constants),
        Protocol::VerifyPaper => verify_paper(cfg, constants),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_constants_parse_with_provenance() {
        let c = Constants::parse(EMBEDDED_CONSTANTS).unwrap();
        assert_eq!(c.scalar("sharing_sift_fraction"), 0.25);
        assert!(c.provenance("herald_dft_success").contains("729"));
        assert_eq!(c.matrix("sharing_alice_given_bob").len(), 3);
    }

    #[test]
    fn stale_constants_fail_freshness_check() {
        let edited = EMBEDDED_CONSTANTS.replace("sharing_sift_fraction = 0.25", "sharing_sift_fraction = 0.26");
        let c = Constants::parse(&edited).unwrap();
        let cfg = ExperimentConfig {
            protocol: Protocol::VerifyPaper,
            ..Default::default()
        };
        let (report, _) = run(&cfg, &c).unwrap();
        assert!(!report.checks[0].pass);
        assert!(!report.all_pass());
    }

    #[test]
    fn frozen_lookup_only_for_covered_setups() {
        assert!(frozen_qkd(SubspacePolicy::default(), None).is_some());
        assert!(frozen_qkd(SubspacePolicy::default(), Some(&EveStrategy::full(Party::Alice))).is_none());
        let pair = tripartite_core::qudit::LevelPair::new(1, 2).unwrap();
        assert!(frozen_qkd(SubspacePolicy::Fixed(pair), None).is_none());
    }

    #[test]
    fn invalid_config_is_usage_error() {
        let cfg = ExperimentConfig {
            trials: 0,
            ..Default::default()
        };
        let err = run(&cfg, &Constants::parse(EMBEDDED_CONSTANTS).unwrap()).unwrap_err();
        assert_eq!(err.exit_code(), crate::EXIT_USAGE);
    }
}
