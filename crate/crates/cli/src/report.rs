//! Report bundle and its serializations.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tripartite_core::engine::{BasisChoice, Transcript};

use crate::config::ExperimentConfig;

/// One declared invariant and what it was checked against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub observed: Value,
    pub expected: Value,
    /// Tolerance rule, e.g. `exact`, `4 sigma`, `1e-10`.
    pub tolerance: String,
    /// Oracle constant or formula the expectation comes from.
    pub reference: String,
    pub pass: bool,
}

/// An oracle value used in the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantUse {
    pub name: String,
    pub value: f64,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub config: ExperimentConfig,
    pub stats: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub constants: Vec<ConstantUse>,
}

impl ReportBundle {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn to_json(report: &ReportBundle) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

const PARTIES: [&str; 3] = ["alice", "bob", "charlie"];

/// One row per round: trial, kind, bases, clicks, outcomes, sift flag, reason.
pub fn write_csv<W: Write>(transcript: &Transcript, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["trial".to_string(), "kind".to_string()];
    for group in ["basis", "click", "outcome"] {
        header.extend(PARTIES.iter().map(|p| format!("{group}_{p}")));
    }
    header.extend(["sifted".to_string(), "reason".to_string()]);
    w.write_record(&header)?;
    for r in &transcript.records {
        let mut row = vec![
            r.trial.to_string(),
            match r.kind {
                tripartite_core::engine::RoundKind::SecretSharing => "secret-sharing".into(),
                tripartite_core::engine::RoundKind::Qkd => "qkd".into(),
            },
        ];
        row.extend((0..3).map(|k| cell(r.bases.get(k).map(BasisChoice::to_string))));
        row.extend((0..3).map(|k| cell(r.clicks.get(k))));
        row.extend((0..3).map(|k| cell(r.outcomes.get(k).copied().flatten())));
        row.push(r.sifted.to_string());
        row.push(r.reason.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

pub fn to_text(report: &ReportBundle) -> String {
    let mut s = format!(
        "protocol {}  trials {}  seed {}\n\n",
        report.config.protocol.name(),
        report.config.trials,
        report.config.seed
    );
    s.push_str("statistics\n");
    for (k, v) in &report.stats {
        s.push_str(&format!("  {k:<32} {}\n", value_text(v)));
    }
    s.push_str("\nchecks\n");
    for c in &report.checks {
        s.push_str(&format!(
            "  [{}] {:<36} observed {}  expected {}  ({}; {})\n",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            value_text(&c.observed),
            value_text(&c.expected),
            c.tolerance,
            c.reference
        ));
    }
    if !report.constants.is_empty() {
        s.push_str("\nconstants\n");
        for k in &report.constants {
            s.push_str(&format!("  {:<36} {:.12}  {}\n", k.name, k.value, k.provenance));
        }
    }
    s
}
