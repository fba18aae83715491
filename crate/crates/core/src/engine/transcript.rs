//! Per-round records and the statistics derived from them.

use serde::{Deserialize, Serialize};

use super::secret_sharing::reconstruct_alice;
use super::{BasisChoice, ClassicalMessage, Party};
use crate::qudit::LevelPair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolId {
    SecretSharing,
    Qkd,
}

impl std::fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProtocolId::SecretSharing => "secret-sharing",
            ProtocolId::Qkd => "qkd",
        })
    }
}

/// Which measurement a round ran. A QKD run with probabilistic loss may
/// contain secret-sharing rounds in which Charlie kept his particle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundKind {
    SecretSharing,
    Qkd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SiftReason {
    None,
    BasisMismatch,
    SubspaceMismatch,
    MissingClick,
}

impl std::fmt::Display for SiftReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SiftReason::None => "none",
            SiftReason::BasisMismatch => "basis-mismatch",
            SiftReason::SubspaceMismatch => "subspace-mismatch",
            SiftReason::MissingClick => "missing-click",
        })
    }
}

/// Eve's intercept on one round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EveRecord {
    pub target: Party,
    pub basis: BasisChoice,
    /// Index into the full (completed) basis Eve measured.
    pub outcome: u8,
}

/// Simulation-side facts no party announces; kept for analysis only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HiddenRecord {
    pub charlie_lost: bool,
    /// Level pair of the two-party component the round's state fell into
    /// once Charlie's particle was gone.
    pub latent_branch: Option<LevelPair>,
    pub eve: Option<EveRecord>,
}

/// One round. Per-party vectors are in party order (Alice, Bob[, Charlie]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub kind: RoundKind,
    pub bases: Vec<BasisChoice>,
    pub clicks: Vec<bool>,
    pub outcomes: Vec<Option<u8>>,
    pub sifted: bool,
    pub reason: SiftReason,
    pub hidden: HiddenRecord,
    pub messages: Vec<ClassicalMessage>,
}

impl TrialRecord {
    /// Outcome present iff click; sift flag consistent with the reason.
    pub fn is_consistent(&self) -> bool {
        let n = self.bases.len();
        self.clicks.len() == n
            && self.outcomes.len() == n
            && self.clicks.iter().zip(&self.outcomes).all(|(c, o)| *c == o.is_some())
            && self.sifted == (self.reason == SiftReason::None)
    }

    /// Alice's and Bob's key symbols for a sifted QKD round. In the level
    /// basis the surviving component is anti-correlated, so Bob flips his
    /// bit; in the superposition basis both keep the raw outcome.
    pub fn key_symbols(&self) -> Option<(u8, u8)> {
        if self.kind != RoundKind::Qkd || !self.sifted {
            return None;
        }
        let a = self.outcomes[0]?;
        let b = self.outcomes[1]?;
        match self.bases[1] {
            BasisChoice::SubspaceComputational(_) => Some((a, 1 - b)),
            _ => Some((a, b)),
        }
    }

    /// For a sifted secret-sharing round, whether Bob and Charlie together
    /// recover Alice's outcome.
    pub fn reconstruction_ok(&self) -> Option<bool> {
        if self.kind != RoundKind::SecretSharing || !self.sifted {
            return None;
        }
        let (a, b, c) = (self.outcomes[0]?, self.outcomes[1]?, self.outcomes[2]?);
        Some(reconstruct_alice(b, c, self.bases[0]).is_ok_and(|x| x == a))
    }
}

/// Counts and rates over a transcript. Rates are `None` when their
/// denominator is zero.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TranscriptStats {
    pub rounds: u64,
    pub sifted: u64,
    pub sift_fraction: f64,
    pub qkd_rounds: u64,
    pub qkd_sifted: u64,
    pub key_errors: u64,
    pub error_rate: Option<f64>,
    pub sharing_rounds: u64,
    pub sharing_sifted: u64,
    pub reconstruction_failures: u64,
    pub reconstruction_success_rate: Option<f64>,
    pub rejected_basis: u64,
    pub rejected_subspace: u64,
    pub rejected_click: u64,
    /// Secret-sharing rounds measured in more than one basis.
    pub mixed_basis_rounds: u64,
}

fn rate(k: u64, n: u64) -> Option<f64> {
    (n > 0).then(|| k as f64 / n as f64)
}

impl TranscriptStats {
    pub fn from_records(records: &[TrialRecord]) -> Self {
        let mut s = TranscriptStats {
            rounds: records.len() as u64,
            ..Default::default()
        };
        for r in records {
            match r.reason {
                SiftReason::None => s.sifted += 1,
                SiftReason::BasisMismatch => s.rejected_basis += 1,
                SiftReason::SubspaceMismatch => s.rejected_subspace += 1,
                SiftReason::MissingClick => s.rejected_click += 1,
            }
            match r.kind {
                RoundKind::Qkd => {
                    s.qkd_rounds += 1;
                    if let Some((a, b)) = r.key_symbols() {
                        s.qkd_sifted += 1;
                        s.key_errors += u64::from(a != b);
                    }
                }
                RoundKind::SecretSharing => {
                    s.sharing_rounds += 1;
                    if r.bases.iter().any(|b| *b != r.bases[0]) {
                        s.mixed_basis_rounds += 1;
                    }
                    if let Some(ok) = r.reconstruction_ok() {
                        s.sharing_sifted += 1;
                        s.reconstruction_failures += u64::from(!ok);
                    }
                }
            }
        }
        s.sift_fraction = rate(s.sifted, s.rounds).unwrap_or(0.0);
        s.error_rate = rate(s.key_errors, s.qkd_sifted);
        s.reconstruction_success_rate = rate(s.sharing_sifted - s.reconstruction_failures, s.sharing_sifted);
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub seed: u64,
    pub protocol: ProtocolId,
    pub records: Vec<TrialRecord>,
    pub stats: TranscriptStats,
}

impl Transcript {
    pub fn new(seed: u64, protocol: ProtocolId, records: Vec<TrialRecord>) -> Self {
        let stats = TranscriptStats::from_records(&records);
        Self {
            seed,
            protocol,
            records,
            stats,
        }
    }

    /// Stored statistics equal a fresh recomputation.
    pub fn stats_consistent(&self) -> bool {
        TranscriptStats::from_records(&self.records) == self.stats
    }

    pub fn sifted_key_pairs(&self) -> Vec<(u8, u8)> {
        self.records.iter().filter_map(TrialRecord::key_symbols).collect()
    }
}
