//! Public classical channel between the parties.

use serde::{Deserialize, Serialize};

use super::{BasisChoice, Party, TrialRecord};
use crate::error::{Error, Result};
use crate::qudit::LevelPair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    /// Before the sift verdict.
    Announcement,
    /// After sifting; only here may outcome values appear.
    Reconciliation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Payload {
    Basis(BasisChoice),
    Subspace(LevelPair),
    Click(bool),
    ReconciliationShare(u8),
}

impl Payload {
    pub fn carries_outcome(&self) -> bool {
        matches!(self, Payload::ReconciliationShare(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalMessage {
    pub sender: Party,
    pub round: u64,
    pub phase: Phase,
    pub payload: Payload,
}

impl ClassicalMessage {
    pub fn announce(sender: Party, round: u64, payload: Payload) -> Self {
        Self {
            sender,
            round,
            phase: Phase::Announcement,
            payload,
        }
    }

    pub fn share(sender: Party, round: u64, outcome: u8) -> Self {
        Self {
            sender,
            round,
            phase: Phase::Reconciliation,
            payload: Payload::ReconciliationShare(outcome),
        }
    }
}

/// Checks one round's message log: no outcome value before the sift
/// verdict, announcements strictly precede reconciliation, and shares only
/// appear in sifted rounds.
pub fn check_message_hygiene(record: &TrialRecord) -> Result<()> {
    let mut reconciling = false;
    for m in &record.messages {
        if m.round != record.trial {
            return Err(Error::InvalidRecord(format!(
                "round {} carries a message for round {}",
                record.trial, m.round
            )));
        }
        match m.phase {
            Phase::Announcement => {
                if reconciling {
                    return Err(Error::InvalidRecord(format!(
                        "round {}: announcement after reconciliation began",
                        record.trial
                    )));
                }
                if m.payload.carries_outcome() {
                    return Err(Error::InvalidRecord(format!(
                        "round {}: outcome disclosed before sifting",
                        record.trial
                    )));
                }
            }
            Phase::Reconciliation => {
                if !record.sifted {
                    return Err(Error::InvalidRecord(format!(
                        "round {}: reconciliation in a rejected round",
                        record.trial
                    )));
                }
                reconciling = true;
            }
        }
    }
    Ok(())
}
