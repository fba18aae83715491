//! Round-by-round execution of the two protocols: three-party secret
//! sharing on the full state, and two-party key distribution on the
//! residual state after Charlie's particle is lost.
//!
//! Every round draws from its own seeded stream (see [`crate::rng`]), so
//! rounds may be evaluated concurrently while the transcript stays in
//! trial order and is bit-identical for a given seed and configuration.

pub mod backend;
pub mod estimate;
pub mod message;
pub mod qkd;
pub mod secret_sharing;
pub mod transcript;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qudit::LevelPair;

pub use backend::Backend;
pub use estimate::{estimate_qber, QberEstimate};
pub use message::{check_message_hygiene, ClassicalMessage, Payload, Phase};
pub use qkd::{run_qkd, CharlieMode, EveBasis, EveStrategy, QkdConfig, SubspacePolicy};
pub use secret_sharing::{reconstruct_alice, run_secret_sharing, SecretSharingConfig};
pub use transcript::{HiddenRecord, ProtocolId, RoundKind, SiftReason, TrialRecord, Transcript, TranscriptStats};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
    Charlie,
}

impl Party {
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
            Party::Charlie => "charlie",
        })
    }
}

impl FromStr for Party {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alice" => Ok(Party::Alice),
            "bob" => Ok(Party::Bob),
            "charlie" => Ok(Party::Charlie),
            _ => Err(Error::Config(format!("unknown party '{s}'"))),
        }
    }
}

/// A party's measurement choice for one round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisChoice {
    Computational,
    Fourier,
    /// `{|i⟩, |j⟩}` restricted to a level pair.
    SubspaceComputational(LevelPair),
    /// `{(|i⟩ ± |j⟩)/√2}` restricted to a level pair.
    SubspaceSuperposition(LevelPair),
}

impl BasisChoice {
    pub fn subspace(self) -> Option<LevelPair> {
        match self {
            BasisChoice::SubspaceComputational(p) | BasisChoice::SubspaceSuperposition(p) => Some(p),
            _ => None,
        }
    }

    /// Same basis family, ignoring the subspace.
    pub fn same_kind(self, other: BasisChoice) -> bool {
        std::mem::discriminant(&self) == std::mem::discriminant(&other)
    }
}

impl fmt::Display for BasisChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisChoice::Computational => f.write_str("computational"),
            BasisChoice::Fourier => f.write_str("fourier"),
            BasisChoice::SubspaceComputational(p) => write!(f, "levels:{p}"),
            BasisChoice::SubspaceSuperposition(p) => write!(f, "superposition:{p}"),
        }
    }
}
