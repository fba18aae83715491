//! Three-party secret sharing on the symmetric three-qutrit state.

use std::sync::OnceLock;

use rand::Rng;

use super::backend::ProjectorSets;
use super::message::{ClassicalMessage, Payload};
use super::transcript::{HiddenRecord, ProtocolId, RoundKind, SiftReason, TrialRecord, Transcript};
use super::{Backend, BasisChoice, Party};
use crate::error::{Error, Result};
use crate::par::{map_trials, Execution};
use crate::qudit::{fourier_basis, measure_projective, PureState};
use crate::rng::trial_rng;
use crate::states::{correlation_table, symmetric_state, CorrelationTable};

#[derive(Clone, Debug, PartialEq)]
pub struct SecretSharingConfig {
    pub trials: u64,
    pub seed: u64,
    /// Bases each party picks from uniformly; Computational and/or Fourier.
    pub basis_set: Vec<BasisChoice>,
    pub backend: Backend,
    pub execution: Execution,
}

impl Default for SecretSharingConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: 0,
            basis_set: vec![BasisChoice::Computational, BasisChoice::Fourier],
            backend: Backend::Abstract,
            execution: Execution::default(),
        }
    }
}

pub(crate) fn validate_basis_set(set: &[BasisChoice]) -> Result<()> {
    if set.is_empty() {
        return Err(Error::Empty("basis set"));
    }
    for (i, b) in set.iter().enumerate() {
        if !matches!(b, BasisChoice::Computational | BasisChoice::Fourier) {
            return Err(Error::Config(format!("secret sharing uses full bases only, got {b}")));
        }
        if set[..i].contains(b) {
            return Err(Error::Config(format!("basis {b} listed twice")));
        }
    }
    Ok(())
}

fn fourier_table() -> &'static CorrelationTable {
    static TABLE: OnceLock<CorrelationTable> = OnceLock::new();
    TABLE.get_or_init(|| correlation_table(&fourier_basis(3).expect("d = 3")).expect("Fourier table is reconstructible"))
}

/// Alice's outcome from Bob's and Charlie's in a sifted round.
pub fn reconstruct_alice(bob: u8, charlie: u8, basis: BasisChoice) -> Result<u8> {
    let impossible = || Error::InvalidRecord(format!("({bob}, {charlie}) cannot occur in the {basis} basis"));
    match basis {
        BasisChoice::Computational => {
            if bob == charlie || bob > 2 || charlie > 2 {
                return Err(impossible());
            }
            Ok(3 - bob - charlie)
        }
        BasisChoice::Fourier => fourier_table()
            .alice_for(bob as usize, charlie as usize)
            .map(|a| a as u8)
            .ok_or_else(impossible),
        _ => Err(Error::Config(format!("{basis} is not a secret-sharing basis"))),
    }
}

/// One secret-sharing round on a fresh copy of `psi`, drawing from `rng`.
pub(crate) fn sharing_round<R: Rng + ?Sized>(
    trial: u64,
    psi: &PureState,
    basis_set: &[BasisChoice],
    projectors: &ProjectorSets,
    hidden: HiddenRecord,
    rng: &mut R,
) -> Result<TrialRecord> {
    let parties = [Party::Alice, Party::Bob, Party::Charlie];
    let bases: Vec<BasisChoice> = parties
        .iter()
        .map(|_| basis_set[rng.random_range(0..basis_set.len())])
        .collect();
    let mut state = psi.clone();
    let mut outcomes = Vec::with_capacity(3);
    for (k, &b) in bases.iter().enumerate() {
        let (m, next) = measure_projective(&state, k, projectors.get(b)?, rng)?;
        outcomes.push(Some(m as u8));
        state = next;
    }
    let mut messages: Vec<ClassicalMessage> = parties
        .iter()
        .zip(&bases)
        .map(|(&p, &b)| ClassicalMessage::announce(p, trial, Payload::Basis(b)))
        .collect();
    let sifted = bases.iter().all(|b| *b == bases[0]);
    if sifted {
        for k in [1, 2] {
            messages.push(ClassicalMessage::share(parties[k], trial, outcomes[k].expect("measured")));
        }
    }
    Ok(TrialRecord {
        trial,
        kind: RoundKind::SecretSharing,
        bases,
        clicks: vec![true; 3],
        outcomes,
        sifted,
        reason: if sifted { SiftReason::None } else { SiftReason::BasisMismatch },
        hidden,
        messages,
    })
}

/// Each party picks a basis uniformly from the set and measures, in the
/// order Alice, Bob, Charlie. Rounds where all three bases agree are kept
/// and Bob and Charlie exchange their outcomes.
pub fn run_secret_sharing(config: &SecretSharingConfig) -> Result<Transcript> {
    if config.trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    validate_basis_set(&config.basis_set)?;
    let psi = symmetric_state(3)?.into_state();
    let projectors = config.backend.projector_sets()?;
    let records = map_trials(config.trials, config.execution, |t| {
        let mut rng = trial_rng(config.seed, t);
        sharing_round(t, &psi, &config.basis_set, &projectors, HiddenRecord::default(), &mut rng)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(Transcript::new(config.seed, ProtocolId::SecretSharing, records))
}
