//! Two-party key distribution on the state Alice and Bob are left with
//! after Charlie's particle is lost.
//!
//! Each round unravels the reduced state: Charlie's lost particle is
//! measured in the level basis without anyone seeing the result, which
//! leaves Alice and Bob in one of the three symmetric pairs with
//! probability 1/3 each. Averaged over that hidden outcome this is exactly
//! the traced-out state, and it records which component the round used.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::message::{ClassicalMessage, Payload};
use super::secret_sharing::sharing_round;
use super::transcript::{EveRecord, HiddenRecord, ProtocolId, RoundKind, SiftReason, TrialRecord, Transcript};
use super::{Backend, BasisChoice, Party};
use crate::error::{Error, Result};
use crate::par::{map_trials, Execution};
use crate::qudit::{fourier_basis, QuantumState, measure_party, subspace_measure, Basis, LevelPair, PureState, SubspaceMeasurement};
use crate::rng::trial_rng;
use crate::states::symmetric_state;

/// How Alice and Bob choose the two-level subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SubspacePolicy {
    Fixed(LevelPair),
    /// Each party independently picks one of the three pairs.
    Random,
}

impl Default for SubspacePolicy {
    fn default() -> Self {
        SubspacePolicy::Fixed(LevelPair::qutrit_pairs()[0])
    }
}

impl fmt::Display for SubspacePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubspacePolicy::Fixed(p) => write!(f, "fixed:{p}"),
            SubspacePolicy::Random => f.write_str("random"),
        }
    }
}

pub(crate) fn parse_pair(s: &str) -> Result<LevelPair> {
    let bad = || Error::Config(format!("expected a level pair 'i,j', got '{s}'"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > 2 || b > 2 {
        return Err(Error::Config(format!("level pair '{s}' outside 0..=2")));
    }
    LevelPair::new(a, b).map_err(|e| Error::Config(e.to_string()))
}

impl FromStr for SubspacePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(SubspacePolicy::Random),
            _ => match s.strip_prefix("fixed:") {
                Some(pair) => Ok(SubspacePolicy::Fixed(parse_pair(pair)?)),
                None => Err(Error::Config(format!("unknown subspace policy '{s}'"))),
            },
        }
    }
}

impl TryFrom<String> for SubspacePolicy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SubspacePolicy> for String {
    fn from(p: SubspacePolicy) -> String {
        p.to_string()
    }
}

/// A basis Eve may intercept in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EveBasis {
    /// The level basis of the active subspace, completed by the third level.
    SubspaceComputational,
    /// The `±` basis of the active subspace, completed by the third level.
    SubspaceSuperposition,
    Computational,
    Fourier,
}

impl EveBasis {
    fn name(self) -> &'static str {
        match self {
            EveBasis::SubspaceComputational => "levels",
            EveBasis::SubspaceSuperposition => "superposition",
            EveBasis::Computational => "computational",
            EveBasis::Fourier => "fourier",
        }
    }

    fn from_name(s: &str) -> Result<Self> {
        [
            EveBasis::SubspaceComputational,
            EveBasis::SubspaceSuperposition,
            EveBasis::Computational,
            EveBasis::Fourier,
        ]
        .into_iter()
        .find(|b| b.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown Eve basis '{s}'")))
    }
}

const SUBSPACE_SET: [EveBasis; 2] = [EveBasis::SubspaceComputational, EveBasis::SubspaceSuperposition];
const FULL_SET: [EveBasis; 2] = [EveBasis::Computational, EveBasis::Fourier];

/// Intercept-resend: Eve measures the target particle projectively in a
/// basis drawn uniformly from `bases` and forwards the eigenstate she found.
///
/// Text form: `intercept:<party>:<policy>` where the policy is `subspace`,
/// `full`, or a comma list of `levels`, `superposition`, `computational`,
/// `fourier`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EveStrategy {
    pub target: Party,
    pub bases: Vec<EveBasis>,
}

impl EveStrategy {
    pub fn new(target: Party, bases: Vec<EveBasis>) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::Empty("Eve basis set"));
        }
        for (i, b) in bases.iter().enumerate() {
            if bases[..i].contains(b) {
                return Err(Error::Config(format!("Eve basis '{}' listed twice", b.name())));
            }
        }
        Ok(Self { target, bases })
    }

    /// Random choice between the two bases of the active subspace.
    pub fn subspace(target: Party) -> Self {
        Self {
            target,
            bases: SUBSPACE_SET.to_vec(),
        }
    }

    /// Random choice between the full level and Fourier bases.
    pub fn full(target: Party) -> Self {
        Self {
            target,
            bases: FULL_SET.to_vec(),
        }
    }
}

impl fmt::Display for EveStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "intercept:{}:", self.target)?;
        if self.bases == SUBSPACE_SET {
            f.write_str("subspace")
        } else if self.bases == FULL_SET {
            f.write_str("full")
        } else {
            let names: Vec<&str> = self.bases.iter().map(|b| b.name()).collect();
            f.write_str(&names.join(","))
        }
    }
}

impl FromStr for EveStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rest = s
            .strip_prefix("intercept:")
            .ok_or_else(|| Error::Config(format!("Eve spec must start with 'intercept:', got '{s}'")))?;
        let (party, policy) = rest
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("Eve spec '{s}' lacks a basis policy")))?;
        let target: Party = party.parse()?;
        let bases = match policy {
            "subspace" => SUBSPACE_SET.to_vec(),
            "full" => FULL_SET.to_vec(),
            list => list.split(',').map(EveBasis::from_name).collect::<Result<_>>()?,
        };
        Self::new(target, bases)
    }
}

impl TryFrom<String> for EveStrategy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<EveStrategy> for String {
    fn from(e: EveStrategy) -> String {
        e.to_string()
    }
}

/// What happens to Charlie's particle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum CharlieMode {
    /// Lost in every round.
    #[default]
    Lost,
    /// Lost with the given probability per round. When Charlie keeps his
    /// particle and `survivors_share` is set, the round runs secret sharing
    /// instead; otherwise Charlie ignores it and the round is a QKD round.
    Lossy { loss_probability: f64, survivors_share: bool },
}


#[derive(Clone, Debug, PartialEq)]
pub struct QkdConfig {
    pub trials: u64,
    pub seed: u64,
    pub subspace_policy: SubspacePolicy,
    pub eve: Option<EveStrategy>,
    pub charlie: CharlieMode,
    /// Measurement backend for secret-sharing rounds in lossy mode.
    pub backend: Backend,
    pub execution: Execution,
}

impl Default for QkdConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: 0,
            subspace_policy: SubspacePolicy::default(),
            eve: None,
            charlie: CharlieMode::Lost,
            backend: Backend::Abstract,
            execution: Execution::default(),
        }
    }
}

impl QkdConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::OutOfRange("trials must be at least 1".into()));
        }
        if let SubspacePolicy::Fixed(p) = self.subspace_policy {
            if p.levels().1 > 2 {
                return Err(Error::Config(format!("subspace {p} outside 0..=2")));
            }
        }
        if let Some(eve) = &self.eve {
            if eve.target == Party::Charlie {
                return Err(Error::Config("Eve can only target Alice or Bob in key distribution".into()));
            }
            EveStrategy::new(eve.target, eve.bases.clone())?;
        }
        if let CharlieMode::Lossy { loss_probability, .. } = self.charlie {
            if !(0.0..=1.0).contains(&loss_probability) {
                return Err(Error::OutOfRange(format!("loss probability {loss_probability} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

fn pick_pair<R: Rng + ?Sized>(policy: SubspacePolicy, rng: &mut R) -> LevelPair {
    match policy {
        SubspacePolicy::Fixed(p) => p,
        SubspacePolicy::Random => LevelPair::qutrit_pairs()[rng.random_range(0..3)],
    }
}

fn pick_basis<R: Rng + ?Sized>(pair: LevelPair, rng: &mut R) -> BasisChoice {
    if rng.random_bool(0.5) {
        BasisChoice::SubspaceComputational(pair)
    } else {
        BasisChoice::SubspaceSuperposition(pair)
    }
}

fn subspace_measurement(choice: BasisChoice) -> Result<SubspaceMeasurement> {
    match choice {
        BasisChoice::SubspaceComputational(p) => SubspaceMeasurement::levels(3, p),
        BasisChoice::SubspaceSuperposition(p) => SubspaceMeasurement::superposition(3, p),
        other => Err(Error::Config(format!("{other} is not a subspace basis"))),
    }
}

/// Eve's concrete basis for this round. Subspace bases refer to the active
/// pair under a fixed policy; under a random policy she has to guess it.
fn eve_basis<R: Rng + ?Sized>(eve: &EveStrategy, policy: SubspacePolicy, rng: &mut R) -> Result<(BasisChoice, Basis)> {
    let kind = eve.bases[rng.random_range(0..eve.bases.len())];
    Ok(match kind {
        EveBasis::SubspaceComputational | EveBasis::SubspaceSuperposition => {
            let pair = pick_pair(policy, rng);
            let choice = if kind == EveBasis::SubspaceComputational {
                BasisChoice::SubspaceComputational(pair)
            } else {
                BasisChoice::SubspaceSuperposition(pair)
            };
            (choice, subspace_measurement(choice)?.completed_basis())
        }
        EveBasis::Computational => (BasisChoice::Computational, Basis::computational(3)),
        EveBasis::Fourier => (BasisChoice::Fourier, fourier_basis(3)?),
    })
}

fn qkd_round<R: Rng + ?Sized>(
    trial: u64,
    psi: &PureState,
    config: &QkdConfig,
    charlie_lost: bool,
    rng: &mut R,
) -> Result<TrialRecord> {
    let levels = Basis::computational(3);
    let (c, collapsed) = measure_party(psi, 2, &levels, rng)?;
    let mut ab = collapsed.project_out(2, levels.vector(c))?.renormalized()?;
    let others: Vec<usize> = (0..3).filter(|&l| l != c).collect();
    let latent_branch = Some(LevelPair::new(others[0], others[1])?);

    let pairs = [pick_pair(config.subspace_policy, rng), pick_pair(config.subspace_policy, rng)];
    let bases = [pick_basis(pairs[0], rng), pick_basis(pairs[1], rng)];

    let mut eve_record = None;
    if let Some(eve) = &config.eve {
        let (choice, basis) = eve_basis(eve, config.subspace_policy, rng)?;
        let (m, post) = measure_party(&ab, eve.target.index(), &basis, rng)?;
        ab = post;
        eve_record = Some(EveRecord {
            target: eve.target,
            basis: choice,
            outcome: m as u8,
        });
    }

    let mut clicks = Vec::with_capacity(2);
    let mut outcomes = Vec::with_capacity(2);
    for (k, &b) in bases.iter().enumerate() {
        let out = subspace_measure(&ab, k, &subspace_measurement(b)?, rng)?;
        clicks.push(out.click);
        outcomes.push(out.outcome.map(|m| m as u8));
        ab = out.state;
    }

    let mut messages = Vec::with_capacity(6);
    for (k, p) in [Party::Alice, Party::Bob].into_iter().enumerate() {
        messages.push(ClassicalMessage::announce(p, trial, Payload::Basis(bases[k])));
        messages.push(ClassicalMessage::announce(p, trial, Payload::Subspace(pairs[k])));
        messages.push(ClassicalMessage::announce(p, trial, Payload::Click(clicks[k])));
    }

    let reason = if !bases[0].same_kind(bases[1]) {
        SiftReason::BasisMismatch
    } else if pairs[0] != pairs[1] {
        SiftReason::SubspaceMismatch
    } else if !(clicks[0] && clicks[1]) {
        SiftReason::MissingClick
    } else {
        SiftReason::None
    };

    Ok(TrialRecord {
        trial,
        kind: RoundKind::Qkd,
        bases: bases.to_vec(),
        clicks,
        outcomes,
        sifted: reason == SiftReason::None,
        reason,
        hidden: HiddenRecord {
            charlie_lost,
            latent_branch,
            eve: eve_record,
        },
        messages,
    })
}

/// Runs the key-distribution protocol. Alice and Bob each choose a subspace
/// (per the policy) and one of its two bases, measure, and announce basis,
/// subspace and click. A round is kept only if the bases match, then the
/// subspaces, then both clicked, checked in that order.
pub fn run_qkd(config: &QkdConfig) -> Result<Transcript> {
    config.validate()?;
    let psi = symmetric_state(3)?.into_state();
    let sharing_bases = [BasisChoice::Computational, BasisChoice::Fourier];
    let projectors = match config.charlie {
        CharlieMode::Lossy { survivors_share: true, .. } => Some(config.backend.projector_sets()?),
        _ => None,
    };
    let records = map_trials(config.trials, config.execution, |t| {
        let mut rng = trial_rng(config.seed, t);
        let lost = match config.charlie {
            CharlieMode::Lost => true,
            CharlieMode::Lossy { loss_probability, .. } => rng.random::<f64>() < loss_probability,
        };
        match (&projectors, lost) {
            (Some(proj), false) => sharing_round(t, &psi, &sharing_bases, proj, HiddenRecord::default(), &mut rng),
            _ => qkd_round(t, &psi, config, lost, &mut rng),
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(Transcript::new(config.seed, ProtocolId::Qkd, records))
}
