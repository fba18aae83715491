//! Experiment configuration: a TOML file plus command-line overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tripartite_core::engine::{BasisChoice, CharlieMode, EveStrategy, SubspacePolicy};
use tripartite_core::optics::OpticalSetup;
use tripartite_core::par::Execution;

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    #[default]
    SecretSharing,
    Qkd,
    Herald,
    SorterCheck,
    VerifyPaper,
}

impl Protocol {
    pub const ALL: [Protocol; 5] = [
        Protocol::SecretSharing,
        Protocol::Qkd,
        Protocol::Herald,
        Protocol::SorterCheck,
        Protocol::VerifyPaper,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::SecretSharing => "secret-sharing",
            Protocol::Qkd => "qkd",
            Protocol::Herald => "herald",
            Protocol::SorterCheck => "sorter-check",
            Protocol::VerifyPaper => "verify-paper",
        }
    }

    /// Whether the protocol produces a round-by-round transcript.
    pub fn has_transcript(self) -> bool {
        matches!(self, Protocol::SecretSharing | Protocol::Qkd)
    }
}

impl FromStr for Protocol {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown protocol '{s}'")))
    }
}

/// A full basis usable for secret sharing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SharingBasis {
    Computational,
    Fourier,
}

impl From<SharingBasis> for BasisChoice {
    fn from(b: SharingBasis) -> BasisChoice {
        match b {
            SharingBasis::Computational => BasisChoice::Computational,
            SharingBasis::Fourier => BasisChoice::Fourier,
        }
    }
}

/// Parses `computational,fourier` style lists.
pub fn parse_basis_set(s: &str) -> Result<Vec<SharingBasis>, CliError> {
    s.split(',')
        .map(|b| match b.trim() {
            "computational" => Ok(SharingBasis::Computational),
            "fourier" => Ok(SharingBasis::Fourier),
            other => Err(CliError::Usage(format!("unknown basis '{other}'"))),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    #[default]
    Abstract,
    Optical,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub format: Format,
    /// Standard output when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Where to write the full transcript as JSON, if anywhere.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    pub trials: u64,
    pub seed: u64,
    pub basis_set: Vec<SharingBasis>,
    pub subspace_policy: SubspacePolicy,
    /// No eavesdropper when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eve: Option<EveStrategy>,
    pub backend: BackendKind,
    pub execution: Execution,
    /// Fraction of the sifted key compared publicly in key distribution.
    pub sample_fraction: f64,
    pub charlie: CharlieMode,
    /// Defaults apply when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optical: Option<OpticalSetup>,
    pub output: OutputSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            protocol: Protocol::default(),
            trials: 10_000,
            seed: 0,
            basis_set: vec![SharingBasis::Computational, SharingBasis::Fourier],
            subspace_policy: SubspacePolicy::default(),
            eve: None,
            backend: BackendKind::default(),
            execution: Execution::default(),
            sample_fraction: 0.5,
            charlie: CharlieMode::Lost,
            optical: None,
            output: OutputSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn optical_setup(&self) -> OpticalSetup {
        self.optical.clone().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.trials == 0 {
            return usage("trials must be at least 1".into());
        }
        if self.basis_set.is_empty() {
            return usage("basis set is empty".into());
        }
        if self.basis_set.iter().enumerate().any(|(i, b)| self.basis_set[..i].contains(b)) {
            return usage("basis set lists a basis twice".into());
        }
        if self.eve.is_some() && self.protocol != Protocol::Qkd {
            return usage(format!("an eavesdropper applies to qkd, not {}", self.protocol.name()));
        }
        if !(self.sample_fraction > 0.0 && self.sample_fraction < 1.0) {
            return usage(format!("sample fraction {} outside (0, 1)", self.sample_fraction));
        }
        if self.output.format == Format::Csv && !self.protocol.has_transcript() {
            return usage(format!("csv output needs a transcript; {} has none", self.protocol.name()));
        }
        if let CharlieMode::Lossy { loss_probability, .. } = self.charlie {
            if !(0.0..=1.0).contains(&loss_probability) {
                return usage(format!("loss probability {loss_probability} outside [0, 1]"));
            }
        }
        Ok(())
    }
}
