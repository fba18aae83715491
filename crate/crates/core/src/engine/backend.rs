//! Measurement backends for full-dimensional rounds.

use nalgebra::DMatrix;

use super::BasisChoice;
use crate::error::{Error, Result};
use crate::optics::{OpticalDetector, OpticalSetup};
use crate::qudit::{fourier_basis, Basis, C64};

/// How a party realizes the computational and Fourier measurements.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum Backend {
    /// Ideal projective measurement in the abstract basis.
    #[default]
    Abstract,
    /// Sorter cascade for levels, sorter + three-port interferometer for
    /// superpositions.
    Optical(OpticalDetector),
}

impl Backend {
    pub fn optical(setup: &OpticalSetup) -> Result<Self> {
        Ok(Backend::Optical(setup.detector()?))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Abstract => "abstract",
            Backend::Optical(_) => "optical",
        }
    }

    pub(crate) fn projector_sets(&self) -> Result<ProjectorSets> {
        let basis_projectors = |b: &Basis| (0..b.dim()).map(|m| b.projector(m)).collect::<Vec<_>>();
        Ok(match self {
            Backend::Abstract => ProjectorSets {
                computational: basis_projectors(&Basis::computational(3)),
                fourier: basis_projectors(&fourier_basis(3)?),
            },
            Backend::Optical(det) => ProjectorSets {
                computational: det.level_projectors(),
                fourier: det.superposition_projectors()?,
            },
        })
    }
}

/// Qutrit projectors for the two full bases, built once per run.
pub(crate) struct ProjectorSets {
    computational: Vec<DMatrix<C64>>,
    fourier: Vec<DMatrix<C64>>,
}

impl ProjectorSets {
    pub(crate) fn get(&self, choice: BasisChoice) -> Result<&[DMatrix<C64>]> {
        match choice {
            BasisChoice::Computational => Ok(&self.computational),
            BasisChoice::Fourier => Ok(&self.fourier),
            other => Err(Error::Config(format!("{other} is not a full-dimensional basis"))),
        }
    }
}
