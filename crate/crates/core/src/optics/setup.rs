//! Declarative optical setup and the measurement chain it implies.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::coupler::{CouplerUnitary, DetectorAssignment};
use super::sorter::{routing_table, SorterStage};
use super::source::SourceSpec;
use super::three_port::three_port_interferometer;
use crate::error::{Error, Result};
use crate::qudit::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CouplerSpec {
    Dft,
    Identity,
    /// Row-major entries as `[re, im]` pairs.
    Matrix { rows: Vec<Vec<[f64; 2]>> },
}

/// Sources, coupler, detector ports and sorter stages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpticalSetup {
    /// Per-level source amplitudes as `[re, im]`; empty means uniform over `0..=l_max`.
    pub source: Vec<[f64; 2]>,
    pub coupler: CouplerSpec,
    /// OAM value each detector port requires.
    pub ports: Vec<usize>,
    /// Sorter cascade as `(Δl, α)` pairs.
    pub stages: Vec<(i32, f64)>,
    pub l_max: usize,
}

impl Default for OpticalSetup {
    fn default() -> Self {
        Self {
            source: Vec::new(),
            coupler: CouplerSpec::Dft,
            ports: vec![0, 1, 2],
            stages: vec![(0, PI), (-1, PI / 2.0)],
            l_max: 2,
        }
    }
}

impl OpticalSetup {
    pub fn source_spec(&self) -> Result<SourceSpec> {
        if self.source.is_empty() {
            SourceSpec::uniform(self.l_max + 1)
        } else {
            SourceSpec::new(self.source.iter().map(|&[re, im]| C64::new(re, im)).collect())
        }
    }

    pub fn coupler(&self) -> Result<CouplerUnitary> {
        let n = self.ports.len();
        match &self.coupler {
            CouplerSpec::Dft => Ok(CouplerUnitary::dft(n)),
            CouplerSpec::Identity => Ok(CouplerUnitary::identity(n)),
            CouplerSpec::Matrix { rows } => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Config(format!("coupler matrix must be {n}x{n}")));
                }
                CouplerUnitary::new(DMatrix::from_fn(n, n, |j, k| {
                    let [re, im] = rows[j][k];
                    C64::new(re, im)
                }))
            }
        }
    }

    pub fn assignment(&self) -> Result<DetectorAssignment> {
        DetectorAssignment::new(self.ports.clone())
    }

    pub fn sorter_stages(&self) -> Result<Vec<SorterStage>> {
        self.stages.iter().map(|&(dl, a)| SorterStage::new(dl, a)).collect()
    }

    pub fn detector(&self) -> Result<OpticalDetector> {
        OpticalDetector::new(self.sorter_stages()?, self.l_max)
    }
}

/// Measurement chain for one photon: a sorter cascade resolving every level
/// into its own port, optionally followed by path-equalizing holograms and
/// the three-port interferometer.
#[derive(Clone, Debug, PartialEq)]
pub struct OpticalDetector {
    stages: Vec<SorterStage>,
    /// `path_of_level[l]` is the sorted-port index that level `l` exits.
    path_of_level: Vec<usize>,
}

impl OpticalDetector {
    pub fn new(stages: Vec<SorterStage>, l_max: usize) -> Result<Self> {
        let table = routing_table(&stages, l_max)?;
        let mut labels = table.clone();
        labels.sort();
        labels.dedup();
        if labels.len() != table.len() {
            return Err(Error::ModelLimit(format!(
                "cascade does not resolve every level into its own port: {table:?}"
            )));
        }
        let path_of_level = table
            .iter()
            .map(|l| labels.binary_search(l).expect("label present"))
            .collect();
        Ok(Self { stages, path_of_level })
    }

    pub fn dim(&self) -> usize {
        self.path_of_level.len()
    }

    pub fn stages(&self) -> &[SorterStage] {
        &self.stages
    }

    /// Level → path permutation implemented by the sorter.
    fn sorting_matrix(&self) -> DMatrix<C64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |path, l| {
            if self.path_of_level[l] == path {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Projectors for "the photon exits the port of level `l`", indexed by `l`.
    pub fn level_projectors(&self) -> Vec<DMatrix<C64>> {
        let sort = self.sorting_matrix();
        (0..self.dim())
            .map(|l| {
                let path = self.path_of_level[l];
                let mut p = DMatrix::zeros(self.dim(), self.dim());
                p[(path, path)] = C64::new(1.0, 0.0);
                sort.adjoint() * p * &sort
            })
            .collect()
    }

    /// Projectors for the interferometer output ports. The path lengths are
    /// set to undo the sorter's permutation before the tritter, so the whole
    /// chain equals the inverse tritter acting on the level amplitudes.
    pub fn superposition_projectors(&self) -> Result<Vec<DMatrix<C64>>> {
        if self.dim() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: self.dim(),
            });
        }
        let sort = self.sorting_matrix();
        let chain = three_port_interferometer().matrix() * sort.transpose() * &sort;
        Ok((0..3)
            .map(|m| {
                let row = chain.row(m);
                row.adjoint() * row
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::fourier_basis;

    #[test]
    fn default_setup_builds() {
        let s = OpticalSetup::default();
        s.coupler().unwrap();
        s.assignment().unwrap();
        let det = s.detector().unwrap();
        assert_eq!(det.dim(), 3);
    }

    #[test]
    fn chain_projectors_match_fourier_projectors() {
        let det = OpticalSetup::default().detector().unwrap();
        let u = fourier_basis(3).unwrap();
        for (m, p) in det.superposition_projectors().unwrap().iter().enumerate() {
            assert!((p - u.projector(m)).iter().all(|c| c.norm() < 1e-12));
        }
    }

    #[test]
    fn single_parity_stage_cannot_resolve_three_levels() {
        assert!(OpticalDetector::new(vec![SorterStage::new(0, PI).unwrap()], 2).is_err());
    }

    #[test]
    fn matrix_coupler_size_checked() {
        let s = OpticalSetup {
            coupler: CouplerSpec::Matrix {
                rows: vec![vec![[1.0, 0.0]]],
            },
            ..OpticalSetup::default()
        };
        assert!(s.coupler().is_err());
    }
}
