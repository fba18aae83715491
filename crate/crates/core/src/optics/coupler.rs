//! Heralded generation: one photon of each source enters a multiport
//! coupler; each output port is followed by a detector that only fires for
//! a fixed OAM value. A full coincidence projects the partner photons onto
//! the permutation-symmetric state, up to coupler phases.

use std::f64::consts::PI;

use itertools::Itertools;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::source::SourceSpec;
use crate::error::{Error, Result};
use crate::qudit::{layout, PureState, QuantumState, C64, TOL};

/// `U[(j, k)]` is the amplitude for a photon entering input `k` to leave port `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplerUnitary {
    matrix: DMatrix<C64>,
}

impl CouplerUnitary {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let n = matrix.nrows();
        let dev = (&matrix * matrix.adjoint() - DMatrix::<C64>::identity(n, n))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if dev > TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { matrix })
    }

    /// Symmetric multiport `ω^{jk}/√n`.
    pub fn dft(n: usize) -> Self {
        let s = 1.0 / (n as f64).sqrt();
        Self {
            matrix: DMatrix::from_fn(n, n, |j, k| C64::from_polar(s, 2.0 * PI * ((j * k) % n) as f64 / n as f64)),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn ports(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn entry(&self, port: usize, input: usize) -> C64 {
        self.matrix[(port, input)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }
}

/// Port `j` detector fires only for OAM value `port_levels[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorAssignment {
    port_levels: Vec<usize>,
}

impl DetectorAssignment {
    pub fn new(port_levels: Vec<usize>) -> Result<Self> {
        if port_levels.is_empty() {
            return Err(Error::Empty("detector assignment"));
        }
        if !port_levels.iter().all_unique() {
            return Err(Error::OutOfRange(format!("duplicate detector levels {port_levels:?}")));
        }
        Ok(Self { port_levels })
    }

    /// Port `j` ↦ level `j`, as set by the diffraction order of the hologram.
    pub fn diffraction_orders(n: usize) -> Self {
        Self {
            port_levels: (0..n).collect(),
        }
    }

    pub fn port_levels(&self) -> &[usize] {
        &self.port_levels
    }

    pub fn port_for(&self, level: usize) -> Option<usize> {
        self.port_levels.iter().position(|&l| l == level)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeraldResult {
    /// Normalized conditional state of the undetected partner photons.
    pub state: PureState,
    /// Probability of a full coincidence.
    pub success_probability: f64,
}

/// Heralded state with the default sources (uniform over `l = 0, 1, 2`).
pub fn herald_tripartite(coupler: &CouplerUnitary, assign: &DetectorAssignment) -> Result<HeraldResult> {
    herald(coupler, assign, &SourceSpec::default())
}

/// Conditional partner state after every detector fires once.
///
/// Each photon keeps its OAM through the coupler, so the coincidence with
/// partner ket `|m_0 … m_{n−1}⟩` requires the `m_k` to be a permutation of the
/// detector levels; the photon from source `k` must then exit port `σ(k)`
/// with `l_{σ(k)} = m_k`. Different `σ` are distinguishable by OAM and do
/// not interfere.
pub fn herald(coupler: &CouplerUnitary, assign: &DetectorAssignment, source: &SourceSpec) -> Result<HeraldResult> {
    let n = coupler.ports();
    if assign.port_levels().len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: assign.port_levels().len(),
        });
    }
    // Revalidate in case the assignment was deserialized.
    let assign = DetectorAssignment::new(assign.port_levels().to_vec())?;
    let coupler = CouplerUnitary::new(coupler.matrix().clone())?;
    let d = source.dim();
    let dims = vec![d; n];
    let mut amps = vec![C64::new(0.0, 0.0); layout::total_dim(&dims)];
    for ports in (0..n).permutations(n) {
        let levels: Vec<usize> = ports.iter().map(|&j| assign.port_levels()[j]).collect();
        if levels.iter().any(|&l| l >= d) {
            continue;
        }
        let amp = ports
            .iter()
            .enumerate()
            .fold(C64::new(1.0, 0.0), |acc, (k, &j)| {
                acc * source.amplitude(levels[k]) * coupler.entry(j, k)
            });
        amps[layout::flat_index(&levels, &dims)] += amp;
    }
    let raw = PureState::new(dims, amps)?;
    let success_probability = raw.norm_squared();
    if success_probability <= 0.0 {
        return Err(Error::ZeroProbabilityProjection);
    }
    Ok(HeraldResult {
        state: raw.renormalized()?,
        success_probability,
    })
}
