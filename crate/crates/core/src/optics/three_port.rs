//! Three-port interferometer resolving the superposition basis.

use nalgebra::DVector;

use super::coupler::CouplerUnitary;
use crate::error::{Error, Result};
use crate::qudit::C64;

/// Port probabilities for a single photon over `l ∈ {0, 1, 2}`, after the
/// holograms have mapped all sorted paths onto the same OAM value. The
/// interferometer is the inverse symmetric tritter, so port `m` projects on
/// the `m`-th Fourier vector.
pub fn fourier_three_port(psi: &[C64]) -> Result<[f64; 3]> {
    if psi.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: psi.len(),
        });
    }
    let out = three_port_interferometer().matrix() * DVector::from_column_slice(psi);
    let total: f64 = out.iter().map(|a| a.norm_sqr()).sum();
    if total <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok([0, 1, 2].map(|m| out[m].norm_sqr() / total))
}

pub fn three_port_interferometer() -> CouplerUnitary {
    CouplerUnitary::dft(3).adjoint()
}
