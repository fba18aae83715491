//! Entangled photon-pair sources `Σ_l c_l |l, l⟩`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qudit::{PureState, C64, TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    amplitudes: Vec<C64>,
}

impl Default for SourceSpec {
    /// Uniform over `l = 0, 1, 2`.
    fn default() -> Self {
        Self::uniform(3).expect("nonzero dimension")
    }
}

impl SourceSpec {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Empty("source amplitudes"));
        }
        let n: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (n - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { amplitudes })
    }

    pub fn uniform(d: usize) -> Result<Self> {
        let a = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        Self::new(vec![a; d])
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitude(&self, l: usize) -> C64 {
        self.amplitudes.get(l).copied().unwrap_or_default()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }
}

/// Two-photon state emitted by one source, ordered (partner, coupler-bound).
pub fn source_state(spec: &SourceSpec) -> PureState {
    let d = spec.dim();
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for (l, &c) in spec.amplitudes().iter().enumerate() {
        amps[l * d + l] = c;
    }
    PureState::new(vec![d, d], amps).expect("validated source")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::{partial_trace, QuantumState};

    #[test]
    fn default_source() {
        let s = source_state(&SourceSpec::default());
        let a = 1.0 / 3f64.sqrt();
        for l in 0..3 {
            assert!((s.amplitude(&[l, l]).re - a).abs() < 1e-12);
        }
        assert!(s.is_normalized());
    }

    #[test]
    fn single_level_source_is_product() {
        let spec = SourceSpec::new(vec![C64::new(1.0, 0.0)]).unwrap();
        let s = source_state(&spec);
        assert_eq!(s.party_dims(), &[1, 1]);
        assert_eq!(s.amplitude(&[0, 0]), C64::new(1.0, 0.0));
    }

    #[test]
    fn source_marginal_is_maximally_mixed() {
        let rho = partial_trace(&source_state(&SourceSpec::default()), &[0]).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let t = if r == c { 1.0 / 3.0 } else { 0.0 };
                assert!((rho.matrix()[(r, c)] - C64::new(t, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn unnormalized_source_rejected() {
        assert!(SourceSpec::new(vec![C64::new(1.0, 0.0); 2]).is_err());
    }
}
