//! OAM relabeling holograms and Dove-prism Mach-Zehnder sorters.
//!
//! A sorter stage whose prisms are rotated by `α/2` imparts a relative phase
//! `θ(l) = l·α` between the arms; with the path difference set so that
//! `θ ≡ 0` exits the even port, `θ ≡ π` exits the odd port. Stages are
//! cascaded as a binary tree: stage `k` sits behind both output ports of
//! stage `k − 1`, and its hologram `Δl` is mounted on the odd port of stage
//! `k − 1` (on the input for the first stage).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qudit::{sample_index, PureState, QuantumState, C64};
use rand::Rng;

const PHASE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SorterStage {
    /// Hologram shift applied before the stage.
    pub delta_l: i32,
    /// Phase per unit of OAM; the prisms are rotated by `alpha / 2`.
    pub alpha: f64,
}

impl SorterStage {
    pub fn new(delta_l: i32, alpha: f64) -> Result<Self> {
        let s = Self { delta_l, alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let half = self.alpha / 2.0;
        if !(half > 0.0 && half <= PI + PHASE_TOL) {
            return Err(Error::OutOfRange(format!("prism angle α/2 = {half} outside (0, π]")));
        }
        Ok(())
    }

    /// 0 for the even port, 1 for the odd port.
    pub fn port_for(&self, l: i64) -> Result<u8> {
        let theta = (l as f64 * self.alpha).rem_euclid(2.0 * PI);
        if theta < PHASE_TOL || 2.0 * PI - theta < PHASE_TOL {
            Ok(0)
        } else if (theta - PI).abs() < PHASE_TOL {
            Ok(1)
        } else {
            Err(Error::ModelLimit(format!(
                "l = {l} acquires phase {theta:.6} under α = {:.6}, not 0 or π",
                self.alpha
            )))
        }
    }
}

/// Parity sorter followed by a half-angle stage behind a `Δl = −1`
/// hologram on the odd port: separates `l = 0, 1, 2` into distinct ports.
pub fn default_cascade() -> Vec<SorterStage> {
    vec![
        SorterStage { delta_l: 0, alpha: PI },
        SorterStage {
            delta_l: -1,
            alpha: PI / 2.0,
        },
    ]
}

/// Relabels `l → l + Δl` on one party. Occupied levels must stay in `0..=l_max`.
pub fn hologram_shift(state: &PureState, party: usize, delta_l: i32, l_max: usize) -> Result<PureState> {
    let dims = state.party_dims();
    if party >= dims.len() {
        return Err(Error::NoSuchParty {
            party,
            parties: dims.len(),
        });
    }
    if dims[party] != l_max + 1 {
        return Err(Error::DimensionMismatch {
            expected: l_max + 1,
            found: dims[party],
        });
    }
    let marginal = party_occupation(state, party);
    let d = l_max + 1;
    let mut shift = nalgebra::DMatrix::<C64>::zeros(d, d);
    for (l, &w) in marginal.iter().enumerate() {
        let target = l as i64 + delta_l as i64;
        if !(0..d as i64).contains(&target) {
            if w > 1e-14 {
                return Err(Error::OutOfRange(format!("l = {l} shifted by {delta_l} leaves 0..={l_max}")));
            }
            continue;
        }
        shift[(target as usize, l)] = C64::new(1.0, 0.0);
    }
    state.apply_local(party, &shift)
}

/// Probability weight on each level of one party.
fn party_occupation(state: &PureState, party: usize) -> Vec<f64> {
    let dims = state.party_dims();
    let mut out = vec![0.0; dims[party]];
    for (i, a) in state.amplitudes().iter().enumerate() {
        out[crate::qudit::layout::digits(i, dims)[party]] += a.norm_sqr();
    }
    out
}

/// Port label (one parity bit per stage) for an OAM eigenstate `l`.
pub fn route_level(l: usize, stages: &[SorterStage], l_max: usize) -> Result<String> {
    let mut current = l as i64;
    let mut label = String::with_capacity(stages.len());
    let mut from_odd = true;
    for stage in stages {
        stage.validate()?;
        if from_odd {
            current += stage.delta_l as i64;
            if !(0..=l_max as i64).contains(&current) {
                return Err(Error::OutOfRange(format!(
                    "l = {l} shifted to {current}, outside 0..={l_max}"
                )));
            }
        }
        let port = stage.port_for(current)?;
        from_odd = port == 1;
        label.push(if from_odd { '1' } else { '0' });
    }
    Ok(label)
}

/// One output port of a sorter cascade.
#[derive(Clone, Debug, PartialEq)]
pub struct PortOutcome {
    pub label: String,
    pub probability: f64,
    /// Collapsed single-photon state in the input OAM labeling.
    pub collapsed: Vec<C64>,
}

/// Routes a single photon (amplitude per `l`) through the cascade. Ports are
/// returned in label order; only ports reached by occupied levels appear.
pub fn sorter_route(amplitudes: &[C64], stages: &[SorterStage]) -> Result<Vec<PortOutcome>> {
    if amplitudes.is_empty() {
        return Err(Error::Empty("photon amplitudes"));
    }
    let l_max = amplitudes.len() - 1;
    let total: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if total <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let mut ports: std::collections::BTreeMap<String, Vec<usize>> = Default::default();
    for (l, a) in amplitudes.iter().enumerate() {
        if a.norm_sqr() <= 1e-14 * total {
            continue;
        }
        ports.entry(route_level(l, stages, l_max)?).or_default().push(l);
    }
    Ok(ports
        .into_iter()
        .map(|(label, levels)| {
            let weight: f64 = levels.iter().map(|&l| amplitudes[l].norm_sqr()).sum();
            let norm = weight.sqrt();
            let collapsed = (0..amplitudes.len())
                .map(|l| if levels.contains(&l) { amplitudes[l] / norm } else { C64::new(0.0, 0.0) })
                .collect();
            PortOutcome {
                label,
                probability: weight / total,
                collapsed,
            }
        })
        .collect())
}

/// Draws one port from [`sorter_route`].
pub fn sample_port<R: Rng + ?Sized>(outcomes: &[PortOutcome], rng: &mut R) -> usize {
    let w: Vec<f64> = outcomes.iter().map(|o| o.probability).collect();
    sample_index(&w, rng)
}

/// Port label of every level `0..=l_max`; fails if any level cannot be routed.
pub fn routing_table(stages: &[SorterStage], l_max: usize) -> Result<Vec<String>> {
    (0..=l_max).map(|l| route_level(l, stages, l_max)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eigen(l: usize, d: usize) -> Vec<C64> {
        (0..d).map(|k| C64::new(if k == l { 1.0 } else { 0.0 }, 0.0)).collect()
    }

    #[test]
    fn parity_stage() {
        let stage = [SorterStage::new(0, PI).unwrap()];
        let even = sorter_route(&eigen(2, 3), &stage).unwrap();
        assert_eq!(even.len(), 1);
        assert_eq!(even[0].label, "0");
        assert!((even[0].probability - 1.0).abs() < 1e-12);
        let odd = sorter_route(&eigen(1, 3), &stage).unwrap();
        assert_eq!(odd[0].label, "1");
    }

    #[test]
    fn equal_superposition_splits_evenly() {
        let h = C64::new(1.0 / 2f64.sqrt(), 0.0);
        let out = sorter_route(&[h, h, C64::new(0.0, 0.0)], &[SorterStage::new(0, PI).unwrap()]).unwrap();
        assert_eq!(out.len(), 2);
        for p in &out {
            assert!((p.probability - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn default_cascade_separates_three_levels() {
        let table = routing_table(&default_cascade(), 2).unwrap();
        assert_eq!(table, vec!["00", "10", "01"]);
    }

    #[test]
    fn half_angle_on_odd_level_is_model_limit() {
        let stages = [SorterStage::new(0, PI / 2.0).unwrap()];
        assert!(matches!(sorter_route(&eigen(1, 3), &stages), Err(Error::ModelLimit(_))));
        // Unoccupied levels are not routed.
        assert!(sorter_route(&eigen(2, 3), &stages).is_ok());
    }

    #[test]
    fn stage_angle_range() {
        assert!(SorterStage::new(0, 0.0).is_err());
        assert!(SorterStage::new(0, 2.0 * PI).is_ok());
        assert!(SorterStage::new(0, 2.5 * PI).is_err());
    }

    #[test]
    fn hologram_shifts() {
        let s = PureState::basis_ket(vec![3], &[2]).unwrap();
        let t = hologram_shift(&s, 0, -2, 2).unwrap();
        assert_eq!(t.amplitude(&[0]), C64::new(1.0, 0.0));
        assert_eq!(hologram_shift(&s, 0, 0, 2).unwrap(), s);
        assert!(hologram_shift(&s, 0, 1, 2).is_err());
        assert!(hologram_shift(&s, 1, 0, 2).is_err());
    }
}
