//! The permutation-symmetric N-level N-party state, its two-party
//! symmetric Bell components, and the exact correlation structure the
//! protocols rely on.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use itertools::Itertools;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qudit::{born_probabilities, fourier_basis, layout, Basis, PureState, QuantumState, C64};

/// Largest supported party count; the state has `n^n` amplitudes.
pub const MAX_PARTIES: usize = 6;

/// Probabilities at or below this are treated as structural zeros.
const ZERO: f64 = 1e-12;

/// `(1/√n!) Σ_σ |σ(0), …, σ(n−1)⟩` over all permutations of the `n` levels.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricState {
    n: usize,
    state: PureState,
}

impl SymmetricState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn into_state(self) -> PureState {
        self.state
    }

    /// Exactly `n!` nonzero amplitudes, all equal to `1/√n!`, on the
    /// permutation kets.
    pub fn check_support(&self) -> Result<()> {
        let factorial: usize = (1..=self.n).product();
        let expected = 1.0 / (factorial as f64).sqrt();
        let mut count = 0;
        for (i, a) in self.state.amplitudes().iter().enumerate() {
            let levels = layout::digits(i, self.state.party_dims());
            if is_permutation(&levels) {
                count += 1;
                if (a - C64::new(expected, 0.0)).norm() > 1e-12 {
                    return Err(Error::OutOfRange(format!("amplitude {a} at {levels:?}")));
                }
            } else if a.norm() > 1e-12 {
                return Err(Error::OutOfRange(format!("non-permutation ket {levels:?} populated")));
            }
        }
        if count != factorial {
            return Err(Error::OutOfRange(format!("{count} permutation kets, expected {factorial}")));
        }
        Ok(())
    }
}

/// True if `levels` is a permutation of `0..levels.len()`.
pub fn is_permutation(levels: &[usize]) -> bool {
    let mut seen = vec![false; levels.len()];
    levels.iter().all(|&l| l < seen.len() && !std::mem::replace(&mut seen[l], true))
}

pub fn symmetric_state(n: usize) -> Result<SymmetricState> {
    if !(2..=MAX_PARTIES).contains(&n) {
        return Err(Error::OutOfRange(format!("party count {n} outside 2..={MAX_PARTIES}")));
    }
    let dims = vec![n; n];
    let mut amps = vec![C64::new(0.0, 0.0); layout::total_dim(&dims)];
    for p in (0..n).permutations(n) {
        amps[layout::flat_index(&p, &dims)] = C64::new(1.0, 0.0);
    }
    Ok(SymmetricState {
        n,
        state: PureState::normalized(dims, amps)?,
    })
}

/// `(|ij⟩ + |ji⟩)/√2` on two qutrits.
#[derive(Clone, Debug, PartialEq)]
pub struct SymBellPair {
    levels: (usize, usize),
    state: PureState,
}

impl SymBellPair {
    pub fn levels(&self) -> (usize, usize) {
        self.levels
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }
}

pub fn sym_bell(i: usize, j: usize) -> Result<SymBellPair> {
    if i == j {
        return Err(Error::OutOfRange(format!("symmetric pair needs distinct levels, got ({i}, {j})")));
    }
    if i >= 3 || j >= 3 {
        return Err(Error::OutOfRange(format!("levels ({i}, {j}) outside a qutrit")));
    }
    let mut amps = vec![C64::new(0.0, 0.0); 9];
    amps[3 * i + j] = C64::new(1.0, 0.0);
    amps[3 * j + i] = C64::new(1.0, 0.0);
    Ok(SymBellPair {
        levels: (i, j),
        state: PureState::normalized(vec![3, 3], amps)?,
    })
}

/// The three symmetric pairs making up the two-party marginal, in the order
/// `(0,1), (1,2), (2,0)`.
pub fn marginal_components() -> [SymBellPair; 3] {
    [(0, 1), (1, 2), (2, 0)].map(|(i, j)| sym_bell(i, j).expect("valid pair"))
}

/// Joint statistics of the three-party state when everyone measures in the
/// same basis: for each (Alice, Bob) outcome pair, Charlie's forced outcome
/// and the probability of that triple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub basis: String,
    pub entries: BTreeMap<(usize, usize), (usize, f64)>,
}

impl CorrelationTable {
    pub fn total(&self) -> f64 {
        self.entries.values().map(|(_, p)| p).sum()
    }

    pub fn charlie_for(&self, alice: usize, bob: usize) -> Option<usize> {
        self.entries.get(&(alice, bob)).map(|&(c, _)| c)
    }

    pub fn probability(&self, alice: usize, bob: usize) -> f64 {
        self.entries.get(&(alice, bob)).map_or(0.0, |&(_, p)| p)
    }

    /// Alice's outcome implied by Bob's and Charlie's, if the pair occurs.
    pub fn alice_for(&self, bob: usize, charlie: usize) -> Option<usize> {
        self.entries
            .iter()
            .find(|(&(_, b), &(c, _))| b == bob && c == charlie)
            .map(|(&(a, _), _)| a)
    }

    /// Each occurring (Bob, Charlie) pair points back to a single Alice outcome.
    pub fn is_reconstructible(&self) -> bool {
        let mut seen = BTreeMap::new();
        self.entries
            .iter()
            .all(|(&(a, b), &(c, _))| *seen.entry((b, c)).or_insert(a) == a)
    }
}

/// Builds the same-basis correlation table of `symmetric_state(3)`.
/// Fails if the basis does not produce a deterministic and reconstructible
/// table (e.g. an arbitrary rotated basis).
pub fn correlation_table(basis: &Basis) -> Result<CorrelationTable> {
    if basis.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: basis.dim(),
        });
    }
    let psi = symmetric_state(3)?;
    let table = born_probabilities(psi.state(), &[basis, basis, basis])?;
    let mut entries = BTreeMap::new();
    for (outcome, p) in table.iter() {
        if p <= ZERO {
            continue;
        }
        if entries.insert((outcome[0], outcome[1]), (outcome[2], p)).is_some() {
            return Err(Error::OutOfRange(format!(
                "basis '{}': Alice/Bob pair ({}, {}) does not fix Charlie",
                basis.label(),
                outcome[0],
                outcome[1]
            )));
        }
    }
    let out = CorrelationTable {
        basis: basis.label().to_string(),
        entries,
    };
    if !out.is_reconstructible() {
        return Err(Error::OutOfRange(format!(
            "basis '{}': Bob/Charlie pairs do not fix Alice",
            basis.label()
        )));
    }
    Ok(out)
}

/// How a bra `⟨u|` is turned into a row vector when projecting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionConvention {
    /// Standard Hermitian inner product on both parties.
    Conjugated,
    /// Components used as-is on both parties.
    Unconjugated,
    /// Alice's bra conjugated, Bob's used as-is.
    AliceConjugated,
    /// Bob's bra conjugated, Alice's used as-is.
    BobConjugated,
}

impl ProjectionConvention {
    pub const ALL: [ProjectionConvention; 4] = [
        ProjectionConvention::Conjugated,
        ProjectionConvention::Unconjugated,
        ProjectionConvention::AliceConjugated,
        ProjectionConvention::BobConjugated,
    ];

    fn conjugates(self) -> (bool, bool) {
        match self {
            Self::Conjugated => (true, true),
            Self::Unconjugated => (false, false),
            Self::AliceConjugated => (true, false),
            Self::BobConjugated => (false, true),
        }
    }
}

/// A stated collapse relation `Bob⟨u_bob| ⊗ Alice⟨u_alice| Ψ⟩ = c·|u_charlie⟩`,
/// with Fourier vectors indexed from 0 (`u1 ↦ 0`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatedRelation {
    pub bob: usize,
    pub alice: usize,
    pub coefficient: C64,
    pub charlie: usize,
}

/// The nine stated relations with `φ = 2π/3`.
pub fn stated_relations() -> [StatedRelation; 9] {
    let e = |s: f64| C64::from_polar(1.0, s * 2.0 * PI / 3.0);
    let one = C64::new(1.0, 0.0);
    let rel = |bob, alice, coefficient, charlie| StatedRelation {
        bob,
        alice,
        coefficient,
        charlie,
    };
    [
        rel(0, 0, one, 0),
        rel(1, 0, -one, 1),
        rel(2, 0, -one, 2),
        rel(0, 1, -e(-1.0), 2),
        rel(1, 1, -e(-1.0), 0),
        rel(2, 1, e(-1.0), 1),
        rel(0, 2, -e(1.0), 1),
        rel(1, 2, e(1.0), 2),
        rel(2, 2, -e(-1.0), 0),
    ]
}

/// What one convention gives for one relation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConventionOutcome {
    pub convention: ProjectionConvention,
    /// Squared norm of Charlie's unnormalized conditional vector.
    pub weight: f64,
    /// The Fourier vector the normalized collapse coincides with, if any.
    pub fourier_index: Option<usize>,
    /// Phase of the normalized collapse relative to that vector.
    pub phase: C64,
    pub vector_matches: bool,
    pub phase_matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseRow {
    pub relation: StatedRelation,
    pub outcomes: Vec<ConventionOutcome>,
}

impl CollapseRow {
    pub fn outcome(&self, convention: ProjectionConvention) -> &ConventionOutcome {
        self.outcomes
            .iter()
            .find(|o| o.convention == convention)
            .expect("every convention evaluated")
    }

    pub fn matched_by_any(&self) -> bool {
        self.outcomes.iter().any(|o| o.vector_matches)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub rows: Vec<CollapseRow>,
}

impl CollapseReport {
    /// Every relation, under every convention, lands on exactly one Fourier vector.
    pub fn all_single_fourier(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.outcomes.iter().all(|o| o.fourier_index.is_some()))
    }

    pub fn matched_count(&self, convention: ProjectionConvention) -> usize {
        self.rows
            .iter()
            .filter(|r| r.outcome(convention).vector_matches)
            .count()
    }

    pub fn every_row_matched(&self) -> bool {
        self.rows.iter().all(CollapseRow::matched_by_any)
    }
}

/// Charlie's unnormalized conditional vector after Alice and Bob project
/// onto `alice` and `bob`.
fn charlie_vector(
    psi: &PureState,
    alice: &DVector<C64>,
    bob: &DVector<C64>,
    convention: ProjectionConvention,
) -> Result<DVector<C64>> {
    let (conj_a, conj_b) = convention.conjugates();
    // project_out applies the Hermitian product, so pre-conjugate where the
    // convention drops it.
    let a = if conj_a { alice.clone() } else { alice.conjugate() };
    let b = if conj_b { bob.clone() } else { bob.conjugate() };
    let after_alice = psi.project_out(0, &a)?;
    let charlie = after_alice.project_out(0, &b)?;
    Ok(charlie.amplitudes().clone())
}

/// Evaluates the nine stated collapse relations of the three-party state
/// under each [`ProjectionConvention`].
pub fn collapse_relations() -> Result<CollapseReport> {
    let psi = symmetric_state(3)?.into_state();
    let u = fourier_basis(3)?;
    let mut rows = Vec::new();
    for relation in stated_relations() {
        let mut outcomes = Vec::new();
        for convention in ProjectionConvention::ALL {
            let v = charlie_vector(&psi, u.vector(relation.alice), u.vector(relation.bob), convention)?;
            let weight = v.norm_squared();
            let dir = v.unscale(weight.sqrt());
            let overlaps: Vec<C64> = u.vectors().iter().map(|w| w.dotc(&dir)).collect();
            let hits: Vec<usize> = (0..3).filter(|&m| (overlaps[m].norm() - 1.0).abs() < 1e-10).collect();
            let fourier_index = (hits.len() == 1).then(|| hits[0]);
            let phase = fourier_index.map_or(C64::new(0.0, 0.0), |m| overlaps[m]);
            let vector_matches = fourier_index == Some(relation.charlie);
            let phase_matches = vector_matches && (phase - relation.coefficient).norm() < 1e-10;
            outcomes.push(ConventionOutcome {
                convention,
                weight,
                fourier_index,
                phase,
                vector_matches,
                phase_matches,
            });
        }
        rows.push(CollapseRow { relation, outcomes });
    }
    Ok(CollapseReport { rows })
}

/// Largest entrywise deviation of the single-party marginals from `I/n`.
pub fn max_single_party_marginal_deviation(s: &SymmetricState) -> Result<f64> {
    let n = s.n();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let rho = crate::qudit::partial_trace(s.state(), &[k])?;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { 1.0 / n as f64 } else { 0.0 };
                worst = worst.max((rho.matrix()[(r, c)] - C64::new(target, 0.0)).norm());
            }
        }
    }
    Ok(worst)
}

/// Total probability of computational outcomes that are not permutations.
pub fn non_permutation_probability(s: &SymmetricState) -> f64 {
    s.state()
        .diagonal()
        .iter()
        .enumerate()
        .filter(|(i, _)| !is_permutation(&layout::digits(*i, s.state().party_dims())))
        .map(|(_, p)| p)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::{partial_trace, MixedState};

    #[test]
    fn two_party_state() {
        let s = symmetric_state(2).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((s.state().amplitude(&[0, 1]).re - h).abs() < 1e-12);
        assert!((s.state().amplitude(&[1, 0]).re - h).abs() < 1e-12);
        assert_eq!(s.state().amplitude(&[0, 0]), C64::new(0.0, 0.0));
    }

    #[test]
    fn three_party_state_matches_written_form() {
        let s = symmetric_state(3).unwrap();
        let a = 1.0 / 6f64.sqrt();
        for p in [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 0, 1], [2, 1, 0], [1, 2, 0]] {
            assert!((s.state().amplitude(&p).re - a).abs() < 1e-12);
        }
        s.check_support().unwrap();
    }

    #[test]
    fn four_party_support() {
        let s = symmetric_state(4).unwrap();
        s.check_support().unwrap();
        assert_eq!(s.state().support(1e-12).len(), 24);
        assert!((s.state().norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn party_count_range() {
        assert!(symmetric_state(1).is_err());
        assert!(symmetric_state(7).is_err());
    }

    #[test]
    fn sym_bell_pairs() {
        let p = sym_bell(0, 1).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((p.state().amplitude(&[0, 1]).re - h).abs() < 1e-12);
        assert!((p.state().amplitude(&[1, 0]).re - h).abs() < 1e-12);
        let q = sym_bell(1, 2).unwrap();
        assert_eq!(q.state().amplitude(&[1, 2]), q.state().amplitude(&[2, 1]));
        assert!(sym_bell(1, 1).is_err());
        assert!(sym_bell(0, 3).is_err());
    }

    #[test]
    fn two_party_marginal_is_uniform_pair_mixture() {
        let s = symmetric_state(3).unwrap();
        let rho = partial_trace(s.state(), &[0, 1]).unwrap();
        let comps = marginal_components();
        let mix = MixedState::mixture(&[
            (1.0 / 3.0, comps[0].state()),
            (1.0 / 3.0, comps[1].state()),
            (1.0 / 3.0, comps[2].state()),
        ])
        .unwrap();
        assert!(rho.max_abs_diff(&mix) < 1e-10);
    }

    #[test]
    fn computational_table() {
        let t = correlation_table(&Basis::computational(3)).unwrap();
        assert_eq!(t.entries.len(), 6);
        for (&(a, b), &(c, p)) in &t.entries {
            assert!((p - 1.0 / 6.0).abs() < 1e-12);
            assert_eq!(a + b + c, 3);
        }
    }

    #[test]
    fn rotated_basis_fails_determinism() {
        let v = |a: f64, b: f64| DVector::from_vec(vec![C64::new(a, 0.0), C64::new(b, 0.0), C64::new(0.0, 0.0)]);
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let basis = Basis::new(
            "tilted",
            vec![v(c, s), v(-s, c), DVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)])],
        )
        .unwrap();
        assert!(correlation_table(&basis).is_err());
    }
}
