//! Composite systems, marginals, Born-rule tables and sampled measurements.

use nalgebra::DMatrix;
use rand::Rng;

use super::basis::{Basis, SubspaceMeasurement};
use super::layout::{self, check_party, total_dim};
use super::state::{MixedState, PureState, QuantumState, C64};
use crate::error::{Error, Result};

/// Kronecker product in party order.
pub fn tensor(states: &[PureState]) -> Result<PureState> {
    let (first, rest) = states.split_first().ok_or(Error::Empty("tensor factors"))?;
    first.require_normalized()?;
    let mut dims = first.party_dims().to_vec();
    let mut amps: Vec<C64> = first.amplitudes().iter().copied().collect();
    for s in rest {
        s.require_normalized()?;
        let next: Vec<C64> = s.amplitudes().iter().copied().collect();
        amps = amps
            .iter()
            .flat_map(|a| next.iter().map(move |b| a * b))
            .collect();
        dims.extend_from_slice(s.party_dims());
    }
    PureState::normalized(dims, amps)
}

fn split_parties(dims: &[usize], keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if keep.is_empty() {
        return Err(Error::Empty("kept parties"));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    for &p in &kept {
        check_party(dims, p)?;
    }
    let traced = (0..dims.len()).filter(|p| !kept.contains(p)).collect();
    Ok((kept, traced))
}

/// For every flat index, the (kept, traced) sub-indices.
fn index_split(dims: &[usize], kept: &[usize], traced: &[usize]) -> Vec<(usize, usize)> {
    let kd: Vec<usize> = kept.iter().map(|&p| dims[p]).collect();
    let td: Vec<usize> = traced.iter().map(|&p| dims[p]).collect();
    (0..total_dim(dims))
        .map(|i| {
            let d = layout::digits(i, dims);
            let kl: Vec<usize> = kept.iter().map(|&p| d[p]).collect();
            let tl: Vec<usize> = traced.iter().map(|&p| d[p]).collect();
            (layout::flat_index(&kl, &kd), layout::flat_index(&tl, &td))
        })
        .collect()
}

/// Reduced state on `keep` (listed in ascending party order in the output).
pub fn partial_trace<S: PartialTrace + ?Sized>(state: &S, keep: &[usize]) -> Result<MixedState> {
    state.partial_trace(keep)
}

pub trait PartialTrace {
    fn partial_trace(&self, keep: &[usize]) -> Result<MixedState>;
}

impl PartialTrace for PureState {
    fn partial_trace(&self, keep: &[usize]) -> Result<MixedState> {
        let dims = self.party_dims();
        let (kept, traced) = split_parties(dims, keep)?;
        let kd: Vec<usize> = kept.iter().map(|&p| dims[p]).collect();
        let td: Vec<usize> = traced.iter().map(|&p| dims[p]).collect();
        let (nk, nt) = (total_dim(&kd), total_dim(&td));
        // Reshape ψ into an nk × nt matrix M; the marginal is M M†.
        let mut m = DMatrix::<C64>::zeros(nk, nt);
        for (i, (k, t)) in index_split(dims, &kept, &traced).into_iter().enumerate() {
            m[(k, t)] = self.amplitudes()[i];
        }
        MixedState::unchecked(kd, &m * m.adjoint())
    }
}

impl PartialTrace for MixedState {
    fn partial_trace(&self, keep: &[usize]) -> Result<MixedState> {
        let dims = self.party_dims();
        let (kept, traced) = split_parties(dims, keep)?;
        let kd: Vec<usize> = kept.iter().map(|&p| dims[p]).collect();
        let nk = total_dim(&kd);
        let split = index_split(dims, &kept, &traced);
        let mut out = DMatrix::<C64>::zeros(nk, nk);
        for (i, &(ki, ti)) in split.iter().enumerate() {
            for (j, &(kj, tj)) in split.iter().enumerate() {
                if ti == tj {
                    out[(ki, kj)] += self.matrix()[(i, j)];
                }
            }
        }
        MixedState::unchecked(kd, out)
    }
}

/// Joint outcome distribution, row-major over per-party outcome counts.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl ProbabilityTable {
    pub(crate) fn new(dims: Vec<usize>, probs: Vec<f64>) -> Self {
        debug_assert_eq!(total_dim(&dims), probs.len());
        Self { dims, probs }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, outcome: &[usize]) -> f64 {
        self.probs[layout::flat_index(outcome, &self.dims)]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (layout::digits(i, &self.dims), p))
    }

    /// Marginal over the listed positions, in the given order.
    pub fn marginal(&self, positions: &[usize]) -> ProbabilityTable {
        let dims: Vec<usize> = positions.iter().map(|&p| self.dims[p]).collect();
        let mut probs = vec![0.0; total_dim(&dims)];
        for (outcome, p) in self.iter() {
            let sub: Vec<usize> = positions.iter().map(|&q| outcome[q]).collect();
            probs[layout::flat_index(&sub, &dims)] += p;
        }
        ProbabilityTable { dims, probs }
    }
}

/// Exact Born-rule distribution when party `k` measures in `bases[k]`.
pub fn born_probabilities<S: QuantumState>(state: &S, bases: &[&Basis]) -> Result<ProbabilityTable> {
    let dims = state.party_dims();
    if bases.len() != dims.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            found: bases.len(),
        });
    }
    let mut rotated = state.clone();
    for (party, basis) in bases.iter().enumerate() {
        if basis.dim() != dims[party] {
            return Err(Error::DimensionMismatch {
                expected: dims[party],
                found: basis.dim(),
            });
        }
        rotated = rotated.apply_local(party, &basis.analysis_matrix())?;
    }
    let total = rotated.weight();
    let probs = rotated.diagonal().into_iter().map(|p| p.max(0.0) / total).collect();
    Ok(ProbabilityTable::new(dims.to_vec(), probs))
}

/// Inverse-CDF draw from unnormalized nonnegative weights.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    // Rounding can leave u marginally above the last bin.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}

/// Outcome probabilities of a complete projective measurement by `projectors`
/// on one party, together with the unnormalized post-measurement branches.
fn branches<S: QuantumState>(
    state: &S,
    party: usize,
    projectors: &[DMatrix<C64>],
) -> Result<Vec<(f64, S)>> {
    projectors
        .iter()
        .map(|p| {
            let branch = state.apply_local(party, p)?;
            Ok((branch.weight().max(0.0), branch))
        })
        .collect()
}

/// Samples a complete projective measurement given by `projectors` on one
/// party and returns the outcome index with the renormalized branch.
pub fn measure_projective<S: QuantumState, R: Rng + ?Sized>(
    state: &S,
    party: usize,
    projectors: &[DMatrix<C64>],
    rng: &mut R,
) -> Result<(usize, S)> {
    check_party(state.party_dims(), party)?;
    let mut bs = branches(state, party, projectors)?;
    let weights: Vec<f64> = bs.iter().map(|(w, _)| *w).collect();
    let k = sample_index(&weights, rng);
    let total: f64 = weights.iter().sum();
    if weights[k] <= 1e-14 * total.max(1.0) {
        return Err(Error::ZeroProbabilityProjection);
    }
    let (_, branch) = bs.swap_remove(k);
    Ok((k, branch.renormalized()?))
}

/// Measures one party of a pure state in `basis`; returns the outcome and the
/// renormalized collapsed state (the party stays in the layout).
pub fn measure_party<R: Rng + ?Sized>(
    state: &PureState,
    party: usize,
    basis: &Basis,
    rng: &mut R,
) -> Result<(usize, PureState)> {
    state.require_normalized()?;
    check_party(state.party_dims(), party)?;
    if basis.dim() != state.party_dims()[party] {
        return Err(Error::DimensionMismatch {
            expected: state.party_dims()[party],
            found: basis.dim(),
        });
    }
    let projectors: Vec<_> = (0..basis.dim()).map(|m| basis.projector(m)).collect();
    measure_projective(state, party, &projectors, rng)
}

/// Sequential projective measurements, in the listed order. Outcomes are
/// returned in the same order.
pub fn measure<R: Rng + ?Sized>(
    state: &PureState,
    plan: &[(usize, &Basis)],
    rng: &mut R,
) -> Result<(Vec<usize>, PureState)> {
    state.require_normalized()?;
    let mut current = state.clone();
    let mut outcomes = Vec::with_capacity(plan.len());
    for &(party, basis) in plan {
        let (m, next) = measure_party(&current, party, basis, rng)?;
        outcomes.push(m);
        current = next;
    }
    Ok((outcomes, current))
}

/// Result of a subspace measurement on one party.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceOutcome<S> {
    pub click: bool,
    /// Index into the measurement's click vectors; `None` iff no click.
    pub outcome: Option<usize>,
    pub state: S,
}

fn subspace_projectors(meas: &SubspaceMeasurement) -> Vec<DMatrix<C64>> {
    let mut ps: Vec<_> = (0..meas.clicks()).map(|i| meas.click_projector(i)).collect();
    ps.push(meas.no_click_projector());
    ps
}

fn check_subspace_dim<S: QuantumState>(state: &S, party: usize, meas: &SubspaceMeasurement) -> Result<()> {
    check_party(state.party_dims(), party)?;
    let d = state.party_dims()[party];
    if meas.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: meas.dim(),
        });
    }
    Ok(())
}

/// Click probabilities for each subspace vector, followed by the no-click
/// probability.
pub fn subspace_probabilities<S: QuantumState>(
    state: &S,
    party: usize,
    meas: &SubspaceMeasurement,
) -> Result<Vec<f64>> {
    check_subspace_dim(state, party, meas)?;
    let total = state.weight();
    Ok(branches(state, party, &subspace_projectors(meas))?
        .into_iter()
        .map(|(w, _)| w / total)
        .collect())
}

/// Exact joint table for several parties each doing a subspace measurement.
/// Position `k` of an outcome ranges over `0..=clicks_k`, the last value
/// meaning no click.
pub fn subspace_joint_probabilities<S: QuantumState>(
    state: &S,
    plan: &[(usize, &SubspaceMeasurement)],
) -> Result<ProbabilityTable> {
    for &(party, meas) in plan {
        check_subspace_dim(state, party, meas)?;
    }
    let dims: Vec<usize> = plan.iter().map(|(_, m)| m.clicks() + 1).collect();
    let projs: Vec<Vec<DMatrix<C64>>> = plan.iter().map(|(_, m)| subspace_projectors(m)).collect();
    let total = state.weight();
    let mut probs = Vec::with_capacity(total_dim(&dims));
    for i in 0..total_dim(&dims) {
        let outcome = layout::digits(i, &dims);
        let mut branch = state.clone();
        for (k, &(party, _)) in plan.iter().enumerate() {
            branch = branch.apply_local(party, &projs[k][outcome[k]])?;
        }
        probs.push(branch.weight().max(0.0) / total);
    }
    Ok(ProbabilityTable::new(dims, probs))
}

/// Samples a click/no-click outcome on one party. Works on pure and mixed
/// states; the returned state is the renormalized projected branch.
pub fn subspace_measure<S: QuantumState, R: Rng + ?Sized>(
    state: &S,
    party: usize,
    meas: &SubspaceMeasurement,
    rng: &mut R,
) -> Result<SubspaceOutcome<S>> {
    check_subspace_dim(state, party, meas)?;
    let (k, post) = measure_projective(state, party, &subspace_projectors(meas), rng)?;
    let click = k < meas.clicks();
    Ok(SubspaceOutcome {
        click,
        outcome: click.then_some(k),
        state: post,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::basis::{fourier_basis, LevelPair};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn ket(dims: &[usize], levels: &[usize]) -> PureState {
        PureState::basis_ket(dims.to_vec(), levels).unwrap()
    }

    #[test]
    fn tensor_of_basis_kets() {
        let s = tensor(&[ket(&[3], &[0]), ket(&[3], &[1])]).unwrap();
        assert_eq!(s.party_dims(), &[3, 3]);
        assert_eq!(s.amplitude(&[0, 1]), c(1.0));
        assert!(s.is_normalized());
    }

    #[test]
    fn tensor_of_fourier_zero_vectors_is_flat() {
        let u = fourier_basis(3).unwrap();
        let u1 = PureState::from_vector(u.vector(0)).unwrap();
        let s = tensor(&[u1.clone(), u1]).unwrap();
        for a in s.amplitudes().iter() {
            assert!((a - c(1.0 / 3.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn tensor_rejects_empty_and_unnormalized() {
        assert!(matches!(tensor(&[]), Err(Error::Empty(_))));
        let s = PureState::new(vec![2], vec![c(1.0), c(1.0)]).unwrap();
        assert!(matches!(tensor(&[s]), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn product_marginal_is_pure() {
        let s = tensor(&[ket(&[3], &[0]), ket(&[3], &[1])]).unwrap();
        let rho = partial_trace(&s, &[0]).unwrap();
        assert!((rho.matrix()[(0, 0)] - c(1.0)).norm() < 1e-12);
        assert_eq!(rho.rank(1e-9), 1);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let s = PureState::normalized(vec![2, 2], vec![c(1.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        let rho = partial_trace(&s, &[0]).unwrap();
        let half = MixedState::new(vec![2], DMatrix::identity(2, 2).scale(0.5).map(c)).unwrap();
        assert!(rho.max_abs_diff(&half) < 1e-12);
        // Mixed-state route agrees with the pure route.
        let via_rho = partial_trace(&s.to_density(), &[0]).unwrap();
        assert!(via_rho.max_abs_diff(&half) < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_parties() {
        let s = ket(&[2, 2], &[0, 0]);
        assert!(matches!(partial_trace(&s, &[2]), Err(Error::NoSuchParty { .. })));
        assert!(matches!(partial_trace(&s, &[]), Err(Error::Empty(_))));
    }

    #[test]
    fn born_dimension_mismatch() {
        let s = ket(&[3, 3], &[0, 0]);
        let b2 = Basis::computational(2);
        let b3 = Basis::computational(3);
        assert!(born_probabilities(&s, &[&b3]).is_err());
        assert!(born_probabilities(&s, &[&b3, &b2]).is_err());
    }

    #[test]
    fn eigenstate_measurement_is_trivial() {
        let s = ket(&[3], &[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (m, post) = measure_party(&s, 0, &Basis::computational(3), &mut rng).unwrap();
        assert_eq!(m, 0);
        assert_eq!(post, s);
    }

    #[test]
    fn levels_subspace_never_double_clicks_on_bc_pair() {
        // (|12⟩+|21⟩)/√2: every term has a level outside {0,1} on one side.
        let mut amps = vec![c(0.0); 9];
        amps[5] = c(1.0);
        amps[7] = c(1.0);
        let s = PureState::normalized(vec![3, 3], amps).unwrap();
        let m = SubspaceMeasurement::levels(3, LevelPair::new(0, 1).unwrap()).unwrap();
        let t = subspace_joint_probabilities(&s, &[(0, &m), (1, &m)]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(t.get(&[a, b]), 0.0);
            }
        }
        assert!((t.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subspace_dimension_mismatch() {
        let s = ket(&[2], &[0]);
        let m = SubspaceMeasurement::levels(3, LevelPair::new(0, 1).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(subspace_measure(&s, 0, &m, &mut rng).is_err());
    }

    #[test]
    fn no_click_returns_complement_branch() {
        let s = ket(&[3], &[2]);
        let m = SubspaceMeasurement::levels(3, LevelPair::new(0, 1).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = subspace_measure(&s, 0, &m, &mut rng).unwrap();
        assert!(!out.click);
        assert_eq!(out.outcome, None);
        assert_eq!(out.state, s);
    }
}
