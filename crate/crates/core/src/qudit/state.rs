//! Pure and mixed states over a multi-party qudit register.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::layout::{self, check_party, stride, total_dim, validate_dims};
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for algebraic identities (normalization, hermiticity, orthonormality).
pub const TOL: f64 = 1e-10;

/// Lowest eigenvalue accepted for a density matrix.
pub const PSD_TOL: f64 = 1e-9;

/// Operations shared by state vectors and density matrices.
///
/// `apply_local` acts with a (possibly non-square, possibly non-unitary)
/// operator on one party: `K|ψ⟩` for pure states, `KρK†` for mixed states.
/// The result is not renormalized, so `weight` of the result is the
/// probability of the corresponding Kraus outcome.
pub trait QuantumState: Clone + Sized {
    fn party_dims(&self) -> &[usize];

    fn apply_local(&self, party: usize, op: &DMatrix<C64>) -> Result<Self>;

    /// Squared norm for vectors, trace for density matrices.
    fn weight(&self) -> f64;

    /// Probability of each computational basis index, unnormalized.
    fn diagonal(&self) -> Vec<f64>;

    fn to_density(&self) -> MixedState;

    fn renormalized(self) -> Result<Self>;

    fn num_parties(&self) -> usize {
        self.party_dims().len()
    }
}

/// Apply `op` (rows × d) to the `party` axis of a flat row-major tensor.
pub(crate) fn apply_axis(
    amps: &[C64],
    dims: &[usize],
    party: usize,
    op: &DMatrix<C64>,
) -> Result<(Vec<C64>, Vec<usize>)> {
    check_party(dims, party)?;
    let d = dims[party];
    if op.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: op.ncols(),
        });
    }
    let rows = op.nrows();
    let inner = stride(dims, party);
    let outer = total_dim(&dims[..party]);
    let mut out = vec![C64::new(0.0, 0.0); outer * rows * inner];
    for o in 0..outer {
        let src = &amps[o * d * inner..(o + 1) * d * inner];
        let dst = &mut out[o * rows * inner..(o + 1) * rows * inner];
        for m in 0..rows {
            for l in 0..d {
                let c = op[(m, l)];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..inner {
                    dst[m * inner + k] += c * src[l * inner + k];
                }
            }
        }
    }
    let mut new_dims = dims.to_vec();
    new_dims[party] = rows;
    Ok((out, new_dims))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    party_dims: Vec<usize>,
    amplitudes: DVector<C64>,
    normalized: bool,
}

impl PureState {
    /// Wraps amplitudes without rescaling; the `normalized` flag reflects the
    /// actual norm.
    pub fn new(party_dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        validate_dims(&party_dims)?;
        let expected = total_dim(&party_dims);
        if amplitudes.len() != expected {
            return Err(Error::LayoutMismatch {
                dims: party_dims,
                expected,
                actual: amplitudes.len(),
            });
        }
        let amplitudes = DVector::from_vec(amplitudes);
        let normalized = (amplitudes.norm_squared() - 1.0).abs() <= TOL;
        Ok(Self {
            party_dims,
            amplitudes,
            normalized,
        })
    }

    /// Like [`PureState::new`] but rescales to unit norm.
    pub fn normalized(party_dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        Self::new(party_dims, amplitudes)?.renormalized()
    }

    pub fn basis_ket(party_dims: Vec<usize>, levels: &[usize]) -> Result<Self> {
        validate_dims(&party_dims)?;
        if levels.len() != party_dims.len() {
            return Err(Error::DimensionMismatch {
                expected: party_dims.len(),
                found: levels.len(),
            });
        }
        for (&l, &d) in levels.iter().zip(&party_dims) {
            if l >= d {
                return Err(Error::OutOfRange(format!("level {l} in dimension {d}")));
            }
        }
        let mut amps = vec![C64::new(0.0, 0.0); total_dim(&party_dims)];
        amps[layout::flat_index(levels, &party_dims)] = C64::new(1.0, 0.0);
        Self::new(party_dims, amps)
    }

    /// Single-party state from a vector.
    pub fn from_vector(v: &DVector<C64>) -> Result<Self> {
        Self::new(vec![v.len()], v.iter().copied().collect())
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, levels: &[usize]) -> C64 {
        self.amplitudes[layout::flat_index(levels, &self.party_dims)]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm_squared()))
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.party_dims != other.party_dims {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Contracts `party` with `⟨v|` and removes it from the layout.
    /// The result is not renormalized.
    pub fn project_out(&self, party: usize, v: &DVector<C64>) -> Result<PureState> {
        if self.party_dims.len() < 2 {
            return Err(Error::OutOfRange(
                "cannot remove the only party of a state".into(),
            ));
        }
        let bra = DMatrix::from_fn(1, v.len(), |_, c| v[c].conj());
        let (amps, mut dims) = apply_axis(self.amplitudes.as_slice(), &self.party_dims, party, &bra)?;
        dims.remove(party);
        PureState::new(dims, amps)
    }

    /// Nonzero amplitudes as (levels, amplitude) pairs.
    pub fn support(&self, threshold: f64) -> Vec<(Vec<usize>, C64)> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > threshold)
            .map(|(i, &a)| (layout::digits(i, &self.party_dims), a))
            .collect()
    }
}

impl QuantumState for PureState {
    fn party_dims(&self) -> &[usize] {
        &self.party_dims
    }

    fn apply_local(&self, party: usize, op: &DMatrix<C64>) -> Result<Self> {
        let (amps, dims) = apply_axis(self.amplitudes.as_slice(), &self.party_dims, party, op)?;
        PureState::new(dims, amps)
    }

    fn weight(&self) -> f64 {
        self.norm_squared()
    }

    fn diagonal(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn to_density(&self) -> MixedState {
        MixedState {
            party_dims: self.party_dims.clone(),
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    fn renormalized(self) -> Result<Self> {
        let n = self.amplitudes.norm();
        if n <= f64::EPSILON {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amplitudes: self.amplitudes.unscale(n),
            party_dims: self.party_dims,
            normalized: true,
        })
    }
}

/// Density matrix over the same row-major layout as [`PureState`].
///
/// Construction through [`MixedState::new`] validates hermiticity, unit
/// trace and positivity. Intermediate results of `apply_local` are allowed
/// to be subnormalized.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    party_dims: Vec<usize>,
    matrix: DMatrix<C64>,
}

impl MixedState {
    pub fn new(party_dims: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        let state = Self::unchecked(party_dims, matrix)?;
        state.validate()?;
        Ok(state)
    }

    pub(crate) fn unchecked(party_dims: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        validate_dims(&party_dims)?;
        let n = total_dim(&party_dims);
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::LayoutMismatch {
                dims: party_dims,
                expected: n,
                actual: matrix.nrows(),
            });
        }
        Ok(Self { party_dims, matrix })
    }

    /// Checks the density-matrix invariants.
    pub fn validate(&self) -> Result<()> {
        let dev = (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if dev > TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TOL {
            return Err(Error::BadTrace(tr));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|c| c.re).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.matrix + self.matrix.adjoint()).scale(0.5);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Number of eigenvalues above `threshold`.
    pub fn rank(&self, threshold: f64) -> usize {
        self.eigenvalues().iter().filter(|&&e| e > threshold).count()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Uniform mixture of pure states with the given weights.
    pub fn mixture(components: &[(f64, &PureState)]) -> Result<Self> {
        let first = components.first().ok_or(Error::Empty("mixture components"))?;
        let dims = first.1.party_dims().to_vec();
        let n = total_dim(&dims);
        let mut m = DMatrix::zeros(n, n);
        for (w, psi) in components {
            if psi.party_dims() != dims.as_slice() {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: psi.dim(),
                });
            }
            m += psi.to_density().matrix.scale(*w);
        }
        Self::new(dims, m)
    }

    /// Largest entrywise deviation from another density matrix.
    pub fn max_abs_diff(&self, other: &MixedState) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

impl QuantumState for MixedState {
    fn party_dims(&self) -> &[usize] {
        &self.party_dims
    }

    fn apply_local(&self, party: usize, op: &DMatrix<C64>) -> Result<Self> {
        check_party(&self.party_dims, party)?;
        let n = self.matrix.nrows();
        // K ρ: apply to every column.
        let mut cols = Vec::with_capacity(n);
        let mut new_dims = Vec::new();
        for c in 0..n {
            let col: Vec<C64> = self.matrix.column(c).iter().copied().collect();
            let (out, dims) = apply_axis(&col, &self.party_dims, party, op)?;
            new_dims = dims;
            cols.push(out);
        }
        let m = total_dim(&new_dims);
        let half = DMatrix::from_fn(m, n, |r, c| cols[c][r]);
        // (K ρ) K† = (K (K ρ)†)†
        let adj = half.adjoint();
        let mut cols = Vec::with_capacity(m);
        for c in 0..m {
            let col: Vec<C64> = adj.column(c).iter().copied().collect();
            let (out, _) = apply_axis(&col, &self.party_dims, party, op)?;
            cols.push(out);
        }
        let full = DMatrix::from_fn(m, m, |r, c| cols[c][r]).adjoint();
        MixedState::unchecked(new_dims, full)
    }

    fn weight(&self) -> f64 {
        self.trace()
    }

    fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|c| c.re).collect()
    }

    fn to_density(&self) -> MixedState {
        self.clone()
    }

    fn renormalized(self) -> Result<Self> {
        let tr = self.trace();
        if tr <= f64::EPSILON {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            matrix: self.matrix.unscale(tr),
            party_dims: self.party_dims,
        })
    }
}
