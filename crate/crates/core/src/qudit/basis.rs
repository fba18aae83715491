//! Measurement frames: full orthonormal bases and click/no-click subspace
//! measurements.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::state::{C64, TOL};
use crate::error::{Error, Result};

fn max_gram_deviation(vectors: &[DVector<C64>]) -> f64 {
    let mut dev: f64 = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((a.dotc(b) - C64::new(target, 0.0)).norm());
        }
    }
    dev
}

fn check_vectors(dim: usize, vectors: &[DVector<C64>]) -> Result<()> {
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: v.len(),
        });
    }
    let dev = max_gram_deviation(vectors);
    if dev > TOL {
        return Err(Error::NotOrthonormal(dev));
    }
    Ok(())
}

fn unit(dim: usize, k: usize) -> DVector<C64> {
    let mut v = DVector::zeros(dim);
    v[k] = C64::new(1.0, 0.0);
    v
}

/// An orthonormal basis of a single qudit, outcome `m` ↔ `vectors[m]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    label: String,
    dim: usize,
    vectors: Vec<DVector<C64>>,
}

impl Basis {
    pub fn new(label: impl Into<String>, vectors: Vec<DVector<C64>>) -> Result<Self> {
        let dim = vectors.len();
        if dim == 0 {
            return Err(Error::Empty("basis vectors"));
        }
        check_vectors(dim, &vectors)?;
        Ok(Self {
            label: label.into(),
            dim,
            vectors,
        })
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            label: "computational".into(),
            dim,
            vectors: (0..dim).map(|k| unit(dim, k)).collect(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[DVector<C64>] {
        &self.vectors
    }

    pub fn vector(&self, m: usize) -> &DVector<C64> {
        &self.vectors[m]
    }

    /// Rows are `⟨u_m|`; applying it maps amplitudes into this basis.
    pub fn analysis_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim, self.dim, |m, k| self.vectors[m][k].conj())
    }

    pub fn projector(&self, m: usize) -> DMatrix<C64> {
        let v = &self.vectors[m];
        v * v.adjoint()
    }
}

/// Discrete Fourier basis: vector `m` has components `ω^{mk}/√d`,
/// `ω = e^{2πi/d}`. At `d = 3` these are the `u1, u2, u3` superposition
/// vectors with `φ = 2π/3`.
pub fn fourier_basis(d: usize) -> Result<Basis> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("fourier basis needs d >= 2, got {d}")));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let vectors = (0..d)
        .map(|m| {
            DVector::from_fn(d, |k, _| {
                // Reduce the exponent first so the phase is computed on [0, 2π).
                let e = (m * k) % d;
                C64::from_polar(norm, 2.0 * PI * e as f64 / d as f64)
            })
        })
        .collect();
    Basis::new("fourier", vectors)
}

/// Projective measurement that only resolves a proper subspace. Outcome `i`
/// is a click on `vectors[i]`; the complement projector is the no-click
/// outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceMeasurement {
    dim: usize,
    vectors: Vec<DVector<C64>>,
    labels: Vec<String>,
}

impl SubspaceMeasurement {
    pub fn new(dim: usize, vectors: Vec<DVector<C64>>, labels: Vec<String>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Empty("subspace vectors"));
        }
        if vectors.len() >= dim {
            return Err(Error::OutOfRange(format!(
                "subspace of {} vectors leaves no complement in dimension {dim}",
                vectors.len()
            )));
        }
        if labels.len() != vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: vectors.len(),
                found: labels.len(),
            });
        }
        check_vectors(dim, &vectors)?;
        Ok(Self { dim, vectors, labels })
    }

    /// `{|i⟩, |j⟩}` inside a `dim`-level system.
    pub fn levels(dim: usize, pair: LevelPair) -> Result<Self> {
        pair.check(dim)?;
        let (i, j) = pair.levels();
        Self::new(
            dim,
            vec![unit(dim, i), unit(dim, j)],
            vec![format!("|{i}>"), format!("|{j}>")],
        )
    }

    /// `{(|i⟩+|j⟩)/√2, (|i⟩−|j⟩)/√2}` inside a `dim`-level system.
    pub fn superposition(dim: usize, pair: LevelPair) -> Result<Self> {
        pair.check(dim)?;
        let (i, j) = pair.levels();
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        let plus = (unit(dim, i) + unit(dim, j)) * s;
        let minus = (unit(dim, i) - unit(dim, j)) * s;
        Self::new(
            dim,
            vec![plus, minus],
            vec![format!("|{i}>+|{j}>"), format!("|{i}>-|{j}>")],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[DVector<C64>] {
        &self.vectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of click outcomes.
    pub fn clicks(&self) -> usize {
        self.vectors.len()
    }

    pub fn click_projector(&self, i: usize) -> DMatrix<C64> {
        let v = &self.vectors[i];
        v * v.adjoint()
    }

    pub fn no_click_projector(&self) -> DMatrix<C64> {
        let mut p = DMatrix::identity(self.dim, self.dim);
        for i in 0..self.clicks() {
            p -= self.click_projector(i);
        }
        p
    }

    /// The click vectors followed by a Gram-Schmidt completion of the
    /// complement, so that outcomes `clicks()..dim` all mean "no click".
    pub fn completed_basis(&self) -> Basis {
        let mut vectors = self.vectors.clone();
        for k in 0..self.dim {
            if vectors.len() == self.dim {
                break;
            }
            let mut v = unit(self.dim, k);
            for u in &vectors {
                let overlap = u.dotc(&v);
                v -= u * overlap;
            }
            let n = v.norm();
            if n > 1e-6 {
                vectors.push(v.unscale(n));
            }
        }
        Basis {
            label: "completed-subspace".into(),
            dim: self.dim,
            vectors,
        }
    }
}

/// Unordered pair of distinct levels, stored ascending.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(usize, usize)", into = "(usize, usize)")]
pub struct LevelPair(usize, usize);

impl LevelPair {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::OutOfRange(format!("level pair needs distinct levels, got ({a}, {b})")));
        }
        Ok(Self(a.min(b), a.max(b)))
    }

    pub fn levels(self) -> (usize, usize) {
        (self.0, self.1)
    }

    /// The three pairs of a qutrit: {0,1}, {1,2}, {0,2}.
    pub fn qutrit_pairs() -> [LevelPair; 3] {
        [LevelPair(0, 1), LevelPair(1, 2), LevelPair(0, 2)]
    }

    /// Position of `level` inside the pair, if present.
    pub fn position(self, level: usize) -> Option<usize> {
        if level == self.0 {
            Some(0)
        } else if level == self.1 {
            Some(1)
        } else {
            None
        }
    }

    fn check(self, dim: usize) -> Result<()> {
        if self.1 >= dim {
            return Err(Error::OutOfRange(format!("level {} in dimension {dim}", self.1)));
        }
        Ok(())
    }
}

impl TryFrom<(usize, usize)> for LevelPair {
    type Error = Error;

    fn try_from((a, b): (usize, usize)) -> Result<Self> {
        Self::new(a, b)
    }
}

impl From<LevelPair> for (usize, usize) {
    fn from(p: LevelPair) -> Self {
        (p.0, p.1)
    }
}

impl std::fmt::Display for LevelPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}
