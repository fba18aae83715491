//! Exact reference values, computed without the sampling engine.
//!
//! Everything here is built from explicit amplitude sums and density
//! matrices on small fixed registers: the 27 amplitudes of the
//! three-qutrit symmetric state, the 9×9 reduced state, and a 729-term
//! enumeration for heralding. The values are written to a constants file
//! (see [`generate_constants_toml`]) that tests and reports read back.

use std::f64::consts::PI;

use itertools::iproduct;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::engine::{EveBasis, EveStrategy, SubspacePolicy};
use crate::error::{Error, Result};
use crate::qudit::C64;

const D: usize = 3;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `ω^{mk}/√3`, the Fourier vectors written out directly.
fn fourier_vector(m: usize) -> [C64; D] {
    let s = 1.0 / (D as f64).sqrt();
    std::array::from_fn(|k| C64::from_polar(s, 2.0 * PI * ((m * k) % D) as f64 / D as f64))
}

fn level_vector(m: usize) -> [C64; D] {
    std::array::from_fn(|k| c(if k == m { 1.0 } else { 0.0 }))
}

/// Amplitude `⟨abc|Ψ⟩`: `1/√6` on the six permutation kets.
fn psi(a: usize, b: usize, c_: usize) -> C64 {
    if a != b && b != c_ && a != c_ {
        c(1.0 / 6f64.sqrt())
    } else {
        c(0.0)
    }
}

/// `|⟨v_a, v_b, v_c|Ψ⟩|²` by explicit 27-term contraction.
fn triple_probability(va: &[C64; D], vb: &[C64; D], vc: &[C64; D]) -> f64 {
    let mut amp = c(0.0);
    for (i, j, k) in iproduct!(0..D, 0..D, 0..D) {
        amp += va[i].conj() * vb[j].conj() * vc[k].conj() * psi(i, j, k);
    }
    amp.norm_sqr()
}

/// Same-basis joint table `P[a][b][c]` with every party using `vectors`.
fn same_basis_table(vectors: &[[C64; D]; D]) -> [[[f64; D]; D]; D] {
    let mut t = [[[0.0; D]; D]; D];
    for (a, b, c_) in iproduct!(0..D, 0..D, 0..D) {
        t[a][b][c_] = triple_probability(&vectors[a], &vectors[b], &vectors[c_]);
    }
    t
}

fn fourier_vectors() -> [[C64; D]; D] {
    std::array::from_fn(fourier_vector)
}

fn level_vectors() -> [[C64; D]; D] {
    std::array::from_fn(level_vector)
}

/// Fourier-basis probabilities of the triples `(m, m, m)` and of the six
/// permutation triples; every other triple has probability zero.
pub fn fourier_correlation_probabilities() -> (f64, f64) {
    let t = same_basis_table(&fourier_vectors());
    (t[0][0][0], t[0][1][2])
}

/// Probability of each permutation triple in the level basis.
pub fn computational_permutation_probability() -> f64 {
    same_basis_table(&level_vectors())[0][1][2]
}

/// Probability that three independent uniform picks from `n_bases` agree.
pub fn sharing_sift_fraction(n_bases: usize) -> f64 {
    let n = n_bases as f64;
    n * (1.0 / n).powi(3)
}

/// `P(Alice = a | other = x)` over sifted rounds, pooled over the two full
/// bases picked uniformly; `other` is 1 for Bob, 2 for Charlie.
pub fn sharing_pooled_conditional(other: usize) -> [[f64; D]; D] {
    let tables = [same_basis_table(&level_vectors()), same_basis_table(&fourier_vectors())];
    let mut joint = [[0.0; D]; D];
    for t in &tables {
        for (a, b, c_) in iproduct!(0..D, 0..D, 0..D) {
            let x = if other == 1 { b } else { c_ };
            joint[x][a] += 0.5 * t[a][b][c_];
        }
    }
    normalize_rows(joint)
}

/// `P(Alice = a | other = x)` in a single basis (`fourier` or levels).
pub fn sharing_conditional_in_basis(other: usize, fourier: bool) -> [[f64; D]; D] {
    let t = if fourier {
        same_basis_table(&fourier_vectors())
    } else {
        same_basis_table(&level_vectors())
    };
    let mut joint = [[0.0; D]; D];
    for (a, b, c_) in iproduct!(0..D, 0..D, 0..D) {
        let x = if other == 1 { b } else { c_ };
        joint[x][a] += t[a][b][c_];
    }
    normalize_rows(joint)
}

fn normalize_rows(mut m: [[f64; D]; D]) -> [[f64; D]; D] {
    for row in &mut m {
        let s: f64 = row.iter().sum();
        for x in row.iter_mut() {
            *x /= s;
        }
    }
    m
}

/// `ρ_AB` from the 27 amplitudes by summing over Charlie's level.
fn reduced_ab() -> DMatrix<C64> {
    DMatrix::from_fn(D * D, D * D, |r, s| {
        let (a, b) = (r / D, r % D);
        let (a2, b2) = (s / D, s % D);
        (0..D).map(|k| psi(a, b, k) * psi(a2, b2, k).conj()).sum()
    })
}

fn projector(v: &[C64; D]) -> DMatrix<C64> {
    let v = DVector::from_column_slice(v);
    &v * v.adjoint()
}

fn embed(op: &DMatrix<C64>, party: usize) -> DMatrix<C64> {
    let id = DMatrix::<C64>::identity(D, D);
    if party == 0 {
        op.kronecker(&id)
    } else {
        id.kronecker(op)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Levels,
    Plus,
}

/// Click vectors of a two-level basis on `pair`.
fn subspace_vectors(kind: Kind, (i, j): (usize, usize)) -> [[C64; D]; 2] {
    let (ei, ej) = (level_vector(i), level_vector(j));
    match kind {
        Kind::Levels => [ei, ej],
        Kind::Plus => {
            let s = 1.0 / 2f64.sqrt();
            [
                std::array::from_fn(|k| (ei[k] + ej[k]) * s),
                std::array::from_fn(|k| (ei[k] - ej[k]) * s),
            ]
        }
    }
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (0, 2)];

fn pair_distribution(policy: SubspacePolicy) -> Vec<(f64, (usize, usize))> {
    match policy {
        SubspacePolicy::Fixed(p) => vec![(1.0, p.levels())],
        SubspacePolicy::Random => PAIRS.iter().map(|&p| (1.0 / 3.0, p)).collect(),
    }
}

/// Eve's intercept as a dephasing channel on her target, averaged over her
/// basis choice (and her guess of the pair under a random policy).
fn eve_channel(rho: &DMatrix<C64>, eve: &EveStrategy, policy: SubspacePolicy) -> DMatrix<C64> {
    let party = eve.target.index();
    let mut out = DMatrix::zeros(D * D, D * D);
    let wb = 1.0 / eve.bases.len() as f64;
    for &basis in &eve.bases {
        let measurements: Vec<(f64, Vec<[C64; D]>)> = match basis {
            EveBasis::Computational => vec![(1.0, level_vectors().to_vec())],
            EveBasis::Fourier => vec![(1.0, fourier_vectors().to_vec())],
            EveBasis::SubspaceComputational | EveBasis::SubspaceSuperposition => {
                let kind = if basis == EveBasis::SubspaceComputational { Kind::Levels } else { Kind::Plus };
                pair_distribution(policy)
                    .into_iter()
                    .map(|(w, p)| {
                        let third = 3 - p.0 - p.1;
                        let mut v = subspace_vectors(kind, p).to_vec();
                        v.push(level_vector(third));
                        (w, v)
                    })
                    .collect()
            }
        };
        for (w, vectors) in measurements {
            for v in &vectors {
                let p = embed(&projector(v), party);
                out += (&p * rho * &p) * c(wb * w);
            }
        }
    }
    out
}

/// Exact sift fraction and error rate of the key-distribution protocol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QkdExact {
    pub sift_fraction: f64,
    pub qber: f64,
}

/// Sift fraction and QBER from the reduced state, Eve's channel, and a sum
/// over every basis and subspace choice of Alice and Bob.
pub fn qkd_exact(policy: SubspacePolicy, eve: Option<&EveStrategy>) -> QkdExact {
    let mut rho = reduced_ab();
    if let Some(e) = eve {
        rho = eve_channel(&rho, e, policy);
    }
    let (mut sift, mut err) = (0.0, 0.0);
    for (wa, pa) in pair_distribution(policy) {
        for (wb, pb) in pair_distribution(policy) {
            if pa != pb {
                continue;
            }
            for kind in [Kind::Levels, Kind::Plus] {
                let w = wa * wb * 0.25;
                let va = subspace_vectors(kind, pa);
                let vb = subspace_vectors(kind, pb);
                for (x, y) in iproduct!(0..2, 0..2) {
                    let op = projector(&va[x]).kronecker(&projector(&vb[y]));
                    let p = (op * &rho).trace().re;
                    sift += w * p;
                    let bob_key = if kind == Kind::Levels { 1 - y } else { y };
                    if x != bob_key {
                        err += w * p;
                    }
                }
            }
        }
    }
    QkdExact {
        sift_fraction: sift,
        qber: err / sift,
    }
}

/// Probability that both parties click when measuring the symmetric pair
/// on levels `branch` in subspace `pair`, maximized over the four basis
/// combinations.
pub fn branch_double_click(branch: (usize, usize), pair: (usize, usize)) -> f64 {
    let (i, j) = branch;
    let s = 1.0 / 2f64.sqrt();
    let v = DVector::from_fn(D * D, |r, _| {
        let (a, b) = (r / D, r % D);
        c(if (a, b) == (i, j) || (a, b) == (j, i) { s } else { 0.0 })
    });
    let rho = &v * v.adjoint();
    let mut worst: f64 = 0.0;
    for (ka, kb) in iproduct!([Kind::Levels, Kind::Plus], [Kind::Levels, Kind::Plus]) {
        let sum_a: DMatrix<C64> = subspace_vectors(ka, pair).iter().map(projector).sum();
        let sum_b: DMatrix<C64> = subspace_vectors(kb, pair).iter().map(projector).sum();
        worst = worst.max((sum_a.kronecker(&sum_b) * &rho).trace().re);
    }
    worst
}

/// Heralding success probability by brute force over every source level
/// triple and every photon-to-port routing (27 × 27 = 729 terms), for
/// default uniform sources and detector `j` requiring `l = j`.
pub fn herald_success_brute_force(u: &DMatrix<C64>) -> f64 {
    let amp_source = c(1.0 / 3f64.sqrt());
    // Amplitude per (partner ket, port → OAM record) event.
    let mut events: std::collections::BTreeMap<([usize; 3], [usize; 3]), C64> = Default::default();
    for (l0, l1, l2) in iproduct!(0..D, 0..D, 0..D) {
        let levels = [l0, l1, l2];
        for (j0, j1, j2) in iproduct!(0..D, 0..D, 0..D) {
            let ports = [j0, j1, j2];
            let mut seen = [usize::MAX; 3];
            let mut ok = true;
            for k in 0..3 {
                if seen[ports[k]] != usize::MAX {
                    ok = false;
                }
                seen[ports[k]] = levels[k];
            }
            if !ok || (0..3).any(|j| seen[j] != j) {
                continue;
            }
            let amp = (0..3).fold(c(1.0), |acc, k| acc * amp_source * u[(ports[k], k)]);
            *events.entry((levels, seen)).or_insert(c(0.0)) += amp;
        }
    }
    events.values().map(|a| a.norm_sqr()).sum()
}

pub fn dft3() -> DMatrix<C64> {
    let s = 1.0 / 3f64.sqrt();
    DMatrix::from_fn(3, 3, |j, k| C64::from_polar(s, 2.0 * PI * ((j * k) % 3) as f64 / 3.0))
}

/// Frozen reference constants, as stored in the constants file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConstants {
    pub computational_permutation_probability: f64,
    pub fourier_diagonal_probability: f64,
    pub fourier_permutation_probability: f64,
    pub sharing_sift_fraction: f64,
    pub sharing_alice_given_bob: [[f64; 3]; 3],
    pub sharing_alice_given_charlie: [[f64; 3]; 3],
    pub qkd_double_click_fixed: f64,
    pub qkd_off_branch_double_click: f64,
    pub qkd_sift_fixed: f64,
    pub qkd_sift_random: f64,
    pub qkd_qber_honest: f64,
    pub eve_subspace_sift: f64,
    pub eve_subspace_qber: f64,
    pub eve_full_sift: f64,
    pub eve_full_qber: f64,
    pub herald_dft_success: f64,
    pub herald_identity_success: f64,
}

impl OracleConstants {
    pub fn compute() -> Self {
        let (diag, perm) = fourier_correlation_probabilities();
        let fixed = SubspacePolicy::default();
        let honest = qkd_exact(fixed, None);
        let eve_sub = qkd_exact(fixed, Some(&EveStrategy::subspace(crate::engine::Party::Bob)));
        let eve_full = qkd_exact(fixed, Some(&EveStrategy::full(crate::engine::Party::Bob)));
        let p01 = PAIRS[0];
        Self {
            computational_permutation_probability: computational_permutation_probability(),
            fourier_diagonal_probability: diag,
            fourier_permutation_probability: perm,
            sharing_sift_fraction: sharing_sift_fraction(2),
            sharing_alice_given_bob: sharing_pooled_conditional(1),
            sharing_alice_given_charlie: sharing_pooled_conditional(2),
            qkd_double_click_fixed: honest.sift_fraction * 2.0,
            qkd_off_branch_double_click: branch_double_click((1, 2), p01).max(branch_double_click((2, 0), p01)),
            qkd_sift_fixed: honest.sift_fraction,
            qkd_sift_random: qkd_exact(SubspacePolicy::Random, None).sift_fraction,
            qkd_qber_honest: honest.qber,
            eve_subspace_sift: eve_sub.sift_fraction,
            eve_subspace_qber: eve_sub.qber,
            eve_full_sift: eve_full.sift_fraction,
            eve_full_qber: eve_full.qber,
            herald_dft_success: herald_success_brute_force(&dft3()),
            herald_identity_success: herald_success_brute_force(&DMatrix::identity(3, 3)),
        }
    }

    fn values(&self) -> Vec<f64> {
        let mut v = vec![
            self.computational_permutation_probability,
            self.fourier_diagonal_probability,
            self.fourier_permutation_probability,
            self.sharing_sift_fraction,
            self.qkd_double_click_fixed,
            self.qkd_off_branch_double_click,
            self.qkd_sift_fixed,
            self.qkd_sift_random,
            self.qkd_qber_honest,
            self.eve_subspace_sift,
            self.eve_subspace_qber,
            self.eve_full_sift,
            self.eve_full_qber,
            self.herald_dft_success,
            self.herald_identity_success,
        ];
        v.extend(self.sharing_alice_given_bob.iter().flatten());
        v.extend(self.sharing_alice_given_charlie.iter().flatten());
        v
    }

    /// Largest absolute difference over all fields.
    pub fn max_deviation(&self, other: &OracleConstants) -> f64 {
        self.values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

fn row_text(m: &[[f64; 3]; 3]) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|r| format!("[{:?}, {:?}, {:?}]", r[0], r[1], r[2]))
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Constants file with one provenance comment per value.
pub fn generate_constants_toml() -> String {
    let k = OracleConstants::compute();
    let mut out = String::from(
        "# Generated by `tripartite oracle`. Do not edit by hand.\n\
         # Every value is an exact finite computation; none is sampled.\n\n",
    );
    let mut put = |comment: &str, key: &str, value: String| {
        out.push_str(&format!("# {comment}\n{key} = {value}\n"));
    };
    put(
        "27-amplitude contraction, all parties in the level basis: each permutation triple",
        "computational_permutation_probability",
        format!("{:?}", k.computational_permutation_probability),
    );
    put(
        "27-amplitude contraction, all parties Fourier: triple (m, m, m)",
        "fourier_diagonal_probability",
        format!("{:?}", k.fourier_diagonal_probability),
    );
    put(
        "27-amplitude contraction, all parties Fourier: permutation triple",
        "fourier_permutation_probability",
        format!("{:?}", k.fourier_permutation_probability),
    );
    put(
        "three uniform picks from two bases agree: 2 * (1/2)^3",
        "sharing_sift_fraction",
        format!("{:?}", k.sharing_sift_fraction),
    );
    put(
        "P(alice | bob) on sifted rounds, pooled over both bases; row = bob outcome",
        "sharing_alice_given_bob",
        row_text(&k.sharing_alice_given_bob),
    );
    put(
        "P(alice | charlie) on sifted rounds, pooled over both bases; row = charlie outcome",
        "sharing_alice_given_charlie",
        row_text(&k.sharing_alice_given_charlie),
    );
    put(
        "reduced state, subspace {0,1}, same basis: both click",
        "qkd_double_click_fixed",
        format!("{:?}", k.qkd_double_click_fixed),
    );
    put(
        "pairs on {1,2} and {2,0}, subspace {0,1}, worst basis combination: both click",
        "qkd_off_branch_double_click",
        format!("{:?}", k.qkd_off_branch_double_click),
    );
    put(
        "reduced state, subspace {0,1}, sum over basis choices",
        "qkd_sift_fixed",
        format!("{:?}", k.qkd_sift_fixed),
    );
    put(
        "reduced state, independent uniform subspaces, sum over all choices",
        "qkd_sift_random",
        format!("{:?}", k.qkd_sift_random),
    );
    put("reduced state, no eavesdropper", "qkd_qber_honest", format!("{:?}", k.qkd_qber_honest));
    put(
        "Eve on Bob, uniform over the two bases of {0,1} completed by level 2: sift fraction",
        "eve_subspace_sift",
        format!("{:?}", k.eve_subspace_sift),
    );
    put(
        "Eve on Bob, uniform over the two bases of {0,1} completed by level 2: error rate",
        "eve_subspace_qber",
        format!("{:?}", k.eve_subspace_qber),
    );
    put(
        "Eve on Bob, uniform over full level and Fourier bases, subspace {0,1}: sift fraction",
        "eve_full_sift",
        format!("{:?}", k.eve_full_sift),
    );
    put(
        "Eve on Bob, uniform over full level and Fourier bases, subspace {0,1}: error rate",
        "eve_full_qber",
        format!("{:?}", k.eve_full_qber),
    );
    put(
        "729-term enumeration, DFT coupler, detector j requires l = j",
        "herald_dft_success",
        format!("{:?}", k.herald_dft_success),
    );
    put(
        "729-term enumeration, identity coupler",
        "herald_identity_success",
        format!("{:?}", k.herald_identity_success),
    );
    out
}
