//! State equivalence modulo global or per-party diagonal phases.

use super::layout;
use super::state::{PureState, QuantumState, C64};

/// Phase `c` with `y ≈ c·x`, if one exists within `tol` (max-norm).
pub fn global_phase(x: &PureState, y: &PureState, tol: f64) -> Option<C64> {
    if x.party_dims() != y.party_dims() {
        return None;
    }
    let (xa, ya) = (x.amplitudes(), y.amplitudes());
    let pivot = (0..xa.len()).max_by(|&a, &b| xa[a].norm().total_cmp(&xa[b].norm()))?;
    if xa[pivot].norm() <= tol {
        return (ya.iter().all(|a| a.norm() <= tol)).then_some(C64::new(1.0, 0.0));
    }
    let r = ya[pivot] / xa[pivot];
    let phase = r / r.norm();
    xa.iter()
        .zip(ya.iter())
        .all(|(a, b)| (b - a * phase).norm() <= tol)
        .then_some(phase)
}

pub fn equal_up_to_global_phase(x: &PureState, y: &PureState, tol: f64) -> bool {
    global_phase(x, y, tol).is_some()
}

/// Per-party diagonal phases: `phases[p][m]` multiplies level `m` of party `p`.
pub type LocalPhases = Vec<Vec<C64>>;

/// Applies `⊗_p diag(phases[p])` to `x`.
pub fn apply_local_phases(x: &PureState, phases: &LocalPhases) -> PureState {
    let dims = x.party_dims();
    let amps = x
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let d = layout::digits(i, dims);
            d.iter().enumerate().fold(a, |acc, (p, &m)| acc * phases[p][m])
        })
        .collect();
    PureState::new(dims.to_vec(), amps).expect("layout preserved")
}

/// Searches for diagonal unitaries `D_p` with `y ≈ (⊗_p D_p) x` within `tol`
/// (max-norm over amplitudes). A global phase is absorbed into party 0.
///
/// Every support amplitude gives one multiplicative constraint
/// `Π_p D_p[m_p] = y_i / x_i` on unit complex numbers. The integer
/// incidence system is brought to Smith form, which either yields a
/// solution or shows none exists; the candidate is then verified on every
/// amplitude, so a `Some` result is always a genuine witness.
pub fn equal_up_to_local_diagonal_phases(x: &PureState, y: &PureState, tol: f64) -> Option<LocalPhases> {
    let dims = x.party_dims();
    if dims != y.party_dims() {
        return None;
    }
    let offsets: Vec<usize> = dims
        .iter()
        .scan(0, |acc, &d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect();
    let vars: usize = dims.iter().sum();

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (i, (a, b)) in x.amplitudes().iter().zip(y.amplitudes().iter()).enumerate() {
        if (a.norm() - b.norm()).abs() > tol {
            return None;
        }
        if a.norm() <= tol {
            continue;
        }
        let levels = layout::digits(i, dims);
        let mut row = vec![0i64; vars];
        for (p, &m) in levels.iter().enumerate() {
            row[offsets[p] + m] = 1;
        }
        let r = b / a;
        rows.push(row);
        rhs.push(r / r.norm());
    }

    let solution = solve_unit_system(rows, rhs, vars);
    let phases: LocalPhases = dims
        .iter()
        .zip(&offsets)
        .map(|(&d, &o)| solution[o..o + d].to_vec())
        .collect();
    let candidate = apply_local_phases(x, &phases);
    candidate
        .amplitudes()
        .iter()
        .zip(y.amplitudes().iter())
        .all(|(a, b)| (a - b).norm() <= tol)
        .then_some(phases)
}

fn unit_pow(z: C64, k: i64) -> C64 {
    let w = z.powi(k as i32);
    w / w.norm()
}

/// Finds unit complex `v` with `Π_j v_j^{A_ij} = rhs_i` for all rows, using
/// unimodular row and column operations (Smith normal form). Returns some
/// assignment even when the system is inconsistent; callers verify.
#[allow(clippy::needless_range_loop)]
fn solve_unit_system(mut a: Vec<Vec<i64>>, mut rhs: Vec<C64>, vars: usize) -> Vec<C64> {
    let nrows = a.len();
    // Column transform: original vars = colt · reduced vars.
    let mut colt: Vec<Vec<i64>> = (0..vars)
        .map(|i| (0..vars).map(|j| i64::from(i == j)).collect())
        .collect();

    let swap_cols = |a: &mut Vec<Vec<i64>>, colt: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in colt.iter_mut() {
            row.swap(i, j);
        }
    };

    let mut t = 0;
    while t < nrows.min(vars) {
        // Smallest nonzero magnitude in the trailing block.
        let mut best: Option<(i64, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &v) in row.iter().enumerate().skip(t) {
                if v != 0 && best.is_none_or(|(b, _, _)| v.abs() < b) {
                    best = Some((v.abs(), i, j));
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        a.swap(t, pi);
        rhs.swap(t, pi);
        swap_cols(&mut a, &mut colt, t, pj);

        loop {
            let piv = a[t][t];
            let mut clean = true;
            for i in (t + 1)..nrows {
                let q = a[i][t] / piv;
                if q != 0 {
                    for j in t..vars {
                        a[i][j] -= q * a[t][j];
                    }
                    let v = rhs[i] * unit_pow(rhs[t], -q);
                    rhs[i] = v / v.norm();
                }
                clean &= a[i][t] == 0;
            }
            for j in (t + 1)..vars {
                let q = a[t][j] / piv;
                if q != 0 {
                    for row in a.iter_mut() {
                        row[j] -= q * row[t];
                    }
                    for row in colt.iter_mut() {
                        row[j] -= q * row[t];
                    }
                }
                clean &= a[t][j] == 0;
            }
            if clean {
                break;
            }
            // A remainder smaller than the pivot exists; bring it to the pivot.
            let mut best = (piv.abs(), t, t);
            for (i, row) in a.iter().enumerate().skip(t + 1) {
                if row[t] != 0 && row[t].abs() < best.0 {
                    best = (row[t].abs(), i, t);
                }
            }
            for j in (t + 1)..vars {
                if a[t][j] != 0 && a[t][j].abs() < best.0 {
                    best = (a[t][j].abs(), t, j);
                }
            }
            let (_, bi, bj) = best;
            a.swap(t, bi);
            rhs.swap(t, bi);
            swap_cols(&mut a, &mut colt, t, bj);
        }
        t += 1;
    }

    let reduced: Vec<C64> = (0..vars)
        .map(|j| {
            if j < t {
                let d = a[j][j] as f64;
                C64::from_polar(1.0, rhs[j].arg() / d)
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    (0..vars)
        .map(|v| {
            (0..vars).fold(C64::new(1.0, 0.0), |acc, j| {
                if colt[v][j] == 0 {
                    acc
                } else {
                    acc * unit_pow(reduced[j], colt[v][j])
                }
            })
        })
        .collect()
}
