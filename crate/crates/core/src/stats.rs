//! Statistical acceptance helpers.

use serde::{Deserialize, Serialize};

/// Number of standard deviations used for every Monte Carlo assertion.
pub const SIGMA_BAND: f64 = 4.0;

/// Outcome of comparing an empirical frequency with an exact probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyCheck {
    pub expected: f64,
    pub observed: f64,
    pub successes: u64,
    pub trials: u64,
    pub allowed: f64,
    pub pass: bool,
}

/// `|k/n − p| ≤ 4·√(p(1−p)/n)`. For `p ∈ {0, 1}` the band collapses to zero
/// and the check is exact.
pub fn within_sigma(successes: u64, trials: u64, p: f64) -> FrequencyCheck {
    let observed = if trials == 0 { f64::NAN } else { successes as f64 / trials as f64 };
    let allowed = if trials == 0 {
        0.0
    } else {
        SIGMA_BAND * (p * (1.0 - p) / trials as f64).sqrt()
    };
    let pass = trials > 0 && (observed - p).abs() <= allowed + 1e-15;
    FrequencyCheck {
        expected: p,
        observed,
        successes,
        trials,
        allowed,
        pass,
    }
}

/// Wilson score interval for `k` successes in `n` trials at normal quantile `z`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}
