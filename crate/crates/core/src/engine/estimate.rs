//! Error-rate estimation by public comparison of a random key sample.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Transcript;
use crate::error::{Error, Result};
use crate::rng::trial_rng;
use crate::stats::wilson_interval;

/// Normal quantile for the reported 95% interval.
pub const WILSON_Z: f64 = 1.96;

/// Stream index reserved for the sample draw, disjoint from trial streams
/// for any realistic trial count.
const SAMPLE_STREAM: u64 = u64::MAX;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QberEstimate {
    pub sample_size: u64,
    pub sample_errors: u64,
    pub estimate: f64,
    pub interval: (f64, f64),
    /// Alice's key symbols left after the sample is discarded.
    pub remaining_key: Vec<u8>,
}

/// Publicly compares a seeded random fraction of the sifted key, discards
/// it, and reports the error estimate with a Wilson interval.
pub fn estimate_qber(transcript: &Transcript, sample_fraction: f64) -> Result<QberEstimate> {
    if !(sample_fraction > 0.0 && sample_fraction < 1.0) {
        return Err(Error::OutOfRange(format!("sample fraction {sample_fraction} outside (0, 1)")));
    }
    let mut pairs = transcript.sifted_key_pairs();
    if pairs.is_empty() {
        return Err(Error::Empty("sifted key"));
    }
    let mut rng = trial_rng(transcript.seed, SAMPLE_STREAM);
    pairs.shuffle(&mut rng);
    let n = pairs.len();
    let k = ((sample_fraction * n as f64).round() as usize).clamp(1, n);
    let (sample, rest) = pairs.split_at(k);
    let errors = sample.iter().filter(|(a, b)| a != b).count() as u64;
    Ok(QberEstimate {
        sample_size: k as u64,
        sample_errors: errors,
        estimate: errors as f64 / k as f64,
        interval: wilson_interval(errors, k as u64, WILSON_Z),
        remaining_key: rest.iter().map(|&(a, _)| a).collect(),
    })
}
