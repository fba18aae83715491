//! Simulation of the symmetric three-party qutrit state, the secret-sharing
//! and residual-entanglement key-distribution protocols built on it, and a
//! linear-optics model of its heralded preparation and measurement.
//!
//! Layout: amplitudes are row-major with party 0 slowest; parties Alice,
//! Bob, Charlie are 0, 1, 2 and levels a, b, c are 0, 1, 2.

pub mod engine;
pub mod error;
pub mod optics;
pub mod oracle;
pub mod par;
pub mod qudit;
pub mod rng;
pub mod states;
pub mod stats;

pub use error::{Error, Result};
