//! Exact finite-dimensional state algebra for multi-party qudit registers.
//!
//! Layout convention: amplitudes are row-major with party 0 varying
//! slowest, levels `a, b, c ↦ 0, 1, 2` and parties Alice, Bob, Charlie
//! ↦ 0, 1, 2. Projections use the Hermitian (conjugated) inner product.

pub mod basis;
pub mod layout;
pub mod ops;
pub mod phase;
pub mod state;

pub use basis::{fourier_basis, Basis, LevelPair, SubspaceMeasurement};
pub use ops::{
    born_probabilities, measure, measure_party, measure_projective, partial_trace, sample_index, subspace_joint_probabilities,
    subspace_measure, subspace_probabilities, tensor, PartialTrace, ProbabilityTable, SubspaceOutcome,
};
pub use phase::{
    apply_local_phases, equal_up_to_global_phase, equal_up_to_local_diagonal_phases, global_phase, LocalPhases,
};
pub use state::{MixedState, PureState, QuantumState, C64, PSD_TOL, TOL};
