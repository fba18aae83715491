//! Linear-optics realization: heralded generation of the three-party state
//! from OAM-entangled pair sources, and the sorter / interferometer chain
//! that measures the level and superposition bases.

pub mod coupler;
pub mod setup;
pub mod sorter;
pub mod source;
pub mod three_port;

pub use coupler::{herald, herald_tripartite, CouplerUnitary, DetectorAssignment, HeraldResult};
pub use setup::{CouplerSpec, OpticalDetector, OpticalSetup};
pub use sorter::{
    default_cascade, hologram_shift, route_level, routing_table, sample_port, sorter_route, PortOutcome, SorterStage,
};
pub use source::{source_state, SourceSpec};
pub use three_port::{fourier_three_port, three_port_interferometer};
