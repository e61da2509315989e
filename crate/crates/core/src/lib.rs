//! Reduced density matrices of the transverse-field Ising chain and their
//! interferometric and Uhlmann geometric phases under local rotation loops.

pub mod error;
pub mod ising;
pub mod linalg;
pub mod output;
pub mod phases;
pub mod quad;
pub mod states;
pub mod sweep;

pub use error::{Error, Result};
pub use ising::{CouplingRatio, Correlators, IsingChain};
pub use phases::{phase_record, PhaseKinds, PhaseRecord};
pub use states::{single_site_state, two_site_state, LoopSpec, ReducedState, SingleSiteState, TwoSiteState};
pub use sweep::{preset, run_sweep, SweepConfig, SweepRecord};
