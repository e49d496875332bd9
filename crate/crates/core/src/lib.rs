//! Simulation and verification toolkit for one-dimensional exclusion
//! processes, second-class particles and last-passage percolation.

pub mod audit;
pub mod clock;
pub mod coupled;
pub mod current;
pub mod engine;
pub mod ensemble;
mod error;
pub mod exclusion;
pub mod kernel;
pub mod lpp;
pub mod occupancy;
pub mod rng;
pub mod stats;
pub mod variational;

pub use audit::{AuditReport, LightCone};
pub use clock::{ClockRealization, EventKey};
pub use coupled::{evolve_coupled, CoupledProcess, CoupledRun, CoupledState};
pub use current::{track_current, CurrentTally};
pub use engine::{EventLog, EventRecord, Observer, Simulation};
pub use error::{Error, Result};
pub use exclusion::{evolve, ExclusionProcess, ExclusionRun, MarginPolicy};
pub use kernel::JumpKernel;
pub use occupancy::{Boundary, Conditioning, Occupancy, Window};
