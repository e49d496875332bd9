//! Height, step-interface and envelope processes on shared TASEP clocks.

pub mod envelope;
pub mod height;
pub mod interface;
pub mod verify;

pub use envelope::{envelope, finite_k_window, second_class_variational, InterfaceFamily};
pub use height::{evolve_height, height_from_occupancy, occupancy_from_height, Anchor, HeightProcess, HeightProfile};
pub use interface::{evolve_interface, Interface, InterfaceProcess};
pub use verify::{verify_seed, VerifyOutcome, VerifySetup};
