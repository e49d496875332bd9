//! Last-passage percolation on the three-step and up-right lattices.

pub mod grid;
pub mod hitting;
pub mod passage;
pub mod shape;

pub use grid::{psi, psi_inverse, Lattice, WeightGrid};
pub use hitting::{hitting_time_passage, InterfaceRun};
pub use passage::{brute_force, corner_passage, lpp_three_step, lpp_three_step_without_vertical, lpp_upright, PassageTable};
pub use shape::{gamma_tilde, shape_g, shape_gamma};
