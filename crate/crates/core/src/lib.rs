//! Adiabatic hyperspherical three-body problem for spin-1, 2 and 3 bosons
//! with multichannel zero-range interactions.
//!
//! The crate is `no_std` and needs only `alloc`. Lengths are in units of the
//! van der Waals length, energies in units with ħ = m = 1.

#![no_std]

extern crate alloc;

pub mod a3b_model;
pub mod hyperangular_solver;
pub mod interaction;
pub mod linalg;
pub mod meanfield;
pub mod potentials;
mod roots;
pub mod spin_algebra;
mod trig;

pub use hyperangular_solver::{QContext, Region, Root, RootSet, SolverError};
pub use interaction::{Axis, SValue, ScatteringLengths};
pub use linalg::Matrix;
pub use spin_algebra::Spin;
