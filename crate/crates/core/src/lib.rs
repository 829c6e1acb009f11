//! Exact finite-N simulation of SYK-based wormhole teleportation.
//!
//! States are dense vectors, so N (Majoranas per side) is limited to about 14.

pub mod error;
pub mod eternal;
pub mod fermion_algebra;
pub mod harness;
pub mod linalg;
pub mod models;
pub mod observables;
pub mod states;
pub mod size_winding;
pub mod teleport;

pub use error::{Error, Result};
