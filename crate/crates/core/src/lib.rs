//! Simulation and analysis of measurement-induced phase transitions in hybrid
//! random Clifford circuits.
//!
//! The crate is organised bottom-up:
//!
//! * [`gf2`] packs bit matrices and computes their rank over GF(2).
//! * [`clifford`] holds the 24-element single-qubit Clifford group and the
//!   11,520-element two-qubit Clifford group with CZ-based decompositions.
//! * [`graph`] is the stabilizer engine: a graph state plus one local Clifford
//!   per vertex, with gates, Pauli measurements and entanglement entropies.
//! * [`lattice`] describes rings, tori and the gate schedules acting on them.
//! * [`protocol`] drives single trajectories (1+1D and 2+1D circuits and the
//!   projective transverse-field Ising model) and records observables.
//! * [`clusters`] and [`percolation`] analyse connected components, either of
//!   the state graph or of classical percolation configurations.
//! * [`fss`] holds the finite-size-scaling toolkit: collapse cost function,
//!   optimizer, power-law fits and bootstrap.
//! * [`harness`] parses experiment files, fans trajectories out over a worker
//!   pool and writes CSV/JSON results.

pub mod clifford;
pub mod clusters;
mod error;
pub mod fss;
pub mod gf2;
pub mod graph;
pub mod harness;
pub mod lattice;
pub mod percolation;
pub mod protocol;
pub mod rng;

pub use error::{Error, Result};
