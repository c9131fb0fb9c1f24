//! Binary clustering by simulated adiabatic quantum annealing.
//!
//! The pipeline turns a 2-means instance into an Ising model over one
//! spin per point — couplings are the (kernelized) Gram matrix of the
//! centered data — and integrates the time-dependent Schrodinger
//! equation from the transverse-field ground state towards the problem
//! Hamiltonian. The most probable basis states of the final register
//! encode the bipartition; an exhaustive ground-state oracle and a
//! classical Lloyd baseline validate the result.
//!
//! Modules follow the pipeline order:
//!
//! - [`data`]: data sets, centering, CSV I/O, blob generation
//! - [`cluster`]: assignments, scatter statistics, Lloyd's algorithm
//! - [`kernel`]: kernels and Gram matrices
//! - [`ising`]: Ising builders, energies, codecs, brute-force oracle
//! - [`qsim`]: matrix-free Schrodinger integration and traces

pub mod cluster;
pub mod data;
pub mod error;
pub mod ising;
pub mod kernel;
pub mod qsim;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
