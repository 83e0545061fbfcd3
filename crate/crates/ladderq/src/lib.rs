//! Ladder-operator toolkit for composite finite-dimensional quantum channels.
//!
//! The crate builds the SU(2) ladder operators associated with an arbitrary
//! orthonormal basis of an N-dimensional space, couples two such spaces through
//! Clebsch–Gordan coefficients, and works with density matrices that are
//! diagonal in the coupled basis: reductions to the subchannels, von Neumann
//! and entanglement entropies, eigenvalue-based entanglement indicators for
//! qubit ⊗ qunit channels, and simulated quantum tomography with linear
//! inversion.
//!
//! Modules mirror the pipeline:
//!
//! * [`spinops`] — ladder operators, diagonal observables, tomography
//!   operator families for a single channel;
//! * [`coupling`] — Clebsch–Gordan coefficients and the coupled basis of a
//!   bipartite channel;
//! * [`states`] — composite-channel states (spectral or matrix form),
//!   reductions and joint measurement statistics;
//! * [`entropy`] — entropy quantities, closed forms for the two-qubit family
//!   and Holevo estimates;
//! * [`witness`] — entanglement indicators from the eigenvalue structure plus
//!   an independent PPT oracle;
//! * [`tomography`] — measurement simulation and least-squares state
//!   reconstruction;
//! * [`cli`] — report builders behind the `ladderq` command-line tool.

pub mod cli;
pub mod coupling;
pub mod entropy;
mod error;
pub mod halfint;
pub mod matrix;
pub mod spinops;
pub mod states;
pub mod tomography;
pub mod witness;

pub use error::{Error, Result};
pub use halfint::HalfInteger;
pub use matrix::ComplexMatrix;
