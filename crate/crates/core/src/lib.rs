//! Variational quantum eigensolver toolkit built around hybrid ancilla
//! ansatzes: fermion-to-qubit mapping, circuit construction and compilation,
//! state-vector and density-matrix simulation, optimization and circuit
//! descriptors.

pub mod chemio;
pub mod circuit;
pub mod descriptors;
pub mod engine;
pub mod error;
pub mod exact;
pub mod operators;
pub mod vqe;

pub use error::{Error, Result};
