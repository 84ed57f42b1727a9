//! Statevector and density-matrix simulation, expectation values and gradients.
//!
//! Qubit 0 is the least significant bit of every basis index.

mod gradient;
pub(crate) mod kernels;
mod observable;
mod sim;
mod state;

pub use gradient::{adjoint_gradient, energy, finite_difference_gradient, gradient, gradient_compiled, partial_derivative};
pub use observable::{expectation, expectation_density, CompiledObservable};
pub use sim::{
    fidelity, output_state, partial_trace, partial_trace_density, run_channel, run_pure, uhlmann_fidelity,
    MAX_DENSITY_QUBITS, MAX_QUBITS,
};
pub use state::{DensityMatrix, StateVector};
