//! Pauli-string and fermionic operator algebra.

mod fermion;
mod pauli;

pub use fermion::{
    jordan_wigner, number_operator, s2_operator, sz_operator, FermionOperator, Ladder,
};
pub use pauli::{pauli_multiply, Axis, PauliOperator, PauliString, HERMITIAN_TOL, ZERO_TOL};
pub(crate) use pauli::i_pow;
