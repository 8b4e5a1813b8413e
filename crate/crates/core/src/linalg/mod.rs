//! Dense complex linear algebra for qubit registers.
//!
//! Qubit `q` is bit `q` of a basis index. `kron(a, b)` puts `b` on the low
//! qubits, so a register `q_{n-1} … q_0` is `A_{n-1} ⊗ … ⊗ A_0`.

mod matrix;
mod register;
mod state;

pub use matrix::{
    c64, commutator, herm_expm, kron, kron_vec, ComplexMatrix, C64, HERMITIAN_TOL, I, ONE,
    UNITARY_TOL, ZERO,
};
pub use register::{
    apply_to_density, apply_to_vector, check_targets, embed_operator, partial_trace_dims,
    partial_trace_qubits, swap_qubits, SubsystemLayout,
};
pub(crate) use state::real_part;
pub use state::{product_vector, QuantumState, EIGEN_FLOOR, STATE_TOL};
