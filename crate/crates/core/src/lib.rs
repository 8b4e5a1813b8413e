//! Simulator and statistics lab for dissipative perceptron quantum neural networks.
//!
//! Module map:
//! - [`linalg`]: dense complex matrices, register kernels, partial traces, states.
//! - [`ensembles`]: seeded RNG streams, Haar unitaries, Pauli-basis generators, training pairs.
//! - [`dqnn`]: network topology, dissipative forward pass, costs, hardware-efficient mapping.
//! - [`gradient`]: parameter-shift and finite-difference gradients, parameter-matrix flow.
//! - [`moments`]: Haar moment identities with Monte-Carlo cross-checks.
//! - [`variance`]: gradient statistics, closed-form references and sweep reports.
//!
//! Qubit `q` is bit `q` of a basis index. In a DQNN register the input layer
//! occupies the lowest qubits and the output layer the highest.

pub mod dqnn;
pub mod ensembles;
pub mod error;
pub mod gradient;
pub mod linalg;
pub mod moments;
pub mod variance;

pub use error::{Error, Result};

/// Artifact version embedded in every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
