//! Seeded sampling: Haar unitaries, Pauli-basis Hermitian generators and
//! training pairs.

mod pauli;
mod rng;
mod samplers;

pub use pauli::{Pauli, PauliString};
pub use rng::{derive_seed, label_tag, RngStream, StreamRng};
pub use samplers::{
    ginibre_matrix, haar_qubit, haar_state, haar_unitary, random_bits, random_pauli_generator,
    sample_haar_unitary, sample_pauli_expansion, sample_pauli_hermitian,
    sample_product_training_pair, InputEnsemble, PauliExpansion,
};
