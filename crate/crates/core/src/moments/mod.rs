//! Haar moment identities: closed forms, Monte-Carlo integration and the
//! four-party averages behind the variance bounds.

mod exact;
mod lemmas;
mod mc;
mod suite;

pub use exact::{
    first_moment_exact, operator_block, second_moment_exact_chain, second_moment_exact_product,
    subsystem_twirl_exact, verify_bitstring_decomposition,
};
pub use lemmas::{
    verify_lemma2_zero, verify_lemma3_formula, Lemma2Instance, Lemma3Instance, Lemma3Result,
    PROJECTOR_TOL,
};
pub use mc::{mc_haar_integral, mc_haar_integrals, pairwise_sum, MomentEstimate, MIN_SAMPLES};
pub use suite::{run_moment_suite, MomentCheck, MomentSuiteConfig, DECOMPOSITION_TOL};
