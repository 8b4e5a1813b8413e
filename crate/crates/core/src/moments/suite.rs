//! Batch of Monte-Carlo-versus-exact checks for every moment identity.

use serde::{Deserialize, Serialize};

use super::exact::{
    first_moment_exact, second_moment_exact_chain, second_moment_exact_product,
    subsystem_twirl_exact, verify_bitstring_decomposition,
};
use super::lemmas::{verify_lemma2_zero, verify_lemma3_formula, Lemma2Instance, Lemma3Instance};
use super::mc::{mc_haar_integrals, MomentEstimate};
use crate::ensembles::{derive_seed, ginibre_matrix, haar_unitary, label_tag, RngStream};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, SubsystemLayout, C64, ZERO};

/// Residual allowed for the deterministic block-expansion identity.
pub const DECOMPOSITION_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentSuiteConfig {
    pub samples: usize,
    pub instances: usize,
    /// Unitary dimensions for the single-unitary identities.
    pub dims: Vec<usize>,
    /// Subsystem dimensions for the four-party identities.
    pub lemma_dims: [usize; 4],
    /// Allowed deviation in standard errors.
    pub sigmas: f64,
    pub seed: u64,
}

impl Default for MomentSuiteConfig {
    fn default() -> Self {
        MomentSuiteConfig {
            samples: 100_000,
            instances: 1,
            dims: vec![2, 4],
            lemma_dims: [2; 4],
            sigmas: 4.0,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub identity: String,
    pub dim: usize,
    pub instance: usize,
    pub estimate: C64,
    /// Zero for deterministic identities.
    pub stderr: f64,
    pub expected: C64,
    pub samples: usize,
    pub pass: bool,
}

impl MomentCheck {
    fn mc(
        identity: &str,
        dim: usize,
        instance: usize,
        est: MomentEstimate,
        expected: C64,
        sigmas: f64,
    ) -> Self {
        MomentCheck {
            identity: identity.to_string(),
            dim,
            instance,
            estimate: est.value,
            stderr: est.stderr,
            expected,
            samples: est.samples,
            pass: est.agrees_with(expected, sigmas),
        }
    }
}

fn stream(seed: u64, label: &str, dim: usize, instance: usize) -> RngStream {
    RngStream::new(
        derive_seed(derive_seed(seed, label_tag(label)), dim as u64),
        instance as u64,
    )
}

/// Single-unitary identities at dimension `d`, all integrands on shared draws.
fn single_unitary_checks(
    cfg: &MomentSuiteConfig,
    d: usize,
    instance: usize,
) -> Result<Vec<MomentCheck>> {
    let mut rng = stream(cfg.seed, "operands", d, instance).rng();
    let ops: Vec<ComplexMatrix> = (0..4).map(|_| ginibre_matrix(d, d, &mut rng)).collect();
    let (a, b, c, dd) = (&ops[0], &ops[1], &ops[2], &ops[3]);
    // twirl of the second factor of a 2 × d space, traced against a probe
    let ta = ginibre_matrix(2 * d, 2 * d, &mut rng);
    let tb = ginibre_matrix(2 * d, 2 * d, &mut rng);
    let twirl_layout = SubsystemLayout::subsystems(&[2, d], &[1])?;
    let est = mc_haar_integrals(
        |us| {
            let v = &us[0];
            let vd = v.dagger();
            let vav = &(v * a) * &vd;
            let vcv = &(v * c) * &vd;
            let first = vav.trace_product(b);
            let chain = (&vav * b).trace_product(&(&vcv * dd));
            let product = first * vcv.trace_product(dd);
            let mut tw = ta.clone();
            twirl_layout.conjugate(v, &mut tw)?;
            Ok(vec![first, chain, product, tw.trace_product(&tb)])
        },
        &[d],
        cfg.samples,
        stream(cfg.seed, "single-unitary", d, instance),
    )?;
    let twirl_exact = subsystem_twirl_exact(&ta, (2, d))?.trace_product(&tb);
    let mut rows = vec![
        MomentCheck::mc(
            "first-moment",
            d,
            instance,
            est[0],
            first_moment_exact(a, b)?,
            cfg.sigmas,
        ),
        MomentCheck::mc(
            "second-moment-chain",
            d,
            instance,
            est[1],
            second_moment_exact_chain(a, b, c, dd)?,
            cfg.sigmas,
        ),
        MomentCheck::mc(
            "second-moment-product",
            d,
            instance,
            est[2],
            second_moment_exact_product(a, b, c, dd)?,
            cfg.sigmas,
        ),
        MomentCheck::mc(
            "subsystem-twirl",
            d,
            instance,
            est[3],
            twirl_exact,
            cfg.sigmas,
        ),
    ];
    let v = haar_unitary(d, &mut rng);
    let residual = verify_bitstring_decomposition(&ta, &tb, (2, d), &v)?;
    rows.push(MomentCheck {
        identity: "block-decomposition".into(),
        dim: d,
        instance,
        estimate: C64::new(residual, 0.0),
        stderr: 0.0,
        expected: ZERO,
        samples: 0,
        pass: residual <= DECOMPOSITION_TOL,
    });
    Ok(rows)
}

fn four_party_checks(cfg: &MomentSuiteConfig, instance: usize) -> Result<Vec<MomentCheck>> {
    let dims = cfg.lemma_dims;
    let total: usize = dims.iter().product();
    let mut rng = stream(cfg.seed, "four-party-operands", total, instance).rng();
    let l2 = Lemma2Instance::random(dims, &mut rng);
    let l3 = Lemma3Instance::random(dims, &mut rng);
    let zero = verify_lemma2_zero(
        &l2,
        cfg.samples,
        stream(cfg.seed, "commutator-average", total, instance),
    )?;
    let covering = Lemma2Instance {
        v_factors: vec![0, 1],
        ..l2
    };
    let zero_covering = verify_lemma2_zero(
        &covering,
        cfg.samples,
        stream(cfg.seed, "commutator-average-covering", total, instance),
    )?;
    let r = verify_lemma3_formula(
        &l3,
        cfg.samples,
        stream(cfg.seed, "projector-average", total, instance),
    )?;
    Ok(vec![
        MomentCheck::mc(
            "commutator-average-zero",
            total,
            instance,
            zero,
            ZERO,
            cfg.sigmas,
        ),
        MomentCheck::mc(
            "commutator-average-zero-covering",
            total,
            instance,
            zero_covering,
            ZERO,
            cfg.sigmas,
        ),
        MomentCheck::mc(
            "projector-trace-product",
            total,
            instance,
            r.trace_product,
            r.trace_product_exact,
            cfg.sigmas,
        ),
        MomentCheck::mc(
            "projector-product-of-traces",
            total,
            instance,
            r.product_of_traces,
            r.product_of_traces_exact,
            cfg.sigmas,
        ),
    ])
}

/// Every identity on `instances` random operand sets.
///
/// `commutator-average-zero` integrates `V` over `H₁ ⊗ H₃`, where the
/// average is not zero; `commutator-average-zero-covering` integrates it
/// over `H₁ ⊗ H₂`, the support of `H`, where it is.
pub fn run_moment_suite(cfg: &MomentSuiteConfig) -> Result<Vec<MomentCheck>> {
    if cfg.instances == 0 || cfg.dims.is_empty() || cfg.dims.contains(&0) {
        return Err(Error::InvalidArgument(
            "moment suite needs instances and nonzero dimensions".into(),
        ));
    }
    let mut rows = Vec::new();
    for &d in &cfg.dims {
        for i in 0..cfg.instances {
            rows.extend(single_unitary_checks(cfg, d, i)?);
        }
    }
    for i in 0..cfg.instances {
        rows.extend(four_party_checks(cfg, i)?);
    }
    Ok(rows)
}
