//! Cross-checks between the gradient evaluators on random instances.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::flow::{grad_s, update_step, MatrixFlowState};
use super::shift::{grad_theta_commutator, grad_theta_fd, grad_theta_shift};
use crate::dqnn::{
    cost, global_deep_haar, global_deep_rpqc, local_m1_toy_random, local_m2_brick,
    map_to_hardware_efficient, CostKind, CostSpec, Family, GlobalAnsatz, NetworkSpec,
    RpqcParameterRef,
};
use crate::ensembles::{
    derive_seed, label_tag, sample_product_training_pair, InputEnsemble, RngStream,
};
use crate::error::{Error, Result};

/// Default central-difference step for the shift checks.
pub const SHIFT_FD_STEP: f64 = 1e-4;
/// Forward-difference steps for the flow checks, coarse then fine.
pub const FLOW_STEPS: [f64; 2] = [1e-3, 1e-4];
/// Below this the fine forward-difference error is treated as exact.
pub const FLOW_EXACT_FLOOR: f64 = 1e-9;
/// Allowed cost difference between a brick network and its circuit.
pub const HEA_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftFdCheck {
    pub family: Family,
    pub instance: usize,
    pub parameter: RpqcParameterRef,
    pub shift: f64,
    pub fd: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowFdCheck {
    pub instance: usize,
    pub exact: f64,
    pub err_coarse: f64,
    pub err_fine: f64,
    /// `log10(err_coarse / err_fine)`; 1 for a first-order error.
    pub log_ratio: f64,
    /// Slope constant `|err_coarse| / ε_coarse`.
    pub k: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeaCheck {
    pub instance: usize,
    pub cost_kind: CostKind,
    pub dqnn: f64,
    pub hea: f64,
    pub pass: bool,
}

/// Random instance of a family with a uniformly chosen rotation.
fn random_instance<R: Rng + ?Sized>(
    family: Family,
    rng: &mut R,
) -> Result<(NetworkSpec, RpqcParameterRef)> {
    let spec = match family {
        Family::GlobalDeep => {
            let widths: &[usize] =
                [&[1, 1][..], &[2, 2], &[1, 2, 1], &[2, 1]][rng.random_range(0..4)];
            let ansatz = if rng.random_bool(0.5) {
                GlobalAnsatz::DeepCircuit
            } else {
                GlobalAnsatz::HaarFactors
            };
            global_deep_rpqc(widths, ansatz, rng)?.0
        }
        Family::LocalM1Toy => {
            let n = rng.random_range(1..=3);
            let layers = rng.random_range(1..=2);
            local_m1_toy_random(n, layers, rng)?
        }
        Family::LocalM2Brick => {
            let n = if rng.random_bool(0.5) { 2 } else { 4 };
            local_m2_brick(n, 2, rng)?
        }
        Family::Custom => return Err(Error::Unsupported("no random custom networks".into())),
    };
    let refs = spec.rotation_refs();
    let pref = refs[rng.random_range(0..refs.len())];
    Ok((spec, pref))
}

fn random_cost<R: Rng + ?Sized>(spec: &NetworkSpec, rng: &mut R) -> CostSpec {
    let kind = if rng.random_bool(0.5) {
        CostKind::Global
    } else {
        CostKind::Local
    };
    let pair = sample_product_training_pair(spec.n_in(), spec.n_out(), InputEnsemble::Product, rng);
    CostSpec::new(kind, vec![pair])
}

/// Parameter shift against a central difference with step `step` on
/// `instances` random draws; tolerance `max(1e−6, 10·step²)`.
pub fn shift_vs_fd(
    family: Family,
    instances: usize,
    seed: u64,
    step: f64,
) -> Result<Vec<ShiftFdCheck>> {
    let base = derive_seed(seed, label_tag(family.name()));
    let tolerance = f64::max(1e-6, 10.0 * step * step);
    (0..instances)
        .map(|i| {
            let mut rng = RngStream::new(base, i as u64).rng();
            let (spec, pref) = random_instance(family, &mut rng)?;
            let cs = random_cost(&spec, &mut rng);
            let shift = grad_theta_shift(&spec, &cs, pref)?;
            let fd = grad_theta_fd(&spec, &cs, pref, step)?;
            Ok(ShiftFdCheck {
                family,
                instance: i,
                parameter: pref,
                shift,
                fd,
                tolerance,
                pass: (shift - fd).abs() <= tolerance,
            })
        })
        .collect()
}

/// Flow derivative against forward differences of the flowed cost.
///
/// Passes when the two errors shrink at first order, i.e. their log-ratio is
/// `1 ± 0.3`, or when the fine error is already below [`FLOW_EXACT_FLOOR`].
pub fn flow_vs_fd(instances: usize, seed: u64) -> Result<Vec<FlowFdCheck>> {
    let base = derive_seed(seed, label_tag("matrix-flow"));
    (0..instances)
        .map(|i| {
            let mut rng = RngStream::new(base, i as u64).rng();
            let widths: &[usize] = [&[1, 1][..], &[2, 2], &[1, 2, 1]][rng.random_range(0..3)];
            let spec = global_deep_haar(widths, &mut rng)?;
            let flow = MatrixFlowState::from_network(&spec)?.with_random_generators(&mut rng)?;
            let cs = random_cost(&spec, &mut rng);
            let exact = grad_s(&flow, &spec, &cs)?;
            let c0 = cost(&spec, &cs)?;
            let err = |eps: f64| -> Result<f64> {
                let moved = update_step(flow.clone(), eps)?;
                Ok((cost(&moved.network(&spec)?, &cs)? - c0) / eps - exact)
            };
            let (coarse, fine) = (err(FLOW_STEPS[0])?, err(FLOW_STEPS[1])?);
            let log_ratio = (coarse / fine).abs().log10();
            let pass = fine.abs() < FLOW_EXACT_FLOOR || (log_ratio - 1.0).abs() <= 0.3;
            Ok(FlowFdCheck {
                instance: i,
                exact,
                err_coarse: coarse,
                err_fine: fine,
                log_ratio,
                k: coarse.abs() / FLOW_STEPS[0],
                pass,
            })
        })
        .collect()
}

/// Cost of random brick networks of width `n` and depth `layers` against
/// the cost of their hardware-efficient circuits.
pub fn hea_vs_dqnn(draws: usize, n: usize, layers: usize, seed: u64) -> Result<Vec<HeaCheck>> {
    let base = derive_seed(seed, label_tag("hardware-efficient"));
    (0..draws)
        .map(|i| {
            let mut rng = RngStream::new(base, i as u64).rng();
            let spec = local_m2_brick(n, layers, &mut rng)?;
            let cs = random_cost(&spec, &mut rng);
            let dqnn = cost(&spec, &cs)?;
            let hea = map_to_hardware_efficient(&spec)?.cost(&cs)?;
            Ok(HeaCheck {
                instance: i,
                cost_kind: cs.kind,
                dqnn,
                hea,
                pass: (dqnn - hea).abs() <= HEA_TOL,
            })
        })
        .collect()
}

/// Shift rule against the commutator-trace form on one instance with a
/// two-qubit perceptron; returns both values.
pub fn commutator_identity(seed: u64) -> Result<(f64, f64)> {
    let mut rng = RngStream::new(seed, 0).rng();
    let (spec, pref) = global_deep_rpqc(&[1, 1], GlobalAnsatz::HaarFactors, &mut rng)?;
    let cs = random_cost(&spec, &mut rng);
    Ok((
        grad_theta_shift(&spec, &cs, pref)?,
        grad_theta_commutator(&spec, &cs, pref)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_batches_pass() {
        for family in [Family::GlobalDeep, Family::LocalM1Toy, Family::LocalM2Brick] {
            let checks = shift_vs_fd(family, 5, 1, SHIFT_FD_STEP).unwrap();
            assert!(checks.iter().all(|c| c.pass), "{checks:?}");
        }
        let flows = flow_vs_fd(3, 1).unwrap();
        assert!(flows.iter().all(|c| c.pass), "{flows:?}");
    }

    #[test]
    fn batches_are_reproducible() {
        assert_eq!(
            shift_vs_fd(Family::LocalM2Brick, 3, 9, 1e-4).unwrap(),
            shift_vs_fd(Family::LocalM2Brick, 3, 9, 1e-4).unwrap()
        );
    }

    #[test]
    fn brick_networks_match_their_circuits() {
        let checks = hea_vs_dqnn(10, 4, 2, 3).unwrap();
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
        assert!(checks.iter().any(|c| c.cost_kind == CostKind::Global));
        assert!(checks.iter().any(|c| c.cost_kind == CostKind::Local));
        assert!(hea_vs_dqnn(1, 3, 2, 3).is_err());
    }

    #[test]
    fn custom_family_is_unsupported() {
        assert!(matches!(
            shift_vs_fd(Family::Custom, 1, 0, 1e-4),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn identity_holds() {
        let (a, b) = commutator_identity(4).unwrap();
        assert!((a - b).abs() < 1e-9);
    }
}
