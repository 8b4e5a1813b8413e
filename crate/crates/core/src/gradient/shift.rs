//! Derivatives with respect to a single rotation angle.

use std::f64::consts::FRAC_PI_2;

use crate::dqnn::{
    cost, materialize_ops, observable, padded_input, run_ops, CostSpec, Generator, NetworkSpec,
    OpKind, RpqcParameterRef,
};
use crate::error::{Error, Result};
use crate::linalg::{commutator, real_part, ComplexMatrix, SubsystemLayout, C64, I};

/// Step used when a generator has no two-point shift rule.
pub const FALLBACK_FD_STEP: f64 = 1e-5;

/// `∂C/∂θ = [C(θ + π/2) − C(θ − π/2)] / 2` for `R(θ) = e^{−iθΓ/2}` with Pauli `Γ`.
///
/// The register is evolved once up to the rotation and then branched.
pub fn grad_theta_shift(
    spec: &NetworkSpec,
    cspec: &CostSpec,
    pref: RpqcParameterRef,
) -> Result<f64> {
    spec.validate()?;
    cspec.validate(spec.n_in(), spec.n_out())?;
    if !matches!(spec.generator(pref)?, Generator::Pauli(_)) {
        return Err(Error::NonPauliGenerator);
    }
    let theta = spec.angle(pref)?;
    let ops = spec.register_ops();
    let pos = spec.op_position(&ops, pref)?;
    let n = spec.total_qubits();
    let layout = SubsystemLayout::qubits(n, &spec.output_qubits())?;
    let mut total = 0.0;
    for pair in &cspec.pairs {
        let o = observable(cspec.kind, pair)?;
        let mut v = padded_input(spec, &pair.input)?;
        run_ops(&ops[..pos], &mut v, n)?;
        let branch = |shift: f64| -> Result<f64> {
            let mut w = v.clone();
            ops[pos].apply_with_angle(&mut w, n, Some(theta + shift))?;
            run_ops(&ops[pos + 1..], &mut w, n)?;
            real_part(layout.matrix_element(&w, &o, &w)?)
        };
        total += (branch(FRAC_PI_2)? - branch(-FRAC_PI_2)?) / 2.0;
    }
    Ok(total / cspec.pairs.len() as f64)
}

/// Central difference `[C(θ + h) − C(θ − h)] / 2h` through the layer-by-layer forward pass.
pub fn grad_theta_fd(
    spec: &NetworkSpec,
    cspec: &CostSpec,
    pref: RpqcParameterRef,
    step: f64,
) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step {step}"
        )));
    }
    let theta = spec.angle(pref)?;
    let plus = cost(&spec.with_angle(pref, theta + step)?, cspec)?;
    let minus = cost(&spec.with_angle(pref, theta - step)?, cspec)?;
    Ok((plus - minus) / (2.0 * step))
}

/// Shift rule for Pauli generators, central difference otherwise.
pub fn grad_theta(spec: &NetworkSpec, cspec: &CostSpec, pref: RpqcParameterRef) -> Result<f64> {
    match grad_theta_shift(spec, cspec, pref) {
        Err(Error::NonPauliGenerator) => grad_theta_fd(spec, cspec, pref, FALLBACK_FD_STEP),
        other => other,
    }
}

/// `(i/2) Tr[σ [Γ, B† O B]]` on the full register, with `σ` the state right
/// after the rotation and `B` everything applied after it.
pub fn grad_theta_commutator(
    spec: &NetworkSpec,
    cspec: &CostSpec,
    pref: RpqcParameterRef,
) -> Result<f64> {
    spec.validate()?;
    cspec.validate(spec.n_in(), spec.n_out())?;
    let ops = spec.register_ops();
    let pos = spec.op_position(&ops, pref)?;
    let n = spec.total_qubits();
    let gamma_local = match &ops[pos].kind {
        OpKind::PauliRotation { generator, .. } => generator.to_matrix(),
        OpKind::HermitianRotation { generator, .. } => (*generator).clone(),
        _ => unreachable!("op_position only returns rotations"),
    };
    let gamma = SubsystemLayout::qubits(n, &ops[pos].targets)?.embed(&gamma_local)?;
    let b = materialize_ops(&ops[pos + 1..], n)?;
    let out = SubsystemLayout::qubits(n, &spec.output_qubits())?;
    let mut total = 0.0;
    for pair in &cspec.pairs {
        let mut v = padded_input(spec, &pair.input)?;
        run_ops(&ops[..=pos], &mut v, n)?;
        let sigma = ComplexMatrix::projector(&v);
        let o_full = out.embed(&observable(cspec.kind, pair)?)?;
        let o_tilde = &(&b.dagger() * &o_full) * &b;
        let value: C64 = I * 0.5 * sigma.trace_product(&commutator(&gamma, &o_tilde));
        total += real_part(value)?;
    }
    Ok(total / cspec.pairs.len() as f64)
}
