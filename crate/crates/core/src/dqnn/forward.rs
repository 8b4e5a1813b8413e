//! Dissipative forward pass.

use super::network::{NetworkSpec, RegisterOp};
use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, QuantumState, SubsystemLayout, C64, ONE, ZERO};

/// Output-layer state for input `rho_in`.
///
/// Works on two adjacent layers at a time: the current layer's state is
/// joined with `|0…0>` on the next layer, that layer's perceptrons act in
/// spec order, and the previous layer is traced out.
pub fn forward(spec: &NetworkSpec, rho_in: &QuantumState) -> Result<QuantumState> {
    spec.validate()?;
    if rho_in.num_qubits() != spec.n_in() {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit input for a network with {} input qubits",
            rho_in.num_qubits(),
            spec.n_in()
        )));
    }
    let mut rho = rho_in.to_density();
    for l in 1..spec.layer_widths.len() {
        let wp = spec.layer_widths[l - 1];
        let wc = spec.layer_widths[l];
        let reg = wp + wc;
        let mut zero = ComplexMatrix::zeros(1 << wc, 1 << wc);
        zero[(0, 0)] = ONE;
        let mut joint = kron(&zero, &rho);
        let local_offsets: Vec<usize> = (0..spec.layer_widths.len())
            .map(|k| if k == l { wp } else { 0 })
            .collect();
        for p in spec.perceptrons.iter().filter(|p| p.layer == l) {
            let u = p.materialize()?;
            SubsystemLayout::qubits(reg, &p.targets(&local_offsets))?.conjugate(&u, &mut joint)?;
        }
        let keep: Vec<usize> = (wp..reg).collect();
        rho = SubsystemLayout::qubits(reg, &keep)?.reduce(&joint)?;
    }
    Ok(QuantumState::Mixed {
        num_qubits: spec.n_out(),
        density: rho,
    })
}

/// Input amplitudes padded with `|0…0>` on every later layer.
pub(crate) fn padded_input(spec: &NetworkSpec, input: &QuantumState) -> Result<Vec<C64>> {
    let amps = input
        .amplitudes()
        .ok_or_else(|| Error::InvalidState("full-register evolution needs a pure input".into()))?;
    if input.num_qubits() != spec.n_in() {
        return Err(Error::DimensionMismatch("input width".into()));
    }
    let mut v = vec![ZERO; 1 << spec.total_qubits()];
    v[..amps.len()].copy_from_slice(amps);
    Ok(v)
}

pub(crate) fn run_ops(ops: &[RegisterOp<'_>], amps: &mut [C64], num_qubits: usize) -> Result<()> {
    for op in ops {
        op.apply(amps, num_qubits)?;
    }
    Ok(())
}

/// Full-register state after every perceptron has acted on a pure input.
pub fn final_register_state(spec: &NetworkSpec, input: &QuantumState) -> Result<Vec<C64>> {
    let mut v = padded_input(spec, input)?;
    run_ops(&spec.register_ops(), &mut v, spec.total_qubits())?;
    Ok(v)
}

/// Output-layer density matrix from full-register evolution of a pure input.
pub fn forward_statevector(spec: &NetworkSpec, input: &QuantumState) -> Result<QuantumState> {
    spec.validate()?;
    let v = final_register_state(spec, input)?;
    let rho =
        SubsystemLayout::qubits(spec.total_qubits(), &spec.output_qubits())?.reduce_pure(&v)?;
    Ok(QuantumState::Mixed {
        num_qubits: spec.n_out(),
        density: rho,
    })
}
