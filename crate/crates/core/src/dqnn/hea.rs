//! Mapping of brick networks onto a layered hardware-efficient circuit.
//!
//! Each brick perceptron `V1` applies its brick to inputs `(j, j+1)` and then
//! moves input `j` into output `j`; plain `V2` perceptrons only move. After a
//! layer the output register holds the input register acted on by that
//! layer's bricks, so the whole network is an `n`-qubit circuit with one
//! sublayer of bricks per network layer. Two sublayers form one circuit layer.

use serde::{Deserialize, Serialize};

use super::cost::{check_cost, observable, CostSpec};
use super::network::{
    Family, NetworkSpec, PerceptronUnitary, RpqcCircuit, RpqcGate, RpqcParameterRef,
};
use crate::error::{Error, Result};
use crate::linalg::{real_part, QuantumState, SubsystemLayout, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeaBrick {
    /// Circuit qubits; local qubit 0 of the brick is `qubits[0]`.
    pub qubits: [usize; 2],
    pub circuit: RpqcCircuit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeaCircuit {
    pub num_qubits: usize,
    pub sublayers: Vec<Vec<HeaBrick>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeaParameterRef {
    pub sublayer: usize,
    pub brick: usize,
    pub gate: usize,
}

impl HeaCircuit {
    /// Circuit layers: two brick sublayers each.
    pub fn layer_count(&self) -> usize {
        self.sublayers.len().div_ceil(2)
    }

    pub fn run(&self, input: &QuantumState) -> Result<Vec<C64>> {
        let mut v = input
            .amplitudes()
            .ok_or_else(|| Error::InvalidState("circuit evolution needs a pure input".into()))?
            .to_vec();
        if input.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch("circuit input width".into()));
        }
        for brick in self.sublayers.iter().flatten() {
            brick.circuit.validate()?;
            for g in &brick.circuit.gates {
                apply_gate(g, &brick.qubits, &mut v, self.num_qubits, None)?;
            }
        }
        Ok(v)
    }

    pub fn cost(&self, cspec: &CostSpec) -> Result<f64> {
        cspec.validate(self.num_qubits, self.num_qubits)?;
        let all: Vec<usize> = (0..self.num_qubits).collect();
        let layout = SubsystemLayout::qubits(self.num_qubits, &all)?;
        let mut total = 0.0;
        for pair in &cspec.pairs {
            let psi = self.run(&pair.input)?;
            total +=
                real_part(layout.matrix_element(&psi, &observable(cspec.kind, pair)?, &psi)?)?;
        }
        check_cost(total / cspec.pairs.len() as f64)
    }

    pub fn angle(&self, r: HeaParameterRef) -> Result<f64> {
        match self.gate(r)? {
            RpqcGate::Rotation { angle, .. } => Ok(*angle),
            RpqcGate::Fixed { .. } => Err(Error::InvalidArgument(
                "referenced gate is not a rotation".into(),
            )),
        }
    }

    pub fn with_angle(&self, r: HeaParameterRef, theta: f64) -> Result<HeaCircuit> {
        self.angle(r)?;
        let mut c = self.clone();
        if let RpqcGate::Rotation { angle, .. } =
            &mut c.sublayers[r.sublayer][r.brick].circuit.gates[r.gate]
        {
            *angle = theta;
        }
        Ok(c)
    }

    fn gate(&self, r: HeaParameterRef) -> Result<&RpqcGate> {
        self.sublayers
            .get(r.sublayer)
            .and_then(|s| s.get(r.brick))
            .and_then(|b| b.circuit.gates.get(r.gate))
            .ok_or_else(|| Error::InvalidArgument(format!("no gate at {r:?}")))
    }
}

fn apply_gate(
    g: &RpqcGate,
    qubits: &[usize; 2],
    v: &mut [C64],
    n: usize,
    angle: Option<f64>,
) -> Result<()> {
    match g {
        RpqcGate::Fixed { targets, matrix } => {
            let t: Vec<usize> = targets.iter().map(|&k| qubits[k]).collect();
            SubsystemLayout::qubits(n, &t)?.apply_vec(matrix, v)
        }
        RpqcGate::Rotation {
            targets,
            generator,
            angle: a,
        } => {
            let t: Vec<usize> = targets.iter().map(|&k| qubits[k]).collect();
            let theta = angle.unwrap_or(*a);
            match generator {
                super::network::Generator::Pauli(p) => p.rotate(v, n, &t, theta),
                super::network::Generator::Hermitian(h) => {
                    let u = crate::linalg::herm_expm(h, -theta / 2.0)?;
                    SubsystemLayout::qubits(n, &t)?.apply_vec(&u, v)
                }
            }
        }
    }
}

/// Flattens a brick network into its circuit.
pub fn map_to_hardware_efficient(spec: &NetworkSpec) -> Result<HeaCircuit> {
    if spec.family != Family::LocalM2Brick {
        return Err(Error::Unsupported(format!(
            "{} networks have no circuit mapping",
            spec.family.name()
        )));
    }
    spec.validate()?;
    let n = spec.n_in();
    if spec.layer_widths.iter().any(|&w| w != n) {
        return Err(Error::Unsupported(
            "circuit mapping needs equal layer widths".into(),
        ));
    }
    let mut sublayers = Vec::with_capacity(spec.num_layers());
    for l in 1..=spec.num_layers() {
        let mut moved = vec![false; n];
        let mut bricks = Vec::new();
        for p in spec.perceptrons.iter().filter(|p| p.layer == l) {
            if p.output != p.inputs[0] {
                return Err(Error::Unsupported(format!(
                    "layer {l}: perceptron {} does not keep its qubit",
                    p.output
                )));
            }
            if let PerceptronUnitary::BrickSwap { brick: Some(c) } = &p.unitary {
                let (a, b) = (p.inputs[0], p.inputs[1]);
                if moved[a] || moved[b] {
                    return Err(Error::Unsupported(format!(
                        "layer {l}: brick on ({a}, {b}) acts after a swap"
                    )));
                }
                bricks.push(HeaBrick {
                    qubits: [a, b],
                    circuit: c.clone(),
                });
            }
            moved[p.inputs[0]] = true;
        }
        sublayers.push(bricks);
    }
    Ok(HeaCircuit {
        num_qubits: n,
        sublayers,
    })
}

/// Circuit location of a network rotation.
pub fn map_parameter(spec: &NetworkSpec, pref: RpqcParameterRef) -> Result<HeaParameterRef> {
    spec.angle(pref)?;
    let mut brick = 0;
    for p in spec.perceptrons.iter().filter(|p| p.layer == pref.layer) {
        if let PerceptronUnitary::BrickSwap { brick: Some(_) } = &p.unitary {
            if p.output == pref.output {
                return Ok(HeaParameterRef {
                    sublayer: pref.layer - 1,
                    brick,
                    gate: pref.gate,
                });
            }
            brick += 1;
        }
    }
    Err(Error::UnknownParameter {
        layer: pref.layer,
        output: pref.output,
        gate: pref.gate,
    })
}

/// Parameter-shift derivative of the circuit cost.
pub fn hea_grad_shift(hea: &HeaCircuit, cspec: &CostSpec, r: HeaParameterRef) -> Result<f64> {
    let theta = hea.angle(r)?;
    let half = std::f64::consts::FRAC_PI_2;
    let plus = hea.with_angle(r, theta + half)?.cost(cspec)?;
    let minus = hea.with_angle(r, theta - half)?.cost(cspec)?;
    Ok((plus - minus) / 2.0)
}
