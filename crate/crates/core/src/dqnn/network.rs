//! Network topology: layers, perceptrons and their unitaries.

use serde::{Deserialize, Serialize};

use crate::ensembles::PauliString;
use crate::error::{Error, Result};
use crate::linalg::{herm_expm, swap_qubits, ComplexMatrix, SubsystemLayout, C64, ONE, ZERO};

/// Generator `Γ` of a rotation `e^{−iθΓ/2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Pauli(PauliString),
    Hermitian(ComplexMatrix),
}

impl Generator {
    fn num_qubits(&self) -> Option<usize> {
        match self {
            Generator::Pauli(p) => Some(p.num_qubits()),
            Generator::Hermitian(h) => {
                if h.is_square() && h.rows().is_power_of_two() {
                    Some(h.rows().trailing_zeros() as usize)
                } else {
                    None
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RpqcGate {
    /// Unparameterized gate on local qubits `targets`.
    Fixed {
        targets: Vec<usize>,
        matrix: ComplexMatrix,
    },
    /// `e^{−iθΓ/2}` on local qubits `targets`.
    Rotation {
        targets: Vec<usize>,
        generator: Generator,
        angle: f64,
    },
}

/// Gate sequence on `num_qubits` local qubits, applied first to last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RpqcCircuit {
    pub num_qubits: usize,
    pub gates: Vec<RpqcGate>,
}

impl RpqcCircuit {
    pub fn validate(&self) -> Result<()> {
        for (k, g) in self.gates.iter().enumerate() {
            let (targets, qubits) = match g {
                RpqcGate::Fixed { targets, matrix } => {
                    let d = 1usize << targets.len();
                    if matrix.rows() != d || matrix.cols() != d {
                        return Err(Error::InvalidNetwork(format!(
                            "gate {k}: matrix does not match its targets"
                        )));
                    }
                    (targets, targets.len())
                }
                RpqcGate::Rotation {
                    targets, generator, ..
                } => {
                    let q = generator.num_qubits().ok_or_else(|| {
                        Error::InvalidNetwork(format!(
                            "gate {k}: generator is not a qubit operator"
                        ))
                    })?;
                    (targets, q)
                }
            };
            if targets.len() != qubits {
                return Err(Error::InvalidNetwork(format!(
                    "gate {k}: generator does not match its targets"
                )));
            }
            crate::linalg::check_targets(self.num_qubits, targets)?;
        }
        Ok(())
    }

    pub fn rotation_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, RpqcGate::Rotation { .. }))
            .count()
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let ops: Vec<RegisterOp> = self
            .gates
            .iter()
            .enumerate()
            .map(|(k, g)| gate_op(g, &|t| t, 0, Some(k)))
            .collect();
        materialize_ops(&ops, self.num_qubits)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerceptronUnitary {
    Explicit(ComplexMatrix),
    Rpqc(RpqcCircuit),
    /// Optional two-qubit brick on the first two inputs, then a swap of the
    /// first input into the output qubit.
    BrickSwap {
        brick: Option<RpqcCircuit>,
    },
}

/// Unitary on `inputs` (qubits of layer `layer − 1`) plus one output qubit
/// of layer `layer`. Local qubit `k < m` is `inputs[k]`; local qubit `m` is
/// the output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perceptron {
    pub layer: usize,
    pub output: usize,
    pub inputs: Vec<usize>,
    pub unitary: PerceptronUnitary,
}

impl Perceptron {
    pub fn num_local_qubits(&self) -> usize {
        self.inputs.len() + 1
    }

    /// Global register qubits in local order.
    pub fn targets(&self, offsets: &[usize]) -> Vec<usize> {
        let mut t: Vec<usize> = self
            .inputs
            .iter()
            .map(|i| offsets[self.layer - 1] + i)
            .collect();
        t.push(offsets[self.layer] + self.output);
        t
    }

    pub fn materialize(&self) -> Result<ComplexMatrix> {
        if let PerceptronUnitary::Explicit(u) = &self.unitary {
            return Ok(u.clone());
        }
        let ops = self.local_ops(0, &|t| t);
        materialize_ops(&ops, self.num_local_qubits())
    }

    fn local_ops<'a>(&'a self, index: usize, map: &dyn Fn(usize) -> usize) -> Vec<RegisterOp<'a>> {
        let m = self.inputs.len();
        match &self.unitary {
            PerceptronUnitary::Explicit(u) => vec![RegisterOp {
                targets: (0..=m).map(map).collect(),
                kind: OpKind::Matrix(u),
                perceptron: index,
                gate: None,
            }],
            PerceptronUnitary::Rpqc(c) => c
                .gates
                .iter()
                .enumerate()
                .map(|(k, g)| gate_op(g, map, index, Some(k)))
                .collect(),
            PerceptronUnitary::BrickSwap { brick } => {
                let mut ops: Vec<RegisterOp> = brick
                    .iter()
                    .flat_map(|c| {
                        c.gates
                            .iter()
                            .enumerate()
                            .map(|(k, g)| gate_op(g, map, index, Some(k)))
                    })
                    .collect();
                ops.push(RegisterOp {
                    targets: vec![map(0), map(m)],
                    kind: OpKind::Swap,
                    perceptron: index,
                    gate: None,
                });
                ops
            }
        }
    }

    fn gates_mut(&mut self) -> Option<&mut Vec<RpqcGate>> {
        match &mut self.unitary {
            PerceptronUnitary::Rpqc(c) => Some(&mut c.gates),
            PerceptronUnitary::BrickSwap { brick: Some(c) } => Some(&mut c.gates),
            _ => None,
        }
    }

    fn gates(&self) -> Option<&[RpqcGate]> {
        match &self.unitary {
            PerceptronUnitary::Rpqc(c) => Some(&c.gates),
            PerceptronUnitary::BrickSwap { brick: Some(c) } => Some(&c.gates),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Every perceptron acts on the whole previous layer.
    GlobalDeep,
    /// One input per perceptron: swap then `R_y` on the output.
    #[serde(rename = "local-m1")]
    LocalM1Toy,
    /// Two-qubit bricks followed by swaps.
    #[serde(rename = "local-m2")]
    LocalM2Brick,
    Custom,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::GlobalDeep => "global-deep",
            Family::LocalM1Toy => "local-m1",
            Family::LocalM2Brick => "local-m2",
            Family::Custom => "custom",
        }
    }
}

/// Points at one rotation angle: perceptron `(layer, output)`, gate `gate`
/// of its circuit (the brick circuit for brick perceptrons).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RpqcParameterRef {
    pub layer: usize,
    pub output: usize,
    pub gate: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub layer_widths: Vec<usize>,
    pub perceptrons: Vec<Perceptron>,
    pub family: Family,
}

impl NetworkSpec {
    pub fn n_in(&self) -> usize {
        self.layer_widths[0]
    }

    pub fn n_out(&self) -> usize {
        *self.layer_widths.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.layer_widths.len() - 1
    }

    /// First register qubit of every layer.
    pub fn offsets(&self) -> Vec<usize> {
        let mut o = Vec::with_capacity(self.layer_widths.len());
        let mut acc = 0;
        for w in &self.layer_widths {
            o.push(acc);
            acc += w;
        }
        o
    }

    pub fn total_qubits(&self) -> usize {
        self.layer_widths.iter().sum()
    }

    pub fn output_qubits(&self) -> Vec<usize> {
        let start = self.total_qubits() - self.n_out();
        (start..self.total_qubits()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidNetwork(msg));
        if self.layer_widths.len() < 2 {
            return bad("at least an input and an output layer are required".into());
        }
        if self.layer_widths.contains(&0) {
            return bad("layer widths must be positive".into());
        }
        let mut covered: Vec<Vec<u32>> = self.layer_widths.iter().map(|&w| vec![0; w]).collect();
        let mut last_layer = 1;
        for (idx, p) in self.perceptrons.iter().enumerate() {
            if p.layer == 0 || p.layer >= self.layer_widths.len() {
                return bad(format!("perceptron {idx}: layer {} out of range", p.layer));
            }
            if p.layer < last_layer {
                return bad(format!(
                    "perceptron {idx}: layers must be applied in ascending order"
                ));
            }
            last_layer = p.layer;
            let prev = self.layer_widths[p.layer - 1];
            if p.inputs.is_empty() {
                return bad(format!("perceptron {idx}: no inputs"));
            }
            crate::linalg::check_targets(prev, &p.inputs)
                .map_err(|e| Error::InvalidNetwork(format!("perceptron {idx}: {e}")))?;
            if p.output >= self.layer_widths[p.layer] {
                return bad(format!(
                    "perceptron {idx}: output {} out of range",
                    p.output
                ));
            }
            covered[p.layer][p.output] += 1;
            let m = p.inputs.len();
            match &p.unitary {
                PerceptronUnitary::Explicit(u) => {
                    let d = 1usize << (m + 1);
                    if u.rows() != d || u.cols() != d {
                        return bad(format!("perceptron {idx}: unitary is not {d}x{d}"));
                    }
                }
                PerceptronUnitary::Rpqc(c) => {
                    if c.num_qubits != m + 1 {
                        return bad(format!(
                            "perceptron {idx}: circuit width {} != {}",
                            c.num_qubits,
                            m + 1
                        ));
                    }
                    c.validate()
                        .map_err(|e| Error::InvalidNetwork(format!("perceptron {idx}: {e}")))?;
                }
                PerceptronUnitary::BrickSwap { brick } => match brick {
                    Some(c) => {
                        if m != 2 || c.num_qubits != 2 {
                            return bad(format!("perceptron {idx}: a brick needs two inputs"));
                        }
                        c.validate()
                            .map_err(|e| Error::InvalidNetwork(format!("perceptron {idx}: {e}")))?;
                    }
                    None if m > 2 => {
                        return bad(format!("perceptron {idx}: swap perceptron with {m} inputs"))
                    }
                    None => {}
                },
            }
            match self.family {
                Family::GlobalDeep if m != prev => {
                    return bad(format!(
                        "perceptron {idx}: global perceptrons act on the whole previous layer"
                    ))
                }
                Family::LocalM1Toy if m != 1 => {
                    return bad(format!("perceptron {idx}: toy perceptrons have one input"))
                }
                Family::LocalM2Brick
                    if !matches!(p.unitary, PerceptronUnitary::BrickSwap { .. }) =>
                {
                    return bad(format!(
                        "perceptron {idx}: brick networks use brick/swap perceptrons"
                    ))
                }
                _ => {}
            }
        }
        for (l, c) in covered.iter().enumerate().skip(1) {
            if let Some(j) = c.iter().position(|&k| k != 1) {
                return bad(format!(
                    "layer {l} qubit {j} is the output of {} perceptrons",
                    c[j]
                ));
            }
        }
        Ok(())
    }

    /// Materializes every perceptron and checks unitarity within `tol`.
    pub fn validate_unitarity(&self, tol: f64) -> Result<()> {
        for p in &self.perceptrons {
            let e = p.materialize()?.unitarity_error();
            if e > tol {
                return Err(Error::NotUnitary(e));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: NetworkSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn perceptron_index(&self, layer: usize, output: usize) -> Option<usize> {
        self.perceptrons
            .iter()
            .position(|p| p.layer == layer && p.output == output)
    }

    fn rotation(&self, pref: RpqcParameterRef) -> Result<(usize, &Generator, f64)> {
        let unknown = || Error::UnknownParameter {
            layer: pref.layer,
            output: pref.output,
            gate: pref.gate,
        };
        let idx = self
            .perceptron_index(pref.layer, pref.output)
            .ok_or_else(unknown)?;
        match self.perceptrons[idx].gates().and_then(|g| g.get(pref.gate)) {
            Some(RpqcGate::Rotation {
                generator, angle, ..
            }) => Ok((idx, generator, *angle)),
            _ => Err(unknown()),
        }
    }

    pub fn angle(&self, pref: RpqcParameterRef) -> Result<f64> {
        Ok(self.rotation(pref)?.2)
    }

    pub fn generator(&self, pref: RpqcParameterRef) -> Result<&Generator> {
        Ok(self.rotation(pref)?.1)
    }

    pub fn set_angle(&mut self, pref: RpqcParameterRef, theta: f64) -> Result<()> {
        let (idx, _, _) = self.rotation(pref)?;
        if let Some(RpqcGate::Rotation { angle, .. }) = self.perceptrons[idx]
            .gates_mut()
            .and_then(|g| g.get_mut(pref.gate))
        {
            *angle = theta;
        }
        Ok(())
    }

    /// Every rotation in the network, in application order.
    pub fn rotation_refs(&self) -> Vec<RpqcParameterRef> {
        let mut refs = Vec::new();
        for p in &self.perceptrons {
            for (gate, g) in p.gates().into_iter().flatten().enumerate() {
                if matches!(g, RpqcGate::Rotation { .. }) {
                    refs.push(RpqcParameterRef {
                        layer: p.layer,
                        output: p.output,
                        gate,
                    });
                }
            }
        }
        refs
    }

    pub fn with_angle(&self, pref: RpqcParameterRef, theta: f64) -> Result<NetworkSpec> {
        let mut s = self.clone();
        s.set_angle(pref, theta)?;
        Ok(s)
    }

    /// All perceptrons as a flat gate list on the full register.
    pub(crate) fn register_ops(&self) -> Vec<RegisterOp<'_>> {
        let offsets = self.offsets();
        self.perceptrons
            .iter()
            .enumerate()
            .flat_map(|(idx, p)| {
                let targets = p.targets(&offsets);
                p.local_ops(idx, &move |t| targets[t])
            })
            .collect()
    }

    /// Position of the referenced rotation in [`Self::register_ops`].
    pub(crate) fn op_position(
        &self,
        ops: &[RegisterOp<'_>],
        pref: RpqcParameterRef,
    ) -> Result<usize> {
        let (idx, _, _) = self.rotation(pref)?;
        ops.iter()
            .position(|op| op.perceptron == idx && op.gate == Some(pref.gate))
            .ok_or(Error::UnknownParameter {
                layer: pref.layer,
                output: pref.output,
                gate: pref.gate,
            })
    }
}

#[derive(Clone, Debug)]
pub(crate) enum OpKind<'a> {
    Matrix(&'a ComplexMatrix),
    Swap,
    PauliRotation {
        generator: &'a PauliString,
        angle: f64,
    },
    HermitianRotation {
        generator: &'a ComplexMatrix,
        angle: f64,
    },
}

/// One gate placed on register qubits.
#[derive(Clone, Debug)]
pub(crate) struct RegisterOp<'a> {
    pub targets: Vec<usize>,
    pub kind: OpKind<'a>,
    pub perceptron: usize,
    pub gate: Option<usize>,
}

impl RegisterOp<'_> {
    pub fn apply(&self, amps: &mut [C64], num_qubits: usize) -> Result<()> {
        self.apply_with_angle(amps, num_qubits, None)
    }

    /// Applies the gate, overriding a rotation angle when `angle` is set.
    pub fn apply_with_angle(
        &self,
        amps: &mut [C64],
        num_qubits: usize,
        angle: Option<f64>,
    ) -> Result<()> {
        match &self.kind {
            OpKind::Matrix(u) => {
                SubsystemLayout::qubits(num_qubits, &self.targets)?.apply_vec(u, amps)
            }
            OpKind::Swap => {
                crate::linalg::check_targets(num_qubits, &self.targets)?;
                swap_qubits(amps, self.targets[0], self.targets[1]);
                Ok(())
            }
            OpKind::PauliRotation {
                generator,
                angle: a,
            } => generator.rotate(amps, num_qubits, &self.targets, angle.unwrap_or(*a)),
            OpKind::HermitianRotation {
                generator,
                angle: a,
            } => {
                let u = herm_expm(generator, -angle.unwrap_or(*a) / 2.0)?;
                SubsystemLayout::qubits(num_qubits, &self.targets)?.apply_vec(&u, amps)
            }
        }
    }
}

fn gate_op<'a>(
    g: &'a RpqcGate,
    map: &dyn Fn(usize) -> usize,
    perceptron: usize,
    gate: Option<usize>,
) -> RegisterOp<'a> {
    match g {
        RpqcGate::Fixed { targets, matrix } => RegisterOp {
            targets: targets.iter().map(|&t| map(t)).collect(),
            kind: OpKind::Matrix(matrix),
            perceptron,
            gate,
        },
        RpqcGate::Rotation {
            targets,
            generator,
            angle,
        } => RegisterOp {
            targets: targets.iter().map(|&t| map(t)).collect(),
            kind: match generator {
                Generator::Pauli(p) => OpKind::PauliRotation {
                    generator: p,
                    angle: *angle,
                },
                Generator::Hermitian(h) => OpKind::HermitianRotation {
                    generator: h,
                    angle: *angle,
                },
            },
            perceptron,
            gate,
        },
    }
}

/// Dense matrix of a gate list on `num_qubits` qubits.
pub(crate) fn materialize_ops(ops: &[RegisterOp<'_>], num_qubits: usize) -> Result<ComplexMatrix> {
    let d = 1usize << num_qubits;
    let mut out = ComplexMatrix::zeros(d, d);
    let mut col = vec![ZERO; d];
    for j in 0..d {
        col.fill(ZERO);
        col[j] = ONE;
        for op in ops {
            op.apply(&mut col, num_qubits)?;
        }
        for (i, v) in col.iter().enumerate() {
            out[(i, j)] = *v;
        }
    }
    Ok(out)
}
