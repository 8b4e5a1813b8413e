//! Constructors for the network families.

use std::f64::consts::PI;

use rand::Rng;

use super::network::{
    Family, Generator, NetworkSpec, Perceptron, PerceptronUnitary, RpqcCircuit, RpqcGate,
    RpqcParameterRef,
};
use crate::ensembles::{haar_unitary, random_pauli_generator, Pauli, PauliString};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

pub fn swap_matrix() -> ComplexMatrix {
    ComplexMatrix::from_real(
        4,
        4,
        &[
            1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.,
        ],
    )
    .unwrap()
}

fn uniform_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(0.0..2.0 * PI)
}

/// Network whose perceptron `j` swaps input `j` into output `j`.
pub fn swap_network(n: usize) -> NetworkSpec {
    NetworkSpec {
        layer_widths: vec![n, n],
        perceptrons: (0..n)
            .map(|j| Perceptron {
                layer: 1,
                output: j,
                inputs: vec![j],
                unitary: PerceptronUnitary::Explicit(swap_matrix()),
            })
            .collect(),
        family: Family::Custom,
    }
}

/// How the first global perceptron is parameterized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlobalAnsatz {
    /// `B · e^{−iθΓ/2} · A` with Haar `A`, `B` and a random Pauli `Γ` on all qubits.
    HaarFactors,
    /// Layers of random-axis single-qubit rotations and Haar two-qubit bricks.
    DeepCircuit,
}

fn global_inputs(widths: &[usize]) -> Result<()> {
    if widths.len() < 2 || widths.contains(&0) {
        return Err(Error::InvalidArgument(format!("layer widths {widths:?}")));
    }
    Ok(())
}

/// Global network with every perceptron an explicit Haar unitary.
pub fn global_deep_haar<R: Rng + ?Sized>(widths: &[usize], rng: &mut R) -> Result<NetworkSpec> {
    global_inputs(widths)?;
    let mut perceptrons = Vec::new();
    for l in 1..widths.len() {
        let m = widths[l - 1];
        for j in 0..widths[l] {
            perceptrons.push(Perceptron {
                layer: l,
                output: j,
                inputs: (0..m).collect(),
                unitary: PerceptronUnitary::Explicit(haar_unitary(1 << (m + 1), rng)),
            });
        }
    }
    Ok(NetworkSpec {
        layer_widths: widths.to_vec(),
        perceptrons,
        family: Family::GlobalDeep,
    })
}

/// Number of rotation layers in a deep perceptron circuit on `k` qubits.
pub fn deep_circuit_depth(k: usize) -> usize {
    4 * k * k
}

/// Deep circuit on `k` qubits; returns the circuit and the gate index of the
/// rotation on qubit 0 in the middle layer.
pub fn deep_circuit<R: Rng + ?Sized>(k: usize, rng: &mut R) -> (RpqcCircuit, usize) {
    let depth = deep_circuit_depth(k);
    let mut gates = Vec::new();
    let mut probe = 0;
    for layer in 0..depth {
        for q in 0..k {
            if layer == depth / 2 && q == 0 {
                probe = gates.len();
            }
            let axis = [Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3)];
            gates.push(RpqcGate::Rotation {
                targets: vec![q],
                generator: Generator::Pauli(PauliString::new(vec![axis])),
                angle: uniform_angle(rng),
            });
        }
        let start = layer % 2;
        let mut a = start;
        while a + 1 < k {
            gates.push(RpqcGate::Fixed {
                targets: vec![a, a + 1],
                matrix: haar_unitary(4, rng),
            });
            a += 2;
        }
    }
    (
        RpqcCircuit {
            num_qubits: k,
            gates,
        },
        probe,
    )
}

/// Global network for parameter-shift statistics. The probed rotation sits
/// in the first perceptron of the first layer; the reference is returned
/// with the network.
pub fn global_deep_rpqc<R: Rng + ?Sized>(
    widths: &[usize],
    ansatz: GlobalAnsatz,
    rng: &mut R,
) -> Result<(NetworkSpec, RpqcParameterRef)> {
    global_inputs(widths)?;
    let mut spec = global_deep_haar(widths, rng)?;
    let k = widths[0] + 1;
    match ansatz {
        GlobalAnsatz::HaarFactors => {
            let circuit = RpqcCircuit {
                num_qubits: k,
                gates: vec![
                    RpqcGate::Fixed {
                        targets: (0..k).collect(),
                        matrix: haar_unitary(1 << k, rng),
                    },
                    RpqcGate::Rotation {
                        targets: (0..k).collect(),
                        generator: Generator::Pauli(random_pauli_generator(k, rng)),
                        angle: uniform_angle(rng),
                    },
                    RpqcGate::Fixed {
                        targets: (0..k).collect(),
                        matrix: haar_unitary(1 << k, rng),
                    },
                ],
            };
            spec.perceptrons[0].unitary = PerceptronUnitary::Rpqc(circuit);
            Ok((
                spec,
                RpqcParameterRef {
                    layer: 1,
                    output: 0,
                    gate: 1,
                },
            ))
        }
        GlobalAnsatz::DeepCircuit => {
            let mut probe = 0;
            for (idx, p) in spec.perceptrons.iter_mut().enumerate() {
                let (c, g) = deep_circuit(p.inputs.len() + 1, rng);
                if idx == 0 {
                    probe = g;
                }
                p.unitary = PerceptronUnitary::Rpqc(c);
            }
            Ok((
                spec,
                RpqcParameterRef {
                    layer: 1,
                    output: 0,
                    gate: probe,
                },
            ))
        }
    }
}

/// Toy network of single-input perceptrons, `layers` deep on `n` qubits.
/// Perceptron `(l, j)` swaps input `j` into output `j` and rotates it by
/// `R_y(angles[k])`, with `k` its position in application order.
pub fn local_m1_toy(n: usize, layers: usize, angles: &[f64]) -> Result<NetworkSpec> {
    if n == 0 || layers == 0 || angles.len() != n * layers {
        return Err(Error::InvalidArgument(format!(
            "{} angles for {layers} layers of width {n}",
            angles.len()
        )));
    }
    let y: PauliString = "IY".parse().unwrap();
    let mut perceptrons = Vec::with_capacity(n * layers);
    for l in 1..=layers {
        for j in 0..n {
            perceptrons.push(Perceptron {
                layer: l,
                output: j,
                inputs: vec![j],
                unitary: PerceptronUnitary::Rpqc(RpqcCircuit {
                    num_qubits: 2,
                    gates: vec![
                        RpqcGate::Fixed {
                            targets: vec![0, 1],
                            matrix: swap_matrix(),
                        },
                        RpqcGate::Rotation {
                            targets: vec![0, 1],
                            generator: Generator::Pauli(y.clone()),
                            angle: angles[(l - 1) * n + j],
                        },
                    ],
                }),
            });
        }
    }
    Ok(NetworkSpec {
        layer_widths: vec![n; layers + 1],
        perceptrons,
        family: Family::LocalM1Toy,
    })
}

pub fn local_m1_toy_random<R: Rng + ?Sized>(
    n: usize,
    layers: usize,
    rng: &mut R,
) -> Result<NetworkSpec> {
    let angles: Vec<f64> = (0..n * layers).map(|_| uniform_angle(rng)).collect();
    local_m1_toy(n, layers, &angles)
}

/// Probed rotation of the toy network.
pub const TOY_PROBE: RpqcParameterRef = RpqcParameterRef {
    layer: 1,
    output: 0,
    gate: 1,
};

/// Two-qubit brick `B · e^{−iθΓ/2} · A` with Haar `A`, `B`.
pub fn brick_circuit<R: Rng + ?Sized>(rng: &mut R) -> RpqcCircuit {
    RpqcCircuit {
        num_qubits: 2,
        gates: vec![
            RpqcGate::Fixed {
                targets: vec![0, 1],
                matrix: haar_unitary(4, rng),
            },
            RpqcGate::Rotation {
                targets: vec![0, 1],
                generator: Generator::Pauli(random_pauli_generator(2, rng)),
                angle: uniform_angle(rng),
            },
            RpqcGate::Fixed {
                targets: vec![0, 1],
                matrix: haar_unitary(4, rng),
            },
        ],
    }
}

/// Brick network on even `n`, `layers` deep.
///
/// In odd layers (1-based) the bricks pair inputs `(0,1), (2,3), …`; in
/// even layers `(1,2), (3,4), …, (n−3, n−2)` and qubits `0` and `n−1` only
/// swap. Within a layer every brick perceptron precedes every plain swap,
/// so no input leaves the layer before its brick has acted.
pub fn local_m2_brick<R: Rng + ?Sized>(
    n: usize,
    layers: usize,
    rng: &mut R,
) -> Result<NetworkSpec> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "brick networks need an even width, got {n}"
        )));
    }
    if layers == 0 {
        return Err(Error::InvalidArgument(
            "brick networks need at least one layer".into(),
        ));
    }
    let mut perceptrons = Vec::new();
    for l in 1..=layers {
        let first = if l % 2 == 1 { 0 } else { 1 };
        let mut bricked = vec![false; n];
        let mut j = first;
        while j + 1 < n {
            perceptrons.push(Perceptron {
                layer: l,
                output: j,
                inputs: vec![j, j + 1],
                unitary: PerceptronUnitary::BrickSwap {
                    brick: Some(brick_circuit(rng)),
                },
            });
            bricked[j] = true;
            j += 2;
        }
        for (j, _) in bricked.iter().enumerate().filter(|(_, b)| !**b) {
            perceptrons.push(Perceptron {
                layer: l,
                output: j,
                inputs: vec![j],
                unitary: PerceptronUnitary::BrickSwap { brick: None },
            });
        }
    }
    Ok(NetworkSpec {
        layer_widths: vec![n; layers + 1],
        perceptrons,
        family: Family::LocalM2Brick,
    })
}

/// Probed rotation of the brick network: the first brick of layer 1.
pub const BRICK_PROBE: RpqcParameterRef = RpqcParameterRef {
    layer: 1,
    output: 0,
    gate: 1,
};
