use serde::{Deserialize, Serialize};

use super::matrix::{kron, ComplexMatrix, C64, ONE, ZERO};
use super::register::{partial_trace_qubits, SubsystemLayout};
use crate::error::{Error, Result};

pub const STATE_TOL: f64 = 1e-10;
pub const EIGEN_FLOOR: f64 = -1e-9;

/// Pure or mixed state over an ordered qubit register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuantumState {
    Pure {
        num_qubits: usize,
        amplitudes: Vec<C64>,
    },
    Mixed {
        num_qubits: usize,
        density: ComplexMatrix,
    },
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

impl QuantumState {
    pub fn pure(amplitudes: Vec<C64>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.len())?;
        let s = QuantumState::Pure {
            num_qubits,
            amplitudes,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn mixed(density: ComplexMatrix) -> Result<Self> {
        if !density.is_square() {
            return Err(Error::InvalidState("density matrix is not square".into()));
        }
        let num_qubits = qubits_for_dim(density.rows())?;
        let s = QuantumState::Mixed {
            num_qubits,
            density,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[index] = ONE;
        QuantumState::Pure {
            num_qubits,
            amplitudes,
        }
    }

    /// Product state; `factors[q]` is the state of qubit `q`.
    pub fn product(factors: &[[C64; 2]]) -> Result<Self> {
        Self::pure(product_vector(factors))
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            QuantumState::Pure { num_qubits, .. } | QuantumState::Mixed { num_qubits, .. } => {
                *num_qubits
            }
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits()
    }

    pub fn amplitudes(&self) -> Option<&[C64]> {
        match self {
            QuantumState::Pure { amplitudes, .. } => Some(amplitudes),
            QuantumState::Mixed { .. } => None,
        }
    }

    pub fn to_density(&self) -> ComplexMatrix {
        match self {
            QuantumState::Pure { amplitudes, .. } => ComplexMatrix::projector(amplitudes),
            QuantumState::Mixed { density, .. } => density.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            QuantumState::Pure {
                num_qubits,
                amplitudes,
            } => {
                if amplitudes.len() != 1 << num_qubits {
                    return Err(Error::InvalidState("amplitude count".into()));
                }
                let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > STATE_TOL {
                    return Err(Error::InvalidState(format!("norm {norm}")));
                }
            }
            QuantumState::Mixed {
                num_qubits,
                density,
            } => {
                if density.rows() != 1 << num_qubits || !density.is_square() {
                    return Err(Error::InvalidState("density dimension".into()));
                }
                let herm = density.hermiticity_error();
                if herm > STATE_TOL {
                    return Err(Error::InvalidState(format!(
                        "non-Hermitian density ({herm:.2e})"
                    )));
                }
                let tr = density.trace();
                if (tr - ONE).norm() > STATE_TOL {
                    return Err(Error::InvalidState(format!("trace {tr}")));
                }
                let min = density.hermitian_eigenvalues()?[0];
                if min < EIGEN_FLOOR {
                    return Err(Error::InvalidState(format!(
                        "negative eigenvalue {min:.2e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Joint state with `self` on the low qubits and `upper` above it.
    pub fn tensor_above(&self, upper: &QuantumState) -> QuantumState {
        let num_qubits = self.num_qubits() + upper.num_qubits();
        match (self, upper) {
            (
                QuantumState::Pure { amplitudes: a, .. },
                QuantumState::Pure { amplitudes: b, .. },
            ) => QuantumState::Pure {
                num_qubits,
                amplitudes: super::matrix::kron_vec(b, a),
            },
            _ => QuantumState::Mixed {
                num_qubits,
                density: kron(&upper.to_density(), &self.to_density()),
            },
        }
    }

    /// Reduced state on `keep`; kept qubits are renumbered in ascending order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<QuantumState> {
        let n = self.num_qubits();
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        let density = match self {
            QuantumState::Pure { amplitudes, .. } => {
                SubsystemLayout::qubits(n, &sorted)?.reduce_pure(amplitudes)?
            }
            QuantumState::Mixed { density, .. } => partial_trace_qubits(density, n, &sorted)?,
        };
        Ok(QuantumState::Mixed {
            num_qubits: sorted.len(),
            density,
        })
    }

    /// Applies `u` on `targets` after checking unitarity.
    pub fn apply_unitary(&self, u: &ComplexMatrix, targets: &[usize]) -> Result<QuantumState> {
        u.check_unitary()?;
        self.apply_unitary_unchecked(u, targets)
    }

    pub fn apply_unitary_unchecked(
        &self,
        u: &ComplexMatrix,
        targets: &[usize],
    ) -> Result<QuantumState> {
        let layout = SubsystemLayout::qubits(self.num_qubits(), targets)?;
        let mut out = self.clone();
        match &mut out {
            QuantumState::Pure { amplitudes, .. } => layout.apply_vec(u, amplitudes)?,
            QuantumState::Mixed { density, .. } => layout.conjugate(u, density)?,
        }
        Ok(out)
    }

    /// `Tr[O ρ]`, rejecting a non-negligible imaginary part.
    pub fn expectation(&self, obs: &ComplexMatrix) -> Result<f64> {
        let d = self.dim();
        if obs.rows() != d || obs.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} observable on {} qubits",
                obs.rows(),
                obs.cols(),
                self.num_qubits()
            )));
        }
        let value = match self {
            QuantumState::Pure { amplitudes, .. } => {
                let ov = obs.mul_vec(amplitudes);
                amplitudes
                    .iter()
                    .zip(&ov)
                    .map(|(a, b)| a.conj() * b)
                    .sum::<C64>()
            }
            QuantumState::Mixed { density, .. } => obs.trace_product(density),
        };
        real_part(value)
    }

    /// `<φ|ρ|φ>`
    pub fn fidelity_with(&self, phi: &[C64]) -> Result<f64> {
        if phi.len() != self.dim() {
            return Err(Error::DimensionMismatch("target length".into()));
        }
        let v = match self {
            QuantumState::Pure { amplitudes, .. } => {
                let o: C64 = phi.iter().zip(amplitudes).map(|(p, a)| p.conj() * a).sum();
                C64::new(o.norm_sqr(), 0.0)
            }
            QuantumState::Mixed { density, .. } => {
                let rv = density.mul_vec(phi);
                phi.iter().zip(&rv).map(|(p, r)| p.conj() * r).sum()
            }
        };
        real_part(v)
    }
}

pub(crate) fn real_part(value: C64) -> Result<f64> {
    if value.im.abs() > 1e-10 * value.re.abs().max(1.0) {
        return Err(Error::ComplexExpectation(value.im));
    }
    Ok(value.re)
}

/// Amplitudes of `⊗_q factors[q]` with qubit 0 least significant.
pub fn product_vector(factors: &[[C64; 2]]) -> Vec<C64> {
    let mut v = vec![ONE];
    for f in factors {
        v = super::matrix::kron_vec(f, &v);
    }
    v
}
