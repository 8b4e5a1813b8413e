//! Training pairs, cost observables and cost evaluation.

use serde::{Deserialize, Serialize};

use super::forward::{final_register_state, forward};
use super::network::NetworkSpec;
use crate::error::{Error, Result};
use crate::linalg::{
    c64, product_vector, ComplexMatrix, QuantumState, SubsystemLayout, C64, ONE, STATE_TOL, ZERO,
};

/// Target output state: per-qubit product (qubit 0 first) or a full vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetState {
    Product { qubits: Vec<[C64; 2]> },
    Full { amplitudes: Vec<C64> },
}

impl TargetState {
    /// Computational basis string; `bits[q]` is qubit `q`.
    pub fn basis(bits: &[u8]) -> Self {
        TargetState::Product {
            qubits: bits
                .iter()
                .map(|&b| if b == 0 { [ONE, ZERO] } else { [ZERO, ONE] })
                .collect(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            TargetState::Product { qubits } => qubits.len(),
            TargetState::Full { amplitudes } => amplitudes.len().trailing_zeros() as usize,
        }
    }

    pub fn vector(&self) -> Vec<C64> {
        match self {
            TargetState::Product { qubits } => product_vector(qubits),
            TargetState::Full { amplitudes } => amplitudes.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: &[C64]| {
            (v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs() <= STATE_TOL
        };
        match self {
            TargetState::Product { qubits } => {
                if qubits.is_empty() || !qubits.iter().all(|q| unit(q)) {
                    return Err(Error::InvalidState("target qubit not normalized".into()));
                }
            }
            TargetState::Full { amplitudes } => {
                if amplitudes.is_empty() || !amplitudes.len().is_power_of_two() || !unit(amplitudes)
                {
                    return Err(Error::InvalidState("target state not normalized".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingPair {
    pub input: QuantumState,
    pub output: TargetState,
}

impl TrainingPair {
    pub fn validate(&self) -> Result<()> {
        if self.input.amplitudes().is_none() {
            return Err(Error::InvalidState("training inputs must be pure".into()));
        }
        self.input.validate()?;
        self.output.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    Global,
    Local,
}

impl CostKind {
    pub fn name(self) -> &'static str {
        match self {
            CostKind::Global => "global",
            CostKind::Local => "local",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostSpec {
    pub kind: CostKind,
    pub pairs: Vec<TrainingPair>,
}

impl CostSpec {
    pub fn new(kind: CostKind, pairs: Vec<TrainingPair>) -> Self {
        CostSpec { kind, pairs }
    }

    pub fn validate(&self, n_in: usize, n_out: usize) -> Result<()> {
        if self.pairs.is_empty() {
            return Err(Error::InvalidArgument(
                "cost needs at least one training pair".into(),
            ));
        }
        for p in &self.pairs {
            p.validate()?;
            if p.input.num_qubits() != n_in || p.output.num_qubits() != n_out {
                return Err(Error::DimensionMismatch(format!(
                    "pair on {}→{} qubits for a {n_in}→{n_out} network",
                    p.input.num_qubits(),
                    p.output.num_qubits()
                )));
            }
            if self.kind == CostKind::Local && !matches!(p.output, TargetState::Product { .. }) {
                return Err(Error::NotProduct);
            }
        }
        Ok(())
    }

    pub fn observables(&self) -> Result<Vec<ComplexMatrix>> {
        self.pairs
            .iter()
            .map(|p| observable(self.kind, p))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// `O^G = I − |φ><φ|`
pub fn global_observable(pair: &TrainingPair) -> ComplexMatrix {
    let phi = pair.output.vector();
    let d = phi.len();
    &ComplexMatrix::identity(d) - &ComplexMatrix::projector(&phi)
}

/// `O^L = I − (1/n) Σ_j |ψ_j><ψ_j| ⊗ I_{rest}`
pub fn local_observable(pair: &TrainingPair) -> Result<ComplexMatrix> {
    let TargetState::Product { qubits } = &pair.output else {
        return Err(Error::NotProduct);
    };
    let n = qubits.len();
    let mut o = ComplexMatrix::identity(1 << n);
    let w = c64(-1.0 / n as f64, 0.0);
    for (j, q) in qubits.iter().enumerate() {
        let proj = ComplexMatrix::projector(q).scale(w);
        let term = SubsystemLayout::qubits(n, &[j])?.embed(&proj)?;
        o = &o + &term;
    }
    Ok(o)
}

pub fn observable(kind: CostKind, pair: &TrainingPair) -> Result<ComplexMatrix> {
    match kind {
        CostKind::Global => Ok(global_observable(pair)),
        CostKind::Local => local_observable(pair),
    }
}

pub(crate) fn check_cost(c: f64) -> Result<f64> {
    if (-1e-9..=1.0 + 1e-9).contains(&c) {
        Ok(c)
    } else {
        Err(Error::CostOutOfRange(c))
    }
}

/// `C = (1/N) Σ_x Tr[O_x ρ_x^out]` through the layer-by-layer forward pass.
pub fn cost(spec: &NetworkSpec, cspec: &CostSpec) -> Result<f64> {
    spec.validate()?;
    cspec.validate(spec.n_in(), spec.n_out())?;
    let mut total = 0.0;
    for pair in &cspec.pairs {
        let rho = forward(spec, &pair.input)?;
        total += rho.expectation(&observable(cspec.kind, pair)?)?;
    }
    check_cost(total / cspec.pairs.len() as f64)
}

/// Same cost, evolving each pure input on the full register.
pub fn cost_statevector(spec: &NetworkSpec, cspec: &CostSpec) -> Result<f64> {
    spec.validate()?;
    cspec.validate(spec.n_in(), spec.n_out())?;
    let layout = SubsystemLayout::qubits(spec.total_qubits(), &spec.output_qubits())?;
    let mut total = 0.0;
    for pair in &cspec.pairs {
        let psi = final_register_state(spec, &pair.input)?;
        let o = observable(cspec.kind, pair)?;
        total += crate::linalg::real_part(layout.matrix_element(&psi, &o, &psi)?)?;
    }
    check_cost(total / cspec.pairs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(input: QuantumState, bits: &[u8]) -> TrainingPair {
        TrainingPair {
            input,
            output: TargetState::basis(bits),
        }
    }

    #[test]
    fn global_observable_single_qubit() {
        let o = global_observable(&pair(QuantumState::basis(1, 0), &[0]));
        assert_eq!(o, ComplexMatrix::diag(&[ZERO, ONE]));
    }

    #[test]
    fn global_observable_trace_and_zero_on_target() {
        let p = pair(QuantumState::basis(3, 0), &[1, 0, 1]);
        let o = global_observable(&p);
        assert!((o.trace() - c64(7.0, 0.0)).norm() < 1e-14);
        let target = QuantumState::pure(p.output.vector()).unwrap();
        assert!(target.expectation(&o).unwrap().abs() < 1e-14);
    }

    #[test]
    fn local_equals_global_for_one_qubit() {
        let p = TrainingPair {
            input: QuantumState::basis(1, 0),
            output: TargetState::Product {
                qubits: vec![[c64(0.6, 0.0), c64(0.0, 0.8)]],
            },
        };
        assert!(
            local_observable(&p)
                .unwrap()
                .max_abs_diff(&global_observable(&p))
                < 1e-15
        );
    }

    #[test]
    fn local_observable_examples() {
        let p = pair(QuantumState::basis(2, 0), &[0, 0]);
        let o = local_observable(&p).unwrap();
        assert!(o.is_hermitian(1e-15));
        assert!(QuantumState::basis(2, 0).expectation(&o).unwrap().abs() < 1e-15);
        assert!((QuantumState::basis(2, 3).expectation(&o).unwrap() - 1.0).abs() < 1e-15);
        assert!((QuantumState::basis(2, 1).expectation(&o).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn local_observable_rejects_full_target() {
        let p = TrainingPair {
            input: QuantumState::basis(1, 0),
            output: TargetState::Full {
                amplitudes: vec![ONE, ZERO],
            },
        };
        assert!(matches!(local_observable(&p), Err(Error::NotProduct)));
        let cs = CostSpec::new(CostKind::Local, vec![p]);
        assert!(matches!(cs.validate(1, 1), Err(Error::NotProduct)));
    }

    #[test]
    fn out_of_range_cost_is_an_error() {
        assert!(check_cost(1.0 + 1e-12).is_ok());
        assert!(check_cost(1.0 + 1e-6).is_err());
        assert!(check_cost(-1e-6).is_err());
    }
}
