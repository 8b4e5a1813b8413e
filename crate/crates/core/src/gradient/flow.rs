//! Parameter-matrix flow: `V(s + ε) = e^{iεH} V(s)` for every perceptron.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dqnn::{observable, padded_input, CostSpec, NetworkSpec, PerceptronUnitary};
use crate::ensembles::sample_pauli_hermitian;
use crate::error::{Error, Result};
use crate::linalg::{herm_expm, real_part, ComplexMatrix, SubsystemLayout, C64, I, ZERO};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFlowState {
    /// Current perceptron unitaries, in application order.
    pub unitaries: Vec<ComplexMatrix>,
    pub generators: Vec<Option<ComplexMatrix>>,
    pub s: f64,
}

impl MatrixFlowState {
    /// Starts the flow at the network's current perceptron unitaries.
    pub fn from_network(spec: &NetworkSpec) -> Result<Self> {
        spec.validate()?;
        let unitaries = spec
            .perceptrons
            .iter()
            .map(|p| p.materialize())
            .collect::<Result<Vec<_>>>()?;
        let generators = vec![None; unitaries.len()];
        Ok(MatrixFlowState {
            unitaries,
            generators,
            s: 0.0,
        })
    }

    pub fn with_generators(mut self, generators: Vec<ComplexMatrix>) -> Result<Self> {
        if generators.len() != self.unitaries.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} generators for {} perceptrons",
                generators.len(),
                self.unitaries.len()
            )));
        }
        for (h, u) in generators.iter().zip(&self.unitaries) {
            if h.rows() != u.rows() || h.cols() != u.cols() {
                return Err(Error::DimensionMismatch("generator size".into()));
            }
            let e = h.hermiticity_error();
            if e > crate::linalg::HERMITIAN_TOL {
                return Err(Error::NotHermitian(e));
            }
        }
        self.generators = generators.into_iter().map(Some).collect();
        Ok(self)
    }

    /// Pauli-basis generators with `Tr[H²]` equal to the perceptron dimension.
    pub fn with_random_generators<R: Rng + ?Sized>(self, rng: &mut R) -> Result<Self> {
        let gens = self
            .unitaries
            .iter()
            .map(|u| {
                let k = u.rows().trailing_zeros() as usize;
                sample_pauli_hermitian(k, u.rows() as f64, rng)
            })
            .collect::<Result<Vec<_>>>()?;
        self.with_generators(gens)
    }

    /// `template` with every perceptron replaced by the current unitary.
    pub fn network(&self, template: &NetworkSpec) -> Result<NetworkSpec> {
        if template.perceptrons.len() != self.unitaries.len() {
            return Err(Error::DimensionMismatch(
                "flow does not match the network".into(),
            ));
        }
        let mut spec = template.clone();
        for (p, u) in spec.perceptrons.iter_mut().zip(&self.unitaries) {
            p.unitary = PerceptronUnitary::Explicit(u.clone());
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn max_unitarity_error(&self) -> f64 {
        self.unitaries
            .iter()
            .map(|u| u.unitarity_error())
            .fold(0.0, f64::max)
    }

    fn generator(&self, i: usize) -> Result<&ComplexMatrix> {
        self.generators[i]
            .as_ref()
            .ok_or(Error::MissingGenerator(i))
    }
}

/// Left-multiplies every unitary by `e^{iεH}` and advances `s` by `ε`.
/// Perceptrons without a generator are left unchanged.
pub fn update_step(mut flow: MatrixFlowState, epsilon: f64) -> Result<MatrixFlowState> {
    if epsilon == 0.0 {
        return Ok(flow);
    }
    for (u, h) in flow.unitaries.iter_mut().zip(&flow.generators) {
        if let Some(h) = h {
            *u = &herm_expm(h, epsilon)? * u;
        }
    }
    flow.s += epsilon;
    Ok(flow)
}

fn check_all(flow: &MatrixFlowState) -> Result<()> {
    for i in 0..flow.generators.len() {
        flow.generator(i)?;
    }
    Ok(())
}

/// `∂_s C = (i/N) Σ_x Σ_p Tr[(I ⊗ H_p) [V_p ρ̃_p V_p†, Õ_p]]` with full-register
/// operators: `ρ̃_p` is the register state before perceptron `p`, `Õ_p` the
/// observable pulled back through every later perceptron.
pub fn grad_s(flow: &MatrixFlowState, spec: &NetworkSpec, cspec: &CostSpec) -> Result<f64> {
    check_all(flow)?;
    let net = flow.network(spec)?;
    cspec.validate(net.n_in(), net.n_out())?;
    let n = net.total_qubits();
    let offsets = net.offsets();
    let layouts = net
        .perceptrons
        .iter()
        .map(|p| SubsystemLayout::qubits(n, &p.targets(&offsets)))
        .collect::<Result<Vec<_>>>()?;
    let out = SubsystemLayout::qubits(n, &net.output_qubits())?;
    let count = layouts.len();
    let mut total = 0.0;
    for pair in &cspec.pairs {
        // states after each perceptron
        let mut after = Vec::with_capacity(count);
        let mut rho = ComplexMatrix::projector(&padded_input(&net, &pair.input)?);
        for (l, u) in layouts.iter().zip(&flow.unitaries) {
            l.conjugate(u, &mut rho)?;
            after.push(rho.clone());
        }
        let mut o_tilde = out.embed(&observable(cspec.kind, pair)?)?;
        let mut sum = ZERO;
        for p in (0..count).rev() {
            let h = layouts[p].embed(flow.generator(p)?)?;
            let sigma = &after[p];
            let comm = &(sigma * &o_tilde) - &(&o_tilde * sigma);
            sum += h.trace_product(&comm);
            // Õ_{p−1} = V_p† Õ_p V_p
            layouts[p].conjugate(&flow.unitaries[p].dagger(), &mut o_tilde)?;
        }
        total += real_part(I * sum)?;
    }
    Ok(total / cspec.pairs.len() as f64)
}

/// Same derivative for pure inputs: `Σ_p −2 Im <Wψ_p| O |W H_p ψ_p>`, where
/// `ψ_p` is the register after perceptron `p` and `W` the later perceptrons.
pub fn grad_s_statevector(
    flow: &MatrixFlowState,
    spec: &NetworkSpec,
    cspec: &CostSpec,
) -> Result<f64> {
    check_all(flow)?;
    let net = flow.network(spec)?;
    cspec.validate(net.n_in(), net.n_out())?;
    let n = net.total_qubits();
    let offsets = net.offsets();
    let layouts = net
        .perceptrons
        .iter()
        .map(|p| SubsystemLayout::qubits(n, &p.targets(&offsets)))
        .collect::<Result<Vec<_>>>()?;
    let out = SubsystemLayout::qubits(n, &net.output_qubits())?;
    let mut total = 0.0;
    for pair in &cspec.pairs {
        let o = observable(cspec.kind, pair)?;
        let mut psi = padded_input(&net, &pair.input)?;
        for (l, u) in layouts.iter().zip(&flow.unitaries) {
            l.apply_vec(u, &mut psi)?;
        }
        // psi is now the final state W ψ_p for every p
        let mut back = psi.clone();
        let mut sum = 0.0;
        for p in (0..layouts.len()).rev() {
            // back = ψ_p; build W H_p ψ_p
            let mut hv: Vec<C64> = back.clone();
            layouts[p].apply_vec(flow.generator(p)?, &mut hv)?;
            for q in p + 1..layouts.len() {
                layouts[q].apply_vec(&flow.unitaries[q], &mut hv)?;
            }
            sum += -2.0 * out.matrix_element(&psi, &o, &hv)?.im;
            layouts[p].apply_vec(&flow.unitaries[p].dagger(), &mut back)?;
        }
        total += sum;
    }
    Ok(total / cspec.pairs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dqnn::{
        cost, global_deep_haar, CostKind, Family, Perceptron, TargetState, TrainingPair,
    };
    use crate::ensembles::{haar_unitary, sample_product_training_pair, InputEnsemble, RngStream};
    use crate::linalg::{c64, QuantumState};

    fn setup(
        seed: u64,
        widths: &[usize],
        kind: CostKind,
    ) -> (NetworkSpec, MatrixFlowState, CostSpec) {
        let mut rng = RngStream::new(seed, 0).rng();
        let spec = global_deep_haar(widths, &mut rng).unwrap();
        let flow = MatrixFlowState::from_network(&spec)
            .unwrap()
            .with_random_generators(&mut rng)
            .unwrap();
        let pair = sample_product_training_pair(
            widths[0],
            *widths.last().unwrap(),
            InputEnsemble::Product,
            &mut rng,
        );
        (spec, flow, CostSpec::new(kind, vec![pair]))
    }

    #[test]
    fn zero_generators_give_zero() {
        let (spec, flow, cs) = setup(1, &[2, 2], CostKind::Global);
        let zeros = flow
            .unitaries
            .iter()
            .map(|u| ComplexMatrix::zeros(u.rows(), u.cols()))
            .collect();
        let flow = MatrixFlowState {
            generators: vec![None; 2],
            ..flow
        }
        .with_generators(zeros)
        .unwrap();
        assert_eq!(grad_s(&flow, &spec, &cs).unwrap(), 0.0);
        assert_eq!(grad_s_statevector(&flow, &spec, &cs).unwrap(), 0.0);
    }

    #[test]
    fn missing_generator_is_an_error() {
        let (spec, flow, cs) = setup(2, &[1, 1], CostKind::Global);
        let flow = MatrixFlowState {
            generators: vec![None],
            ..flow
        };
        assert!(matches!(
            grad_s(&flow, &spec, &cs),
            Err(Error::MissingGenerator(0))
        ));
    }

    #[test]
    fn operator_and_statevector_forms_agree() {
        for (seed, widths) in [
            (3, vec![1, 1]),
            (4, vec![2, 2]),
            (5, vec![1, 2, 1]),
            (6, vec![3, 3]),
        ] {
            for kind in [CostKind::Global, CostKind::Local] {
                let (spec, flow, cs) = setup(seed, &widths, kind);
                let a = grad_s(&flow, &spec, &cs).unwrap();
                let b = grad_s_statevector(&flow, &spec, &cs).unwrap();
                assert!((a - b).abs() < 1e-10, "{widths:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn single_perceptron_with_x_generator() {
        // d/ds Tr[O e^{isX₁} V ρ V† e^{−isX₁}] at s = 0 equals i Tr[O [X₁, VρV†]]
        let mut rng = RngStream::new(7, 0).rng();
        let v = haar_unitary(4, &mut rng);
        let spec = NetworkSpec {
            layer_widths: vec![1, 1],
            perceptrons: vec![Perceptron {
                layer: 1,
                output: 0,
                inputs: vec![0],
                unitary: PerceptronUnitary::Explicit(v.clone()),
            }],
            family: Family::GlobalDeep,
        };
        let x = ComplexMatrix::from_real(2, 2, &[0., 1., 1., 0.]).unwrap();
        // generator X on the output qubit (local qubit 1 = left kron factor)
        let h = crate::linalg::kron(&x, &ComplexMatrix::identity(2));
        let flow = MatrixFlowState::from_network(&spec)
            .unwrap()
            .with_generators(vec![h.clone()])
            .unwrap();
        let pair = TrainingPair {
            input: QuantumState::basis(1, 1),
            output: TargetState::basis(&[0]),
        };
        let cs = CostSpec::new(CostKind::Global, vec![pair.clone()]);
        let rho = ComplexMatrix::diag(&[ZERO, c64(1.0, 0.0), ZERO, ZERO]);
        let sigma = &(&v * &rho) * &v.dagger();
        let o = crate::linalg::kron(
            &crate::dqnn::global_observable(&pair),
            &ComplexMatrix::identity(2),
        );
        let expected = (I * o.trace_product(&crate::linalg::commutator(&h, &sigma))).re;
        assert!((grad_s(&flow, &spec, &cs).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn update_step_group_property_and_zero() {
        let (_, flow, _) = setup(8, &[2, 2], CostKind::Global);
        assert_eq!(
            update_step(flow.clone(), 0.0).unwrap().unitaries,
            flow.unitaries
        );
        let one = update_step(flow.clone(), 0.3).unwrap();
        let two = update_step(update_step(flow, 0.15).unwrap(), 0.15).unwrap();
        for (a, b) in one.unitaries.iter().zip(&two.unitaries) {
            assert!(a.max_abs_diff(b) < 1e-10);
        }
        assert!((one.s - 0.3).abs() < 1e-15);
    }

    #[test]
    fn unitarity_survives_many_steps() {
        let (_, mut flow, _) = setup(9, &[1, 1], CostKind::Global);
        for _ in 0..1000 {
            flow = update_step(flow, 0.01).unwrap();
        }
        assert!(flow.max_unitarity_error() < 1e-8);
    }

    #[test]
    fn linear_in_each_generator() {
        let (spec, flow, cs) = setup(10, &[2, 2], CostKind::Local);
        let h0 = flow.generators[0].clone().unwrap();
        let zero = ComplexMatrix::zeros(h0.rows(), h0.cols());
        let single = flow
            .clone()
            .with_generators(vec![h0.clone(), zero.clone()])
            .unwrap();
        let doubled = flow
            .with_generators(vec![h0.scale(c64(2.0, 0.0)), zero])
            .unwrap();
        let a = grad_s(&single, &spec, &cs).unwrap();
        let b = grad_s(&doubled, &spec, &cs).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12);
    }

    #[test]
    fn forward_difference_is_first_order() {
        let (spec, flow, cs) = setup(11, &[2, 2], CostKind::Global);
        let exact = grad_s(&flow, &spec, &cs).unwrap();
        let c0 = cost(&flow.network(&spec).unwrap(), &cs).unwrap();
        let err = |eps: f64| {
            let moved = update_step(flow.clone(), eps).unwrap();
            (cost(&moved.network(&spec).unwrap(), &cs).unwrap() - c0) / eps - exact
        };
        let (e3, e4) = (err(1e-3), err(1e-4));
        let ratio = e3 / e4;
        assert!((5.0..20.0).contains(&ratio), "ratio {ratio}");
    }
}
