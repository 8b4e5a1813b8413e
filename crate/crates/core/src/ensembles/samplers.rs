use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::pauli::PauliString;
use super::rng::RngStream;
use crate::dqnn::{TargetState, TrainingPair};
use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix, QuantumState, C64};

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re * s, im * s)
}

/// Matrix of independent standard complex Gaussian entries.
pub fn ginibre_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let data: Vec<C64> = (0..rows * cols).map(|_| gaussian_c64(rng)).collect();
    ComplexMatrix::from_vec(rows, cols, data).expect("length matches shape")
}

/// Haar-random `dim × dim` unitary: Ginibre matrix, QR, then the phases of
/// the R diagonal folded into Q.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let data: Vec<C64> = (0..dim * dim).map(|_| gaussian_c64(rng)).collect();
    let g = DMatrix::from_row_slice(dim, dim, &data);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let phases: Vec<C64> = (0..dim)
        .map(|i| {
            let d = r[(i, i)];
            if d.norm() == 0.0 {
                c64(1.0, 0.0)
            } else {
                d / d.norm()
            }
        })
        .collect();
    ComplexMatrix::from_fn(dim, dim, |i, j| q[(i, j)] * phases[j])
}

/// Haar-random unitary on `num_qubits` qubits drawn from `stream`.
pub fn sample_haar_unitary(num_qubits: usize, stream: &RngStream) -> ComplexMatrix {
    haar_unitary(1 << num_qubits, &mut stream.rng())
}

/// Haar-random pure state of dimension `dim`.
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim).map(|_| gaussian_c64(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

pub fn haar_qubit<R: Rng + ?Sized>(rng: &mut R) -> [C64; 2] {
    let v = haar_state(2, rng);
    [v[0], v[1]]
}

pub fn random_bits<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

/// Uniformly random non-identity Pauli string.
pub fn random_pauli_generator<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> PauliString {
    PauliString::from_index(num_qubits, rng.random_range(1..1usize << (2 * num_qubits)))
}

/// Real coefficients over all `4^k` Pauli strings, indexed as [`PauliString::from_index`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliExpansion {
    pub num_qubits: usize,
    pub coefficients: Vec<f64>,
}

impl PauliExpansion {
    pub fn to_matrix(&self) -> ComplexMatrix {
        let d = 1usize << self.num_qubits;
        let mut m = ComplexMatrix::zeros(d, d);
        for (idx, &h) in self.coefficients.iter().enumerate() {
            if h == 0.0 {
                continue;
            }
            let p = PauliString::from_index(self.num_qubits, idx).to_matrix();
            for (o, x) in m.data_mut().iter_mut().zip(p.data()) {
                *o += x * h;
            }
        }
        m
    }

    /// `Tr[H²] = 2^k Σ h_P²`
    pub fn trace_square(&self) -> f64 {
        (1u64 << self.num_qubits) as f64 * self.coefficients.iter().map(|h| h * h).sum::<f64>()
    }

    /// `h_P = Tr[H P] / 2^k`
    pub fn recover(h: &ComplexMatrix, num_qubits: usize) -> PauliExpansion {
        let d = (1u64 << num_qubits) as f64;
        let coefficients = (0..1usize << (2 * num_qubits))
            .map(|idx| {
                (h.trace_product(&PauliString::from_index(num_qubits, idx).to_matrix())).re / d
            })
            .collect();
        PauliExpansion {
            num_qubits,
            coefficients,
        }
    }
}

/// Standard-normal coefficients rescaled so that `Tr[H²] = trace_square_norm`.
pub fn sample_pauli_expansion<R: Rng + ?Sized>(
    num_qubits: usize,
    trace_square_norm: f64,
    rng: &mut R,
) -> Result<PauliExpansion> {
    if !(trace_square_norm > 0.0) || !trace_square_norm.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "trace_square_norm = {trace_square_norm}"
        )));
    }
    let mut e = PauliExpansion {
        num_qubits,
        coefficients: (0..1usize << (2 * num_qubits))
            .map(|_| rng.sample(StandardNormal))
            .collect(),
    };
    let scale = (trace_square_norm / e.trace_square()).sqrt();
    for h in &mut e.coefficients {
        *h *= scale;
    }
    Ok(e)
}

pub fn sample_pauli_hermitian<R: Rng + ?Sized>(
    num_qubits: usize,
    trace_square_norm: f64,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    Ok(sample_pauli_expansion(num_qubits, trace_square_norm, rng)?.to_matrix())
}

/// How training inputs are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputEnsemble {
    /// Haar-random state on each qubit.
    #[default]
    Product,
    /// Haar-random state on the whole input register.
    Entangled,
}

/// Haar-random input paired with a uniformly random basis-string target.
pub fn sample_product_training_pair<R: Rng + ?Sized>(
    n_in: usize,
    n_out: usize,
    ensemble: InputEnsemble,
    rng: &mut R,
) -> TrainingPair {
    let amplitudes = match ensemble {
        InputEnsemble::Product => {
            let factors: Vec<[C64; 2]> = (0..n_in).map(|_| haar_qubit(rng)).collect();
            crate::linalg::product_vector(&factors)
        }
        InputEnsemble::Entangled => haar_state(1 << n_in, rng),
    };
    let bits = random_bits(n_out, rng);
    TrainingPair {
        input: QuantumState::Pure {
            num_qubits: n_in,
            amplitudes,
        },
        output: TargetState::basis(&bits),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::HERMITIAN_TOL;

    #[test]
    fn haar_sample_is_unitary() {
        for q in 1..=4 {
            let u = sample_haar_unitary(q, &RngStream::new(3, q as u64));
            assert!(u.unitarity_error() <= 1e-10);
        }
    }

    #[test]
    fn pauli_hermitian_is_hermitian_with_exact_norm() {
        let mut rng = RngStream::new(11, 0).rng();
        for k in 1..=4 {
            let target = (1u64 << (k + 1)) as f64;
            let h = sample_pauli_hermitian(k, target, &mut rng).unwrap();
            assert!(h.hermiticity_error() <= HERMITIAN_TOL);
            let tr2 = h.trace_product(&h).re;
            assert!((tr2 - target).abs() <= 1e-8);
        }
    }

    #[test]
    fn coefficients_are_recovered() {
        let mut rng = RngStream::new(5, 1).rng();
        let e = sample_pauli_expansion(3, 16.0, &mut rng).unwrap();
        let back = PauliExpansion::recover(&e.to_matrix(), 3);
        for (a, b) in e.coefficients.iter().zip(&back.coefficients) {
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn nonpositive_norm_rejected() {
        let mut rng = RngStream::new(5, 1).rng();
        assert!(sample_pauli_hermitian(2, 0.0, &mut rng).is_err());
    }

    #[test]
    fn generator_is_never_identity() {
        let mut rng = RngStream::new(2, 2).rng();
        for _ in 0..200 {
            assert!(!random_pauli_generator(1, &mut rng).is_identity());
        }
    }

    #[test]
    fn training_pairs_are_valid_and_reproducible() {
        for ens in [InputEnsemble::Product, InputEnsemble::Entangled] {
            let a = sample_product_training_pair(3, 2, ens, &mut RngStream::new(9, 4).rng());
            let b = sample_product_training_pair(3, 2, ens, &mut RngStream::new(9, 4).rng());
            assert_eq!(a, b);
            a.input.validate().unwrap();
            match &a.output {
                TargetState::Product { qubits } => {
                    assert_eq!(qubits.len(), 2);
                    for q in qubits {
                        let is_basis = (q[0].norm() == 1.0 && q[1].norm() == 0.0)
                            || (q[0].norm() == 0.0 && q[1].norm() == 1.0);
                        assert!(is_basis);
                    }
                }
                TargetState::Full { .. } => panic!("basis targets are products"),
            }
        }
    }
}
