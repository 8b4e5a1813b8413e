//! Property tests for the linear-algebra kernels and the variance statistics.

use plateau_core::ensembles::{haar_state, haar_unitary, sample_pauli_hermitian, RngStream};
use plateau_core::linalg::{apply_to_vector, herm_expm, partial_trace_qubits, ComplexMatrix, ONE};
use plateau_core::variance::{bootstrap_var_ci, sample_stats};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unitary_round_trip(seed in any::<u64>(), num_qubits in 1usize..5, k in 1usize..3) {
        let k = k.min(num_qubits);
        let mut rng = RngStream::new(seed, 0).rng();
        let u = haar_unitary(1 << k, &mut rng);
        let psi = haar_state(1 << num_qubits, &mut rng);
        let targets: Vec<usize> = (0..k).map(|i| (i * 3 + seed as usize) % num_qubits).collect();
        let mut dedup = targets.clone();
        dedup.sort_unstable();
        dedup.dedup();
        prop_assume!(dedup.len() == targets.len());
        let mut v = psi.clone();
        apply_to_vector(&mut v, num_qubits, &u, &targets).unwrap();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        apply_to_vector(&mut v, num_qubits, &u.dagger(), &targets).unwrap();
        for (a, b) in v.iter().zip(&psi) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn tracing_out_everything_leaves_one(seed in any::<u64>(), num_qubits in 1usize..5) {
        let mut rng = RngStream::new(seed, 1).rng();
        let rho = ComplexMatrix::projector(&haar_state(1 << num_qubits, &mut rng));
        let scalar = partial_trace_qubits(&rho, num_qubits, &[]).unwrap();
        prop_assert_eq!((scalar.rows(), scalar.cols()), (1, 1));
        prop_assert!((scalar[(0, 0)] - ONE).norm() < 1e-12);
        let one_qubit = partial_trace_qubits(&rho, num_qubits, &[0]).unwrap();
        prop_assert!((one_qubit.trace() - ONE).norm() < 1e-12);
    }

    #[test]
    fn expm_group_law(seed in any::<u64>(), k in 1usize..4, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rng = RngStream::new(seed, 2).rng();
        let h = sample_pauli_hermitian(k, (1 << k) as f64, &mut rng).unwrap();
        let lhs = &herm_expm(&h, a).unwrap() * &herm_expm(&h, b).unwrap();
        let rhs = herm_expm(&h, a + b).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        prop_assert!(rhs.unitarity_error() < 1e-10);
    }

    #[test]
    fn bootstrap_interval_brackets_the_variance(
        values in prop::collection::vec(-10.0f64..10.0, 2..200),
        seed in any::<u64>(),
    ) {
        let s = sample_stats(&values).unwrap();
        prop_assert!(s.var >= 0.0);
        let (lo, hi) = bootstrap_var_ci(&values, 200, 0.95, RngStream::new(seed, 0)).unwrap();
        prop_assert!(0.0 <= lo && lo <= s.var && s.var <= hi, "{} {} {}", lo, s.var, hi);
    }
}
