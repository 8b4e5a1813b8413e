//! Monte-Carlo Haar integration with per-sample random streams.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{derive_seed, haar_unitary, RngStream};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};

/// Smallest sample count accepted by the integrators.
pub const MIN_SAMPLES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: C64,
    /// `sqrt(Σ|z − mean|² / (N − 1)) / √N`, real and imaginary parts together.
    pub stderr: f64,
    pub samples: usize,
}

impl MomentEstimate {
    /// Mean and standard error of `values`.
    pub fn from_samples(values: &[C64]) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "{n} samples; need at least 2"
            )));
        }
        let mean = pairwise_sum(values) / n as f64;
        let dev: Vec<f64> = values.iter().map(|z| (z - mean).norm_sqr()).collect();
        let var = pairwise_sum_real(&dev) / (n - 1) as f64;
        Ok(MomentEstimate {
            value: mean,
            stderr: (var / n as f64).sqrt(),
            samples: n,
        })
    }

    /// `|value − expected|` in units of `stderr`; 0 or infinity when `stderr` is 0.
    pub fn sigmas_from(&self, expected: C64) -> f64 {
        let dev = (self.value - expected).norm();
        if self.stderr > 0.0 {
            dev / self.stderr
        } else if dev <= 1e-12 * expected.norm().max(1.0) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn agrees_with(&self, expected: C64, k: f64) -> bool {
        self.sigmas_from(expected) <= k
    }
}

/// Tree summation; the grouping depends only on the length.
pub fn pairwise_sum(values: &[C64]) -> C64 {
    match values.len() {
        0 => ZERO,
        1 => values[0],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

fn pairwise_sum_real(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => pairwise_sum_real(&values[..n / 2]) + pairwise_sum_real(&values[n / 2..]),
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "{samples} samples; need at least {MIN_SAMPLES}"
        )));
    }
    Ok(())
}

/// Several integrands evaluated on the same Haar draws.
///
/// Sample `i` draws one unitary per entry of `dims` from stream `i` of a
/// seed derived from `stream`, so results do not depend on the thread count.
pub fn mc_haar_integrals<F>(
    integrand: F,
    dims: &[usize],
    samples: usize,
    stream: RngStream,
) -> Result<Vec<MomentEstimate>>
where
    F: Fn(&[ComplexMatrix]) -> Result<Vec<C64>> + Sync,
{
    check_samples(samples)?;
    let base = derive_seed(stream.seed, stream.stream_id);
    let rows: Vec<Vec<C64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(base, i as u64).rng();
            let us: Vec<ComplexMatrix> = dims.iter().map(|&d| haar_unitary(d, &mut rng)).collect();
            integrand(&us).map_err(|e| Error::SampleFailed {
                seed: base,
                stream: i as u64,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::DimensionMismatch(
            "integrand returned a varying number of values".into(),
        ));
    }
    (0..width)
        .map(|k| {
            let column: Vec<C64> = rows.iter().map(|r| r[k]).collect();
            MomentEstimate::from_samples(&column)
        })
        .collect()
}

/// Empirical mean of `integrand` over independent Haar draws.
pub fn mc_haar_integral<F>(
    integrand: F,
    dims: &[usize],
    samples: usize,
    stream: RngStream,
) -> Result<MomentEstimate>
where
    F: Fn(&[ComplexMatrix]) -> Result<C64> + Sync,
{
    let mut est = mc_haar_integrals(|us| Ok(vec![integrand(us)?]), dims, samples, stream)?;
    Ok(est.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;
    use crate::moments::exact::{first_moment_exact, second_moment_exact_chain};

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0., 1., 1., 0.]).unwrap()
    }

    #[test]
    fn constant_integrand() {
        let e = mc_haar_integral(|_| Ok(c64(2.5, -1.0)), &[2], 100, RngStream::new(1, 0)).unwrap();
        assert_eq!(e.value, c64(2.5, -1.0));
        assert_eq!(e.stderr, 0.0);
        assert_eq!(e.samples, 100);
    }

    #[test]
    fn too_few_samples_rejected() {
        assert!(mc_haar_integral(|_| Ok(ZERO), &[2], 99, RngStream::new(1, 0)).is_err());
    }

    #[test]
    fn second_moment_reference() {
        // Tr[V X V† X] / 2 is the chain integrand with C = D = I
        let x = pauli_x();
        let id = ComplexMatrix::identity(2);
        let exact = second_moment_exact_chain(&x, &x, &id, &id).unwrap() / 2.0;
        assert_eq!(exact, first_moment_exact(&x, &x).unwrap() / 2.0);
        let e = mc_haar_integral(
            |us| Ok((&(&us[0] * &x) * &us[0].dagger()).trace_product(&x) / 2.0),
            &[2],
            20_000,
            RngStream::new(2, 0),
        )
        .unwrap();
        assert!(e.agrees_with(exact, 3.0), "{e:?} vs {exact}");
    }

    #[test]
    fn stderr_halves_with_four_times_the_samples() {
        let x = pauli_x();
        let f = |us: &[ComplexMatrix]| Ok((&(&us[0] * &x) * &us[0].dagger()).trace_product(&x));
        let a = mc_haar_integral(f, &[2], 5_000, RngStream::new(3, 0)).unwrap();
        let b = mc_haar_integral(f, &[2], 20_000, RngStream::new(3, 1)).unwrap();
        let ratio = a.stderr / b.stderr;
        assert!((ratio - 2.0).abs() <= 0.4, "ratio {ratio}");
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let f = |us: &[ComplexMatrix]| Ok(us[0][(0, 1)] * us[1][(2, 3)]);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mc_haar_integral(f, &[2, 4], 500, RngStream::new(4, 0)).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(3));
        assert_eq!(one.value.re.to_bits(), run(2).value.re.to_bits());
    }

    #[test]
    fn failures_report_the_sample() {
        let r = mc_haar_integral(|_| Err(Error::NotProduct), &[2], 100, RngStream::new(5, 0));
        assert!(matches!(r, Err(Error::SampleFailed { .. })));
    }
}
