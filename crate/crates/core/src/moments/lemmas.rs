//! Four-party Haar averages used in the variance bounds.
//!
//! Factors are ordered `H₁ ⊗ H₂ ⊗ H₃ ⊗ H₄` with `H₁` most significant.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mc::{mc_haar_integral, mc_haar_integrals, MomentEstimate};
use crate::ensembles::{ginibre_matrix, haar_state, haar_unitary, RngStream};
use crate::error::{Error, Result};
use crate::linalg::{
    commutator, embed_operator, partial_trace_dims, ComplexMatrix, SubsystemLayout, C64,
};

/// Tolerance for the rank-one projector checks.
pub const PROJECTOR_TOL: f64 = 1e-10;

fn expect_dim(name: &str, m: &ComplexMatrix, d: usize) -> Result<()> {
    if !m.is_square() || m.rows() != d {
        return Err(Error::DimensionMismatch(format!(
            "{name} is {}x{}, expected {d}x{d}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Operators for `∫ dV Tr₁₂[M B] = 0` with
/// `M = Tr₃₄[P [V U S U† V†, H]]` and `B = Tr₃₄[P′ V U [S′, K] U† V†]`.
///
/// The average vanishes when `V` covers the support of `H`. With `V` on
/// `H₁ ⊗ H₃` (the default) it is generally nonzero; see the tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Instance {
    pub dims: [usize; 4],
    /// Factors acting under the integrated `V`, ascending.
    pub v_factors: Vec<usize>,
    /// On `H₁ ⊗ H₂`.
    pub h: ComplexMatrix,
    /// On `H₁ ⊗ H₄`.
    pub k: ComplexMatrix,
    pub s: ComplexMatrix,
    pub s_prime: ComplexMatrix,
    /// On `H₃ ⊗ H₄`.
    pub p: ComplexMatrix,
    pub p_prime: ComplexMatrix,
    /// On `H₁ ⊗ H₄`.
    pub u: ComplexMatrix,
}

impl Lemma2Instance {
    /// Gaussian operators and a Haar `U`.
    pub fn random<R: Rng + ?Sized>(dims: [usize; 4], rng: &mut R) -> Self {
        let [d1, d2, d3, d4] = dims;
        let full = d1 * d2 * d3 * d4;
        Lemma2Instance {
            dims,
            v_factors: vec![0, 2],
            h: ginibre_matrix(d1 * d2, d1 * d2, rng),
            k: ginibre_matrix(d1 * d4, d1 * d4, rng),
            s: ginibre_matrix(full, full, rng),
            s_prime: ginibre_matrix(full, full, rng),
            p: ginibre_matrix(d3 * d4, d3 * d4, rng),
            p_prime: ginibre_matrix(d3 * d4, d3 * d4, rng),
            u: haar_unitary(d1 * d4, rng),
        }
    }

    /// Dimension of the integrated unitary `V`.
    pub fn v_dim(&self) -> usize {
        self.v_factors.iter().map(|&f| self.dims[f]).product()
    }

    pub fn validate(&self) -> Result<()> {
        let [d1, d2, d3, d4] = self.dims;
        if self.dims.contains(&0) {
            return Err(Error::InvalidArgument(format!("dims {:?}", self.dims)));
        }
        if self.v_factors.is_empty()
            || self.v_factors.windows(2).any(|w| w[0] >= w[1])
            || self.v_factors.iter().any(|&f| f > 3)
        {
            return Err(Error::InvalidArgument(format!(
                "V factors {:?}",
                self.v_factors
            )));
        }
        let full = d1 * d2 * d3 * d4;
        expect_dim("H", &self.h, d1 * d2)?;
        expect_dim("K", &self.k, d1 * d4)?;
        expect_dim("S", &self.s, full)?;
        expect_dim("S'", &self.s_prime, full)?;
        expect_dim("P", &self.p, d3 * d4)?;
        expect_dim("P'", &self.p_prime, d3 * d4)?;
        expect_dim("U", &self.u, d1 * d4)
    }

    fn prepare(&self) -> Result<Lemma2Prepared> {
        self.validate()?;
        let dims = self.dims.to_vec();
        let u = embed_operator(&self.u, &dims, &[0, 3])?;
        let ud = u.dagger();
        let k = embed_operator(&self.k, &dims, &[0, 3])?;
        Ok(Lemma2Prepared {
            y: &(&u * &self.s) * &ud,
            y_prime: &(&u * &commutator(&self.s_prime, &k)) * &ud,
            h: embed_operator(&self.h, &dims, &[0, 1])?,
            p: embed_operator(&self.p, &dims, &[2, 3])?,
            p_prime: embed_operator(&self.p_prime, &dims, &[2, 3])?,
            v_layout: SubsystemLayout::subsystems(&dims, &self.v_factors)?,
            dims,
        })
    }

    /// `Tr₁₂[M B]` for one `V`.
    pub fn integrand(&self, v: &ComplexMatrix) -> Result<C64> {
        self.prepare()?.integrand(v)
    }
}

struct Lemma2Prepared {
    y: ComplexMatrix,
    y_prime: ComplexMatrix,
    h: ComplexMatrix,
    p: ComplexMatrix,
    p_prime: ComplexMatrix,
    v_layout: SubsystemLayout,
    dims: Vec<usize>,
}

impl Lemma2Prepared {
    fn integrand(&self, v: &ComplexMatrix) -> Result<C64> {
        let mut w = self.y.clone();
        self.v_layout.conjugate(v, &mut w)?;
        let mut w_prime = self.y_prime.clone();
        self.v_layout.conjugate(v, &mut w_prime)?;
        let m = partial_trace_dims(&(&self.p * &commutator(&w, &self.h)), &self.dims, &[0, 1])?;
        let b = partial_trace_dims(&(&self.p_prime * &w_prime), &self.dims, &[0, 1])?;
        Ok(m.trace_product(&b))
    }
}

/// Monte-Carlo estimate of `∫ dV Tr₁₂[M B]`, which vanishes.
pub fn verify_lemma2_zero(
    instance: &Lemma2Instance,
    samples: usize,
    stream: RngStream,
) -> Result<MomentEstimate> {
    let prepared = instance.prepare()?;
    mc_haar_integral(
        |us| prepared.integrand(&us[0]),
        &[instance.v_dim()],
        samples,
        stream,
    )
}

/// Operators for the two averages of
/// `Ω = Tr₂₃₄[(Π ⊗ P̃) V U Z U† V†]` and its primed partner, with `Π`, `Π′`
/// rank-one projectors on `H₂`, `U` on `H₁ ⊗ H₃ ⊗ H₄` and `Z` on `H₄`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Instance {
    pub dims: [usize; 4],
    pub u: ComplexMatrix,
    pub pi: ComplexMatrix,
    pub pi_prime: ComplexMatrix,
    /// On `H₃ ⊗ H₄`.
    pub p_tilde: ComplexMatrix,
    pub p_tilde_prime: ComplexMatrix,
    /// On `H₄`.
    pub z: ComplexMatrix,
    pub z_prime: ComplexMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Result {
    /// `∫ Tr₁[Ω Ω′]`
    pub trace_product: MomentEstimate,
    pub trace_product_exact: C64,
    /// `∫ Tr[Ω] Tr[Ω′]`
    pub product_of_traces: MomentEstimate,
    pub product_of_traces_exact: C64,
}

impl Lemma3Instance {
    /// Gaussian operators, Haar `U` and projectors onto Haar-random states.
    pub fn random<R: Rng + ?Sized>(dims: [usize; 4], rng: &mut R) -> Self {
        let [d1, d2, d3, d4] = dims;
        Lemma3Instance {
            dims,
            u: haar_unitary(d1 * d3 * d4, rng),
            pi: ComplexMatrix::projector(&haar_state(d2, rng)),
            pi_prime: ComplexMatrix::projector(&haar_state(d2, rng)),
            p_tilde: ginibre_matrix(d3 * d4, d3 * d4, rng),
            p_tilde_prime: ginibre_matrix(d3 * d4, d3 * d4, rng),
            z: ginibre_matrix(d4, d4, rng),
            z_prime: ginibre_matrix(d4, d4, rng),
        }
    }

    pub fn v_dim(&self) -> usize {
        self.dims[0] * self.dims[1]
    }

    pub fn validate(&self) -> Result<()> {
        let [d1, d2, d3, d4] = self.dims;
        if self.dims.contains(&0) {
            return Err(Error::InvalidArgument(format!("dims {:?}", self.dims)));
        }
        expect_dim("U", &self.u, d1 * d3 * d4)?;
        expect_dim("Π", &self.pi, d2)?;
        expect_dim("Π'", &self.pi_prime, d2)?;
        expect_dim("P̃", &self.p_tilde, d3 * d4)?;
        expect_dim("P̃'", &self.p_tilde_prime, d3 * d4)?;
        expect_dim("Z", &self.z, d4)?;
        expect_dim("Z'", &self.z_prime, d4)?;
        check_rank_one("Π", &self.pi)?;
        check_rank_one("Π'", &self.pi_prime)
    }

    /// `Ω̃ = Tr₃₄[P̃ U Z U†]` and its primed partner, on `H₁`.
    pub fn reduced_operators(&self) -> Result<(ComplexMatrix, ComplexMatrix)> {
        self.validate()?;
        let [d1, _, d3, d4] = self.dims;
        let dims = [d1, d3, d4];
        let ud = self.u.dagger();
        let reduce = |p: &ComplexMatrix, z: &ComplexMatrix| -> Result<ComplexMatrix> {
            let y = &(&self.u * &embed_operator(z, &dims, &[2])?) * &ud;
            partial_trace_dims(&(&embed_operator(p, &dims, &[1, 2])? * &y), &dims, &[0])
        };
        Ok((
            reduce(&self.p_tilde, &self.z)?,
            reduce(&self.p_tilde_prime, &self.z_prime)?,
        ))
    }

    /// `Tr[Π Π′]`
    pub fn overlap(&self) -> C64 {
        self.pi.trace_product(&self.pi_prime)
    }

    /// Right-hand sides of both averages: `(∫ Tr₁[ΩΩ′], ∫ Tr[Ω] Tr[Ω′])`.
    pub fn exact(&self) -> Result<(C64, C64)> {
        let (x, x_prime) = self.reduced_operators()?;
        let d1 = self.dims[0] as f64;
        let d2 = self.dims[1] as f64;
        let t = self.overlap();
        let den = d1 * d1 * d2 * d2 - 1.0;
        let tr_xx = x.trace_product(&x_prime);
        let tr_tr = x.trace() * x_prime.trace();
        let first = (d1 * d1 * d2 / den) * (t - 1.0 / (d1 * d1 * d2)) * tr_xx
            + (d1 * d2 * d2 / den) * (1.0 - t / d2) * tr_tr;
        let second = (d1 * d2 / den) * (t - 1.0 / d2) * tr_xx
            + (d1 * d1 * d2 * d2 / den) * (1.0 - t / (d1 * d1 * d2)) * tr_tr;
        Ok((first, second))
    }

    /// `(Tr₁[Ω Ω′], Tr[Ω] Tr[Ω′])` for one `V` on `H₁ ⊗ H₂`.
    pub fn integrand(&self, v: &ComplexMatrix) -> Result<(C64, C64)> {
        let (x, x_prime) = self.reduced_operators()?;
        self.integrand_reduced(&x, &x_prime, v)
    }

    fn integrand_reduced(
        &self,
        x: &ComplexMatrix,
        x_prime: &ComplexMatrix,
        v: &ComplexMatrix,
    ) -> Result<(C64, C64)> {
        let [d1, d2, _, _] = self.dims;
        let dims = [d1, d2];
        let vd = v.dagger();
        let omega = |x: &ComplexMatrix, pi: &ComplexMatrix| -> Result<ComplexMatrix> {
            let inner = &(v * &embed_operator(x, &dims, &[0])?) * &vd;
            partial_trace_dims(&(&embed_operator(pi, &dims, &[1])? * &inner), &dims, &[0])
        };
        let o = omega(x, &self.pi)?;
        let o_prime = omega(x_prime, &self.pi_prime)?;
        Ok((o.trace_product(&o_prime), o.trace() * o_prime.trace()))
    }
}

fn check_rank_one(name: &str, pi: &ComplexMatrix) -> Result<()> {
    let tr = pi.trace();
    if (tr - 1.0).norm() > PROJECTOR_TOL {
        return Err(Error::NotRankOneProjector(format!("Tr[{name}] = {tr}")));
    }
    let idem = (&(pi * pi) - pi).max_abs();
    if idem > PROJECTOR_TOL {
        return Err(Error::NotRankOneProjector(format!(
            "{name}² differs from {name} by {idem:.3e}"
        )));
    }
    Ok(())
}

/// Monte-Carlo estimates of both averages next to their closed forms.
pub fn verify_lemma3_formula(
    instance: &Lemma3Instance,
    samples: usize,
    stream: RngStream,
) -> Result<Lemma3Result> {
    let (exact_first, exact_second) = instance.exact()?;
    let (x, x_prime) = instance.reduced_operators()?;
    let est = mc_haar_integrals(
        |us| {
            let (a, b) = instance.integrand_reduced(&x, &x_prime, &us[0])?;
            Ok(vec![a, b])
        },
        &[instance.v_dim()],
        samples,
        stream,
    )?;
    Ok(Lemma3Result {
        trace_product: est[0],
        trace_product_exact: exact_first,
        product_of_traces: est[1],
        product_of_traces_exact: exact_second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, kron, ZERO};

    const DIMS: [usize; 4] = [2, 2, 2, 2];

    /// Every operator embedded densely on the four-factor space.
    fn lemma2_dense(inst: &Lemma2Instance, v: &ComplexMatrix) -> C64 {
        let d = inst.dims.to_vec();
        let e = |op: &ComplexMatrix, pos: &[usize]| embed_operator(op, &d, pos).unwrap();
        let (vv, uu) = (e(v, &inst.v_factors), e(&inst.u, &[0, 3]));
        let vu = &vv * &uu;
        let vud = vu.dagger();
        let w = &(&vu * &inst.s) * &vud;
        let m_full = &e(&inst.p, &[2, 3]) * &commutator(&w, &e(&inst.h, &[0, 1]));
        let b_full = &(&(&e(&inst.p_prime, &[2, 3]) * &vu)
            * &commutator(&inst.s_prime, &e(&inst.k, &[0, 3])))
            * &vud;
        let m = partial_trace_dims(&m_full, &d, &[0, 1]).unwrap();
        let b = partial_trace_dims(&b_full, &d, &[0, 1]).unwrap();
        (&m * &b).trace()
    }

    fn lemma3_dense(inst: &Lemma3Instance, v: &ComplexMatrix) -> (C64, C64) {
        let d = inst.dims.to_vec();
        let e = |op: &ComplexMatrix, pos: &[usize]| embed_operator(op, &d, pos).unwrap();
        let vu = &e(v, &[0, 1]) * &e(&inst.u, &[0, 2, 3]);
        let omega = |pi: &ComplexMatrix, pt: &ComplexMatrix, z: &ComplexMatrix| {
            let p = e(&kron(pi, pt), &[1, 2, 3]);
            let full = &(&(&p * &vu) * &e(z, &[3])) * &vu.dagger();
            partial_trace_dims(&full, &d, &[0]).unwrap()
        };
        let o = omega(&inst.pi, &inst.p_tilde, &inst.z);
        let o2 = omega(&inst.pi_prime, &inst.p_tilde_prime, &inst.z_prime);
        ((&o * &o2).trace(), o.trace() * o2.trace())
    }

    #[test]
    fn lemma2_integrand_matches_dense_evaluation() {
        let mut rng = RngStream::new(1, 0).rng();
        for (dims, support) in [
            (DIMS, vec![0, 2]),
            ([2, 1, 2, 3], vec![0, 2]),
            ([1, 2, 3, 2], vec![0, 2]),
            (DIMS, vec![0, 1]),
        ] {
            let inst = Lemma2Instance {
                v_factors: support,
                ..Lemma2Instance::random(dims, &mut rng)
            };
            let v = haar_unitary(inst.v_dim(), &mut rng);
            let a = inst.integrand(&v).unwrap();
            let b = lemma2_dense(&inst, &v);
            assert!(
                (a - b).norm() < 1e-9 * b.norm().max(1.0),
                "{dims:?}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn lemma3_integrand_matches_dense_evaluation() {
        let mut rng = RngStream::new(2, 0).rng();
        for dims in [DIMS, [2, 3, 1, 2], [3, 2, 2, 1]] {
            let inst = Lemma3Instance::random(dims, &mut rng);
            let v = haar_unitary(inst.v_dim(), &mut rng);
            let (a1, a2) = inst.integrand(&v).unwrap();
            let (b1, b2) = lemma3_dense(&inst, &v);
            assert!((a1 - b1).norm() < 1e-9 * b1.norm().max(1.0));
            assert!((a2 - b2).norm() < 1e-9 * b2.norm().max(1.0));
        }
    }

    /// Exact `∫ dV Tr₁₂[M B]` from the two-copy Weingarten calculus:
    /// `E[V_{i₁a₁} V_{i₂a₂} V̄_{j₁b₁} V̄_{j₂b₂}] = Σ_{σ,τ} δ(i, jσ) δ(a, bτ) Wg(στ⁻¹)`.
    fn weingarten_average(inst: &Lemma2Instance) -> C64 {
        let dims = inst.dims.to_vec();
        let total: usize = dims.iter().product();
        let e = |op: &ComplexMatrix, pos: &[usize]| embed_operator(op, &dims, pos).unwrap();
        let u = e(&inst.u, &[0, 3]);
        let ud = u.dagger();
        let y = &(&u * &inst.s) * &ud;
        let yp = &(&u * &commutator(&inst.s_prime, &e(&inst.k, &[0, 3]))) * &ud;
        let (h, p, pp) = (
            e(&inst.h, &[0, 1]),
            e(&inst.p, &[2, 3]),
            e(&inst.p_prime, &[2, 3]),
        );
        let env: Vec<usize> = (0..4).filter(|f| !inst.v_factors.contains(f)).collect();
        let digits = |i: usize| {
            let mut out = [0usize; 4];
            let mut r = i;
            for f in (0..4).rev() {
                out[f] = r % dims[f];
                r /= dims[f];
            }
            out
        };
        let pack =
            |ds: &[usize; 4], fs: &[usize]| fs.iter().fold(0, |acc, &f| acc * dims[f] + ds[f]);
        let join = |v: usize, en: usize| {
            let mut ds = [0usize; 4];
            let mut r = v;
            for &f in inst.v_factors.iter().rev() {
                ds[f] = r % dims[f];
                r /= dims[f];
            }
            let mut r = en;
            for &f in env.iter().rev() {
                ds[f] = r % dims[f];
                r /= dims[f];
            }
            (0..4).fold(0, |acc, f| acc * dims[f] + ds[f])
        };
        let dv = inst.v_dim();
        let de = total / dv;
        let split: Vec<(usize, usize)> = (0..total)
            .map(|i| (pack(&digits(i), &inst.v_factors), pack(&digits(i), &env)))
            .collect();
        let t = |m: &ComplexMatrix, a: usize, b: usize| {
            (0..dv).map(|x| m[(join(x, a), join(x, b))]).sum::<C64>()
        };
        let mut f = vec![ZERO; de * de * de * de];
        for (ei, ej, ek, el) in quadruples(de) {
            let mut acc = ZERO;
            for a1 in 0..dv {
                for a2 in 0..dv {
                    acc += y[(join(a1, ei), join(a2, ej))] * yp[(join(a2, ek), join(a1, el))];
                }
            }
            f[((ei * de + ej) * de + ek) * de + el] = acc;
        }
        let ty: Vec<C64> = (0..de * de).map(|x| t(&y, x / de, x % de)).collect();
        let typ: Vec<C64> = (0..de * de).map(|x| t(&yp, x / de, x % de)).collect();
        let d = dv as f64;
        let (wg_id, wg_swap) = (1.0 / (d * d - 1.0), -1.0 / (d * (d * d - 1.0)));
        let unit = |i: usize, j: usize| {
            ComplexMatrix::from_fn(total, total, |a, b| {
                if a == i && b == j {
                    C64::new(1.0, 0.0)
                } else {
                    ZERO
                }
            })
        };
        let keep = [0usize, 1];
        let m_of: Vec<ComplexMatrix> = (0..total * total)
            .map(|x| {
                partial_trace_dims(
                    &(&p * &commutator(&unit(x / total, x % total), &h)),
                    &dims,
                    &keep,
                )
                .unwrap()
            })
            .collect();
        let b_of: Vec<ComplexMatrix> = (0..total * total)
            .map(|x| {
                partial_trace_dims(&(&pp * &unit(x / total, x % total)), &dims, &keep).unwrap()
            })
            .collect();
        let mut sum = ZERO;
        for i in 0..total {
            for j in 0..total {
                for k in 0..total {
                    for l in 0..total {
                        let ((vi, ei), (vj, ej), (vk, ek), (vl, el)) =
                            (split[i], split[j], split[k], split[l]);
                        let tt = ty[ei * de + ej] * typ[ek * de + el];
                        let ff = f[((ei * de + ej) * de + ek) * de + el];
                        let mut coeff = ZERO;
                        if vi == vj && vk == vl {
                            coeff += tt * wg_id + ff * wg_swap;
                        }
                        if vi == vl && vk == vj {
                            coeff += tt * wg_swap + ff * wg_id;
                        }
                        if coeff != ZERO {
                            sum += coeff * m_of[i * total + j].trace_product(&b_of[k * total + l]);
                        }
                    }
                }
            }
        }
        sum
    }

    fn quadruples(n: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
        (0..n * n * n * n).map(move |x| (x / (n * n * n), x / (n * n) % n, x / n % n, x % n))
    }

    #[test]
    fn lemma2_stated_support_has_a_nonzero_average() {
        let mut rng = RngStream::new(3, 0).rng();
        let inst = Lemma2Instance::random(DIMS, &mut rng);
        let exact = weingarten_average(&inst);
        let est = verify_lemma2_zero(&inst, 20_000, RngStream::new(3, 1)).unwrap();
        assert!(est.agrees_with(exact, 4.0), "{est:?} vs {exact}");
        assert!(exact.norm() > 10.0 * est.stderr, "{exact}");
    }

    #[test]
    fn lemma2_average_vanishes_when_v_covers_h() {
        let mut rng = RngStream::new(3, 0).rng();
        for support in [vec![0, 1], vec![0, 1, 2, 3]] {
            let inst = Lemma2Instance {
                v_factors: support.clone(),
                ..Lemma2Instance::random(DIMS, &mut rng)
            };
            let exact = weingarten_average(&inst);
            let v = haar_unitary(inst.v_dim(), &mut rng);
            let scale = inst.integrand(&v).unwrap().norm();
            assert!(exact.norm() < 1e-9 * scale.max(1.0), "{support:?}: {exact}");
        }
        let inst = Lemma2Instance {
            v_factors: vec![0, 1],
            ..Lemma2Instance::random(DIMS, &mut rng)
        };
        let est = verify_lemma2_zero(&inst, 20_000, RngStream::new(3, 2)).unwrap();
        assert!(est.agrees_with(ZERO, 3.0), "{est:?}");
    }

    #[test]
    fn lemma2_bad_support_is_rejected() {
        let mut rng = RngStream::new(3, 0).rng();
        let inst = Lemma2Instance {
            v_factors: vec![2, 0],
            ..Lemma2Instance::random(DIMS, &mut rng)
        };
        assert!(matches!(
            verify_lemma2_zero(&inst, 100, RngStream::new(0, 0)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn lemma2_degenerate_witnesses_are_exactly_zero() {
        let mut rng = RngStream::new(4, 0).rng();
        let mut inst = Lemma2Instance::random(DIMS, &mut rng);
        inst.h = ComplexMatrix::zeros(4, 4);
        let est = verify_lemma2_zero(&inst, 100, RngStream::new(4, 1)).unwrap();
        assert_eq!((est.value, est.stderr), (ZERO, 0.0));
        let mut inst = Lemma2Instance::random(DIMS, &mut rng);
        inst.k = ComplexMatrix::zeros(4, 4);
        let est = verify_lemma2_zero(&inst, 100, RngStream::new(4, 2)).unwrap();
        assert_eq!((est.value, est.stderr), (ZERO, 0.0));
    }

    #[test]
    fn lemma2_shape_errors() {
        let mut rng = RngStream::new(5, 0).rng();
        let mut inst = Lemma2Instance::random(DIMS, &mut rng);
        inst.p = ComplexMatrix::identity(2);
        assert!(matches!(
            verify_lemma2_zero(&inst, 100, RngStream::new(0, 0)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn lemma3_matches_formulas() {
        let mut rng = RngStream::new(6, 0).rng();
        let inst = Lemma3Instance::random(DIMS, &mut rng);
        let r = verify_lemma3_formula(&inst, 20_000, RngStream::new(6, 1)).unwrap();
        assert!(
            r.trace_product.agrees_with(r.trace_product_exact, 3.0),
            "{r:?}"
        );
        assert!(
            r.product_of_traces
                .agrees_with(r.product_of_traces_exact, 3.0),
            "{r:?}"
        );
    }

    #[test]
    fn lemma3_equal_projectors() {
        let mut rng = RngStream::new(7, 0).rng();
        let mut inst = Lemma3Instance::random(DIMS, &mut rng);
        inst.pi_prime = inst.pi.clone();
        assert!((inst.overlap() - 1.0).norm() < 1e-12);
        let (x, xp) = inst.reduced_operators().unwrap();
        let (d1, d2) = (2.0f64, 2.0f64);
        let den = d1 * d1 * d2 * d2 - 1.0;
        // coefficient of Tr₁[Ω̃Ω̃′] with Tr[ΠΠ′] = 1
        let coeff = d1 * d1 * d2 * (1.0 - 1.0 / (d1 * d1 * d2)) / den;
        let rest = (d1 * d2 * d2 / den) * (1.0 - 1.0 / d2) * x.trace() * xp.trace();
        let (first, _) = inst.exact().unwrap();
        assert!((first - (coeff * x.trace_product(&xp) + rest)).norm() < 1e-12);
        let r = verify_lemma3_formula(&inst, 20_000, RngStream::new(7, 1)).unwrap();
        assert!(
            r.trace_product.agrees_with(r.trace_product_exact, 3.0),
            "{r:?}"
        );
    }

    #[test]
    fn lemma3_orthogonal_projectors() {
        let mut rng = RngStream::new(8, 0).rng();
        let mut inst = Lemma3Instance::random(DIMS, &mut rng);
        inst.pi = ComplexMatrix::diag(&[c64(1.0, 0.0), ZERO]);
        inst.pi_prime = ComplexMatrix::diag(&[ZERO, c64(1.0, 0.0)]);
        assert_eq!(inst.overlap(), ZERO);
        let (x, xp) = inst.reduced_operators().unwrap();
        let (first, _) = inst.exact().unwrap();
        // Tr[ΠΠ′] = 0 leaves −1/(d₁²d₂²−1) on Tr₁[Ω̃Ω̃′]
        let expected = -1.0 / 15.0 * x.trace_product(&xp) + (8.0 / 15.0) * x.trace() * xp.trace();
        assert!((first - expected).norm() < 1e-12);
        let r = verify_lemma3_formula(&inst, 20_000, RngStream::new(8, 1)).unwrap();
        assert!(
            r.trace_product.agrees_with(r.trace_product_exact, 3.0),
            "{r:?}"
        );
        assert!(
            r.product_of_traces
                .agrees_with(r.product_of_traces_exact, 3.0),
            "{r:?}"
        );
    }

    #[test]
    fn non_projectors_are_rejected() {
        let mut rng = RngStream::new(9, 0).rng();
        let mut inst = Lemma3Instance::random(DIMS, &mut rng);
        inst.pi = ComplexMatrix::identity(2);
        assert!(matches!(inst.exact(), Err(Error::NotRankOneProjector(_))));
        inst.pi = ComplexMatrix::diag(&[c64(0.5, 0.0), c64(0.5, 0.0)]);
        assert!(matches!(
            verify_lemma3_formula(&inst, 100, RngStream::new(0, 0)),
            Err(Error::NotRankOneProjector(_))
        ));
    }
}
