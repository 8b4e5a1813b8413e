//! Closed-form Haar averages of one and two copies of `V ⊗ V†`.

use crate::error::{Error, Result};
use crate::linalg::{c64, kron, partial_trace_dims, ComplexMatrix, SubsystemLayout, C64, ZERO};

fn same_square(ops: &[&ComplexMatrix]) -> Result<usize> {
    let d = ops[0].rows();
    for m in ops {
        if !m.is_square() || m.rows() != d {
            return Err(Error::DimensionMismatch(format!(
                "expected {d}x{d} operators, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(d)
}

/// `∫ Tr[V A V† B] = Tr[A] Tr[B] / d`
pub fn first_moment_exact(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    let d = same_square(&[a, b])? as f64;
    Ok(a.trace() * b.trace() / d)
}

/// `∫ Tr[V A V† B V C V† D]`
pub fn second_moment_exact_chain(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    d_op: &ComplexMatrix,
) -> Result<C64> {
    let d = same_square(&[a, b, c, d_op])? as f64;
    let (ta, tb, tc, td) = (a.trace(), b.trace(), c.trace(), d_op.trace());
    let ac = a.trace_product(c);
    let bd = b.trace_product(d_op);
    Ok((ta * tc * bd + ac * tb * td) / (d * d - 1.0)
        - (ac * bd + ta * tb * tc * td) / (d * (d * d - 1.0)))
}

/// `∫ Tr[V A V† B] Tr[V C V† D]`
pub fn second_moment_exact_product(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    d_op: &ComplexMatrix,
) -> Result<C64> {
    let d = same_square(&[a, b, c, d_op])? as f64;
    let (ta, tb, tc, td) = (a.trace(), b.trace(), c.trace(), d_op.trace());
    let ac = a.trace_product(c);
    let bd = b.trace_product(d_op);
    Ok((ta * tb * tc * td + ac * bd) / (d * d - 1.0)
        - (ac * tb * td + ta * tc * bd) / (d * (d * d - 1.0)))
}

/// Twirl of the second factor: `∫ (I ⊗ V) A (I ⊗ V†) = Tr₂[A] ⊗ I / d₂`.
pub fn subsystem_twirl_exact(a: &ComplexMatrix, dims: (usize, usize)) -> Result<ComplexMatrix> {
    let (d1, d2) = dims;
    if !a.is_square() || a.rows() != d1 * d2 {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator for dims ({d1}, {d2})",
            a.rows(),
            a.cols()
        )));
    }
    let reduced = partial_trace_dims(a, &[d1, d2], &[0])?;
    Ok(kron(&reduced, &ComplexMatrix::identity(d2)).scale(c64(1.0 / d2 as f64, 0.0)))
}

/// `Tr₁[(|p><q| ⊗ I) A]`, the `(q, p)` block of `A` over the first factor.
pub fn operator_block(
    a: &ComplexMatrix,
    dims: (usize, usize),
    q: usize,
    p: usize,
) -> Result<ComplexMatrix> {
    let (d1, d2) = dims;
    if !a.is_square() || a.rows() != d1 * d2 {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator for dims ({d1}, {d2})",
            a.rows(),
            a.cols()
        )));
    }
    if q >= d1 || p >= d1 {
        return Err(Error::InvalidArgument(format!(
            "block ({q}, {p}) outside a {d1}-dimensional factor"
        )));
    }
    Ok(ComplexMatrix::from_fn(d2, d2, |i, j| {
        a[(q * d2 + i, p * d2 + j)]
    }))
}

/// `|Tr[(I ⊗ V) A (I ⊗ V†) B] − Σ_{p,q} Tr[V A_qp V† B_pq]|` for a concrete `v`.
pub fn verify_bitstring_decomposition(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    dims: (usize, usize),
    v: &ComplexMatrix,
) -> Result<f64> {
    let (d1, d2) = dims;
    same_square(&[a, b])?;
    if !v.is_square() || v.rows() != d2 {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} unitary on a {d2}-dimensional factor",
            v.rows(),
            v.cols()
        )));
    }
    let mut lhs_op = a.clone();
    SubsystemLayout::subsystems(&[d1, d2], &[1])?.conjugate(v, &mut lhs_op)?;
    let lhs = lhs_op.trace_product(b);
    let vd = v.dagger();
    let mut rhs = ZERO;
    for q in 0..d1 {
        for p in 0..d1 {
            let avd = &(v * &operator_block(a, dims, q, p)?) * &vd;
            rhs += avd.trace_product(&operator_block(b, dims, p, q)?);
        }
    }
    Ok((lhs - rhs).norm())
}
