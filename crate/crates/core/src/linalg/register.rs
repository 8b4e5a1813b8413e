//! Index tables for operators acting on part of a tensor-product space.
//!
//! A [`SubsystemLayout`] splits every basis index of the full space into a
//! local offset (the factors an operator touches) plus a base (everything
//! else). All kernels below are gather/compute/scatter loops over those two
//! tables, so the same code serves qubit registers and mixed-dimension
//! subsystems.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SubsystemLayout {
    local: Vec<usize>,
    bases: Vec<usize>,
    total: usize,
}

impl SubsystemLayout {
    /// Layout for qubits `targets` of an `num_qubits` register; local bit `k`
    /// of the operator acts on qubit `targets[k]`.
    pub fn qubits(num_qubits: usize, targets: &[usize]) -> Result<Self> {
        check_targets(num_qubits, targets)?;
        let local = (0..1usize << targets.len())
            .map(|a| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| a >> k & 1 == 1)
                    .map(|(_, &t)| 1usize << t)
                    .sum()
            })
            .collect();
        let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
        let total = 1usize << num_qubits;
        let bases = (0..total).filter(|i| i & mask == 0).collect();
        Ok(SubsystemLayout {
            local,
            bases,
            total,
        })
    }

    /// Layout for factors `positions` of a Kronecker product with factor
    /// dimensions `dims` (position 0 is the leftmost, most significant
    /// factor). The operator's own factor order follows `positions`.
    pub fn subsystems(dims: &[usize], positions: &[usize]) -> Result<Self> {
        let n = dims.len();
        let mut seen = vec![false; n];
        for &p in positions {
            if p >= n {
                return Err(Error::DimensionMismatch(format!(
                    "subsystem {p} of a {n}-factor space"
                )));
            }
            if seen[p] {
                return Err(Error::DuplicateTarget(p));
            }
            seen[p] = true;
        }
        let mut stride = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * dims[i + 1];
        }
        let total: usize = dims.iter().product();
        let local = mixed_radix_offsets(positions, dims, &stride);
        let rest: Vec<usize> = (0..n).filter(|p| !seen[*p]).collect();
        let bases = mixed_radix_offsets(&rest, dims, &stride);
        Ok(SubsystemLayout {
            local,
            bases,
            total,
        })
    }

    pub fn local_dim(&self) -> usize {
        self.local.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    fn check_op(&self, u: &ComplexMatrix) -> Result<()> {
        let d = self.local.len();
        if u.rows() != d || u.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on a {d}-dimensional subsystem",
                u.rows(),
                u.cols()
            )));
        }
        Ok(())
    }

    /// `v ← (U ⊗ I) v`
    pub fn apply_vec(&self, u: &ComplexMatrix, v: &mut [C64]) -> Result<()> {
        self.check_op(u)?;
        if v.len() != self.total {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} on a {}-dimensional space",
                v.len(),
                self.total
            )));
        }
        let d = self.local.len();
        let mut buf = vec![ZERO; d];
        for &b in &self.bases {
            for (x, &o) in buf.iter_mut().zip(&self.local) {
                *x = v[b + o];
            }
            for r in 0..d {
                let row = u.row(r);
                let mut acc = ZERO;
                for (a, x) in row.iter().zip(&buf) {
                    acc += a * x;
                }
                v[b + self.local[r]] = acc;
            }
        }
        Ok(())
    }

    /// `M ← (U ⊗ I) M`
    pub fn left_mul(&self, u: &ComplexMatrix, m: &mut ComplexMatrix) -> Result<()> {
        self.check_op(u)?;
        self.check_square(m)?;
        let d = self.local.len();
        let n = m.cols();
        let mut buf = vec![ZERO; d * n];
        for &b in &self.bases {
            for (a, &o) in self.local.iter().enumerate() {
                buf[a * n..(a + 1) * n].copy_from_slice(m.row(b + o));
            }
            for r in 0..d {
                let out = m.row_mut(b + self.local[r]);
                out.fill(ZERO);
                for a in 0..d {
                    let coef = u[(r, a)];
                    if coef == ZERO {
                        continue;
                    }
                    for (o, x) in out.iter_mut().zip(&buf[a * n..(a + 1) * n]) {
                        *o += coef * x;
                    }
                }
            }
        }
        Ok(())
    }

    /// `M ← M (U ⊗ I)`
    pub fn right_mul(&self, u: &ComplexMatrix, m: &mut ComplexMatrix) -> Result<()> {
        self.check_op(u)?;
        self.check_square(m)?;
        let d = self.local.len();
        let mut buf = vec![ZERO; d];
        for r in 0..m.rows() {
            let row = m.row_mut(r);
            for &b in &self.bases {
                for (x, &o) in buf.iter_mut().zip(&self.local) {
                    *x = row[b + o];
                }
                for c in 0..d {
                    let mut acc = ZERO;
                    for (a, x) in buf.iter().enumerate() {
                        acc += x * u[(a, c)];
                    }
                    row[b + self.local[c]] = acc;
                }
            }
        }
        Ok(())
    }

    /// `M ← (U ⊗ I) M (U ⊗ I)†`
    pub fn conjugate(&self, u: &ComplexMatrix, m: &mut ComplexMatrix) -> Result<()> {
        self.left_mul(u, m)?;
        self.right_mul(&u.dagger(), m)
    }

    /// Trace over everything outside the layout's local factors.
    pub fn reduce(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_square(m)?;
        let d = self.local.len();
        let mut out = ComplexMatrix::zeros(d, d);
        for a in 0..d {
            for c in 0..d {
                let mut acc = ZERO;
                for &b in &self.bases {
                    acc += m[(b + self.local[a], b + self.local[c])];
                }
                out[(a, c)] = acc;
            }
        }
        Ok(out)
    }

    /// Reduced density matrix of the pure state `v` on the local factors.
    pub fn reduce_pure(&self, v: &[C64]) -> Result<ComplexMatrix> {
        if v.len() != self.total {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} on a {}-dimensional space",
                v.len(),
                self.total
            )));
        }
        let d = self.local.len();
        let mut out = ComplexMatrix::zeros(d, d);
        let mut buf = vec![ZERO; d];
        for &b in &self.bases {
            for (x, &o) in buf.iter_mut().zip(&self.local) {
                *x = v[b + o];
            }
            for a in 0..d {
                let xa = buf[a];
                if xa == ZERO {
                    continue;
                }
                let row = out.row_mut(a);
                for (o, xc) in row.iter_mut().zip(&buf) {
                    *o += xa * xc.conj();
                }
            }
        }
        Ok(out)
    }

    /// `<u| (O ⊗ I) |v>`
    pub fn matrix_element(&self, u: &[C64], op: &ComplexMatrix, v: &[C64]) -> Result<C64> {
        self.check_op(op)?;
        if u.len() != self.total || v.len() != self.total {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        let d = self.local.len();
        let mut bu = vec![ZERO; d];
        let mut bv = vec![ZERO; d];
        let mut acc = ZERO;
        for &b in &self.bases {
            for k in 0..d {
                bu[k] = u[b + self.local[k]];
                bv[k] = v[b + self.local[k]];
            }
            for r in 0..d {
                if bu[r] == ZERO {
                    continue;
                }
                let mut s = ZERO;
                for (a, x) in op.row(r).iter().zip(&bv) {
                    s += a * x;
                }
                acc += bu[r].conj() * s;
            }
        }
        Ok(acc)
    }

    /// `O ⊗ I` as a dense matrix on the full space.
    pub fn embed(&self, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_op(op)?;
        let mut out = ComplexMatrix::zeros(self.total, self.total);
        for &b in &self.bases {
            for (a, &oa) in self.local.iter().enumerate() {
                for (c, &oc) in self.local.iter().enumerate() {
                    out[(b + oa, b + oc)] = op[(a, c)];
                }
            }
        }
        Ok(out)
    }

    fn check_square(&self, m: &ComplexMatrix) -> Result<()> {
        if m.rows() != self.total || m.cols() != self.total {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on a {}-dimensional space",
                m.rows(),
                m.cols(),
                self.total
            )));
        }
        Ok(())
    }
}

fn mixed_radix_offsets(positions: &[usize], dims: &[usize], stride: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for &p in positions {
        let mut next = Vec::with_capacity(offsets.len() * dims[p]);
        for &o in &offsets {
            for digit in 0..dims[p] {
                next.push(o + digit * stride[p]);
            }
        }
        offsets = next;
    }
    offsets
}

pub fn check_targets(num_qubits: usize, targets: &[usize]) -> Result<()> {
    let mut mask = 0usize;
    for &t in targets {
        if t >= num_qubits {
            return Err(Error::QubitOutOfRange {
                index: t,
                num_qubits,
            });
        }
        if mask >> t & 1 == 1 {
            return Err(Error::DuplicateTarget(t));
        }
        mask |= 1 << t;
    }
    Ok(())
}

/// Applies `u` to qubits `targets` of a state vector.
pub fn apply_to_vector(
    amps: &mut [C64],
    num_qubits: usize,
    u: &ComplexMatrix,
    targets: &[usize],
) -> Result<()> {
    SubsystemLayout::qubits(num_qubits, targets)?.apply_vec(u, amps)
}

/// `ρ ← U ρ U†` with `u` on qubits `targets`.
pub fn apply_to_density(
    rho: &mut ComplexMatrix,
    num_qubits: usize,
    u: &ComplexMatrix,
    targets: &[usize],
) -> Result<()> {
    SubsystemLayout::qubits(num_qubits, targets)?.conjugate(u, rho)
}

/// Exchanges two qubits of a state vector.
pub fn swap_qubits(amps: &mut [C64], a: usize, b: usize) {
    if a == b {
        return;
    }
    let (ma, mb) = (1usize << a, 1usize << b);
    for i in 0..amps.len() {
        if i & ma != 0 && i & mb == 0 {
            amps.swap(i, i ^ ma ^ mb);
        }
    }
}

/// Keeps qubits `keep` of a register; kept qubits are renumbered in ascending order.
pub fn partial_trace_qubits(
    m: &ComplexMatrix,
    num_qubits: usize,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    SubsystemLayout::qubits(num_qubits, &sorted)?.reduce(m)
}

/// Keeps the factors `keep` of a Kronecker-ordered space with dimensions `dims`.
pub fn partial_trace_dims(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    SubsystemLayout::subsystems(dims, &sorted)?.reduce(m)
}

/// Embeds `op` acting on factors `positions` (in that order) into the full space.
pub fn embed_operator(
    op: &ComplexMatrix,
    dims: &[usize],
    positions: &[usize],
) -> Result<ComplexMatrix> {
    SubsystemLayout::subsystems(dims, positions)?.embed(op)
}
