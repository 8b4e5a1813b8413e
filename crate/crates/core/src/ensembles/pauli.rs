use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, check_targets, ComplexMatrix, C64, I, ONE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis; `ops[k]` acts on local qubit `k`.
///
/// The text label lists qubit 0 first: `"XZ"` is X on qubit 0, Z on qubit 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        PauliString { ops }
    }

    pub fn identity(num_qubits: usize) -> Self {
        PauliString {
            ops: vec![Pauli::I; num_qubits],
        }
    }

    /// String number `index` in base 4, qubit 0 as the lowest digit (I, X, Y, Z).
    pub fn from_index(num_qubits: usize, index: usize) -> Self {
        let ops = (0..num_qubits)
            .map(|q| Pauli::ALL[(index >> (2 * q)) & 3])
            .collect();
        PauliString { ops }
    }

    pub fn index(&self) -> usize {
        self.ops
            .iter()
            .enumerate()
            .map(|(q, p)| (Pauli::ALL.iter().position(|x| x == p).unwrap()) << (2 * q))
            .sum()
    }

    pub fn num_qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&p| p == Pauli::I)
    }

    /// Bit-flip mask, phase mask and constant phase `i^{#Y}` on local qubits.
    fn masks(&self) -> (usize, usize, C64) {
        let mut x = 0;
        let mut z = 0;
        let mut phase = ONE;
        for (q, p) in self.ops.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => x |= 1 << q,
                Pauli::Z => z |= 1 << q,
                Pauli::Y => {
                    x |= 1 << q;
                    z |= 1 << q;
                    phase *= I;
                }
            }
        }
        (x, z, phase)
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let (x, z, phase) = self.masks();
        let d = 1usize << self.ops.len();
        let mut m = ComplexMatrix::zeros(d, d);
        for col in 0..d {
            let sign = if (col & z).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            m[(col ^ x, col)] = phase * sign;
        }
        m
    }

    fn global_masks(&self, num_qubits: usize, targets: &[usize]) -> Result<(usize, usize, C64)> {
        if targets.len() != self.ops.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit Pauli on {} targets",
                self.ops.len(),
                targets.len()
            )));
        }
        check_targets(num_qubits, targets)?;
        let (lx, lz, phase) = self.masks();
        let spread = |m: usize| -> usize {
            targets
                .iter()
                .enumerate()
                .filter(|(k, _)| m >> k & 1 == 1)
                .map(|(_, &t)| 1usize << t)
                .sum()
        };
        Ok((spread(lx), spread(lz), phase))
    }

    /// `P|ψ>` with the string placed on `targets`.
    pub fn apply(&self, amps: &[C64], num_qubits: usize, targets: &[usize]) -> Result<Vec<C64>> {
        let (x, z, phase) = self.global_masks(num_qubits, targets)?;
        let mut out = vec![C64::default(); amps.len()];
        for (i, a) in amps.iter().enumerate() {
            let sign = if (i & z).count_ones() % 2 == 0 {
                phase
            } else {
                -phase
            };
            out[i ^ x] = sign * a;
        }
        Ok(out)
    }

    /// `|ψ> ← e^{−iθP/2}|ψ>` in place.
    pub fn rotate(
        &self,
        amps: &mut [C64],
        num_qubits: usize,
        targets: &[usize],
        angle: f64,
    ) -> Result<()> {
        let (x, z, phase) = self.global_masks(num_qubits, targets)?;
        let c = c64((angle / 2.0).cos(), 0.0);
        let mis = c64(0.0, -(angle / 2.0).sin());
        let ph = |i: usize| {
            if (i & z).count_ones() % 2 == 0 {
                phase
            } else {
                -phase
            }
        };
        if x == 0 {
            for (i, a) in amps.iter_mut().enumerate() {
                *a *= c + mis * ph(i);
            }
            return Ok(());
        }
        for i in 0..amps.len() {
            let j = i ^ x;
            if i < j {
                let (ai, aj) = (amps[i], amps[j]);
                amps[i] = c * ai + mis * ph(j) * aj;
                amps[j] = c * aj + mis * ph(i) * ai;
            }
        }
        Ok(())
    }

    /// `e^{−iθP/2}` as a dense matrix.
    pub fn rotation_matrix(&self, angle: f64) -> ComplexMatrix {
        let p = self.to_matrix();
        let d = p.rows();
        let c = c64((angle / 2.0).cos(), 0.0);
        let s = c64(0.0, -(angle / 2.0).sin());
        &ComplexMatrix::identity(d).scale(c) + &p.scale(s)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.ops {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidArgument(format!(
                    "'{other}' is not a Pauli letter"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        if ops.is_empty() {
            return Err(Error::InvalidArgument("empty Pauli string".into()));
        }
        Ok(PauliString { ops })
    }
}

impl TryFrom<String> for PauliString {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PauliString> for String {
    fn from(p: PauliString) -> String {
        p.to_string()
    }
}
