use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{EqeError, Result};
use crate::qstate::{c, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const MEASURABLE: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> DMatrix<C64> {
        let (o, l, i) = (c(0., 0.), c(1., 0.), c(0., 1.));
        let rows = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        DMatrix::from_row_slice(2, 2, &rows)
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis, first entry on the first qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        Self(ops)
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True if every factor is X, Y or Z, i.e. it names a measurement
    /// setting.
    pub fn is_measurement_basis(&self) -> bool {
        !self.0.is_empty() && self.0.iter().all(|p| *p != Pauli::I)
    }

    /// A measurement in `basis` also yields the expectation of `self` if
    /// they agree wherever `self` is not the identity.
    pub fn is_compatible_with(&self, basis: &PauliString) -> bool {
        self.len() == basis.len()
            && self
                .0
                .iter()
                .zip(&basis.0)
                .all(|(p, b)| *p == Pauli::I || p == b)
    }

    /// Bitmask (MSB = first qubit) of the non-identity positions.
    pub fn support_mask(&self) -> usize {
        let n = self.len();
        self.0
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .fold(0, |acc, (q, _)| acc | (1 << (n - 1 - q)))
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        self.0
            .iter()
            .fold(DMatrix::from_element(1, 1, c(1., 0.)), |acc, p| acc.kronecker(&p.matrix()))
    }

    /// All `4^n` Pauli strings in lexicographic order `I < X < Y < Z`.
    pub fn all(n: usize) -> Vec<PauliString> {
        product(n, &Pauli::ALL)
    }

    /// The `3^n` measurement settings over {X, Y, Z}.
    pub fn measurement_bases(n: usize) -> Vec<PauliString> {
        product(n, &Pauli::MEASURABLE)
    }
}

fn product(n: usize, alphabet: &[Pauli]) -> Vec<PauliString> {
    (0..n).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|prefix| {
                alphabet.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.push(*p);
                    v
                })
            })
            .collect()
    })
    .into_iter()
    .map(PauliString)
    .collect()
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = EqeError;
    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(EqeError::InvalidBasis(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        if ops.is_empty() {
            return Err(EqeError::InvalidBasis(s.to_string()));
        }
        Ok(PauliString(ops))
    }
}

impl TryFrom<String> for PauliString {
    type Error = EqeError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PauliString> for String {
    fn from(p: PauliString) -> String {
        p.to_string()
    }
}
