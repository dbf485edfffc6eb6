//! Dense state representations for a handful of qubits.
//!
//! Qubit 0 is the most significant bit of a basis index, so for three qubits
//! `|abc⟩` lives at index `4a + 2b + c`. Every type here is immutable value
//! data; operations return new values.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{EqeError, Result};

pub type C64 = Complex64;

/// Construction-time tolerance for unitarity and hermiticity.
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Outcomes below this probability cannot be post-selected.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

pub(crate) const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn log2_exact(len: usize) -> Option<usize> {
    if len >= 2 && len.is_power_of_two() {
        Some(len.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Bit position (from the least significant end) of qubit `q` among `n`.
#[inline]
fn shift(n: usize, q: usize) -> usize {
    n - 1 - q
}

fn check_targets(n_qubits: usize, targets: &[usize]) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return Err(EqeError::QubitOutOfRange { index: t, n_qubits });
        }
        if targets[..i].contains(&t) {
            return Err(EqeError::DuplicateQubit(t));
        }
    }
    Ok(())
}

/// Scatter the bits of `local` (MSB = first listed qubit) onto `qubits`.
#[inline]
fn scatter_bits(n: usize, qubits: &[usize], local: usize) -> usize {
    let k = qubits.len();
    qubits.iter().enumerate().fold(0, |acc, (j, &q)| {
        acc | (((local >> (k - 1 - j)) & 1) << shift(n, q))
    })
}

/// Gather the bits of `index` at `qubits` into a compact local index.
#[inline]
fn gather_bits(n: usize, qubits: &[usize], index: usize) -> usize {
    qubits
        .iter()
        .fold(0, |acc, &q| (acc << 1) | ((index >> shift(n, q)) & 1))
}

fn complement(n: usize, qubits: &[usize]) -> Vec<usize> {
    (0..n).filter(|q| !qubits.contains(q)).collect()
}

/// Kronecker product in the crate's qubit ordering.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Wraps raw amplitudes. The length must be a power of two; no
    /// normalization is applied.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = log2_exact(amps.len()).ok_or(EqeError::DimensionMismatch {
            expected: amps.len().next_power_of_two().max(2),
            got: amps.len(),
        })?;
        Ok(Self { n_qubits, amps })
    }

    /// Computational basis state `|index⟩` on `n_qubits`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        assert!(n_qubits > 0 && index < (1 << n_qubits));
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = C64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm();
        if norm * norm < PROBABILITY_FLOOR {
            return Err(EqeError::ZeroProbabilityOutcome {
                probability: norm * norm,
            });
        }
        Ok(self.scale(C64::new(1.0 / norm, 0.0)))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(EqeError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn to_density(&self) -> DensityMatrix {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, j| self.amps[i] * self.amps[j].conj());
        DensityMatrix { n_qubits: self.n_qubits, m }
    }

    /// Applies `gate` to `targets`; `targets[0]` receives the gate's most
    /// significant qubit.
    pub fn apply_gate(&self, gate: &UnitaryGate, targets: &[usize]) -> Result<Self> {
        if gate.arity() != targets.len() {
            return Err(EqeError::ArityMismatch {
                arity: gate.arity(),
                targets: targets.len(),
            });
        }
        check_targets(self.n_qubits, targets)?;
        let n = self.n_qubits;
        let k = targets.len();
        let rest = complement(n, targets);
        let mut out = self.amps.clone();
        let mut local = vec![C64::new(0.0, 0.0); 1 << k];
        let offsets: Vec<usize> = (0..1 << k).map(|l| scatter_bits(n, targets, l)).collect();
        for r in 0..1usize << rest.len() {
            let base = scatter_bits(n, &rest, r);
            for (l, off) in offsets.iter().enumerate() {
                local[l] = self.amps[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                out[base | off] = (0..1 << k).map(|col| gate.matrix[(row, col)] * local[col]).sum();
            }
        }
        Ok(Self { n_qubits: n, amps: out })
    }

    /// Partial inner product of `basis_vector` against the qubits in `on`.
    ///
    /// Returns the normalized conditional state of the remaining qubits
    /// (ascending order) and the outcome probability.
    pub fn project(&self, basis_vector: &StateVector, on: &[usize]) -> Result<(StateVector, f64)> {
        check_targets(self.n_qubits, on)?;
        if basis_vector.n_qubits != on.len() {
            return Err(EqeError::DimensionMismatch {
                expected: 1 << on.len(),
                got: basis_vector.dim(),
            });
        }
        if on.len() >= self.n_qubits {
            return Err(EqeError::DimensionMismatch {
                expected: self.n_qubits - 1,
                got: on.len(),
            });
        }
        let n = self.n_qubits;
        let rest = complement(n, on);
        let amps: Vec<C64> = (0..1usize << rest.len())
            .map(|r| {
                let base = scatter_bits(n, &rest, r);
                basis_vector
                    .amps
                    .iter()
                    .enumerate()
                    .map(|(l, v)| v.conj() * self.amps[base | scatter_bits(n, on, l)])
                    .sum()
            })
            .collect();
        let conditional = StateVector {
            n_qubits: rest.len(),
            amps,
        };
        let probability = conditional.norm().powi(2);
        if probability < PROBABILITY_FLOOR {
            return Err(EqeError::ZeroProbabilityOutcome { probability });
        }
        Ok((conditional.normalize()?, probability))
    }

    /// Copy with the global phase chosen so the largest-magnitude amplitude
    /// is real and positive.
    pub fn canonical_phase(&self) -> Self {
        let pivot = self
            .amps
            .iter()
            .copied()
            .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .unwrap_or(C64::new(1.0, 0.0));
        if pivot.norm() == 0.0 {
            return self.clone();
        }
        self.scale(pivot.conj() / pivot.norm())
    }

    /// Max amplitude deviation after aligning global phases.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        let a = self.canonical_phase();
        let b = other.canonical_phase();
        a.amps
            .iter()
            .zip(&b.amps)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

impl Tensor for StateVector {
    fn tensor(&self, other: &Self) -> Self {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
        }
    }
}

/// Hermitian matrix over `2^n` levels. Trace one is not enforced at
/// construction so unnormalized intermediates and noisy estimates can be
/// represented; see [`DensityMatrix::normalize`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    m: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        Self::with_tolerance(m, STRUCTURE_TOL)
    }

    pub fn with_tolerance(m: DMatrix<C64>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(EqeError::InvalidDensityMatrix(format!(
                "{}x{} matrix is not square",
                m.nrows(),
                m.ncols()
            )));
        }
        let n_qubits = log2_exact(m.nrows()).ok_or_else(|| {
            EqeError::InvalidDensityMatrix(format!("dimension {} is not a power of two", m.nrows()))
        })?;
        let dev = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > tol {
            return Err(EqeError::InvalidDensityMatrix(format!(
                "not Hermitian (max deviation {dev:.3e})"
            )));
        }
        // Symmetrize so downstream eigen-solvers see an exactly Hermitian matrix.
        let m = (&m + m.adjoint()).scale(0.5);
        Ok(Self { n_qubits, m })
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        Self::new(DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                c(diag[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Self {
            n_qubits,
            m: DMatrix::identity(d, d).scale(1.0 / d as f64),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn purity(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalize(&self) -> Result<Self> {
        let t = self.trace();
        if t.abs() < PROBABILITY_FLOOR {
            return Err(EqeError::ZeroProbabilityOutcome { probability: t });
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            m: self.m.scale(1.0 / t),
        })
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.m.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Clips negative eigenvalues to zero and renormalizes the trace.
    pub fn clip_to_physical(&self) -> Result<Self> {
        let eig = self.m.clone().symmetric_eigen();
        let clipped = eig.eigenvalues.map(|l| c(l.max(0.0), 0.0));
        let v = &eig.eigenvectors;
        let m = v * DMatrix::from_diagonal(&clipped) * v.adjoint();
        DensityMatrix::new((&m + m.adjoint()).scale(0.5))?.normalize()
    }

    /// `½‖ρ − σ‖₁`
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(EqeError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let diff = &self.m - &other.m;
        Ok(0.5 * diff.symmetric_eigenvalues().iter().map(|l| l.abs()).sum::<f64>())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.m - &other.m).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Reduced state on `keep`, in the listed order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(EqeError::InvalidDensityMatrix("keep list is empty".into()));
        }
        check_targets(self.n_qubits, keep)?;
        let n = self.n_qubits;
        let traced = complement(n, keep);
        let dk = 1usize << keep.len();
        let mut out = DMatrix::from_element(dk, dk, c(0.0, 0.0));
        let trace_offsets: Vec<usize> =
            (0..1usize << traced.len()).map(|t| scatter_bits(n, &traced, t)).collect();
        for i in 0..dk {
            let bi = scatter_bits(n, keep, i);
            for j in 0..dk {
                let bj = scatter_bits(n, keep, j);
                out[(i, j)] = trace_offsets.iter().map(|t| self.m[(bi | t, bj | t)]).sum();
            }
        }
        Ok(Self {
            n_qubits: keep.len(),
            m: out,
        })
    }

    /// `⟨v|ρ|v⟩` over the qubits in `on`, normalized, with its probability.
    pub fn project(&self, basis_vector: &StateVector, on: &[usize]) -> Result<(Self, f64)> {
        check_targets(self.n_qubits, on)?;
        if basis_vector.n_qubits() != on.len() || on.len() >= self.n_qubits {
            return Err(EqeError::DimensionMismatch {
                expected: 1 << on.len(),
                got: basis_vector.dim(),
            });
        }
        let n = self.n_qubits;
        let rest = complement(n, on);
        let dr = 1usize << rest.len();
        let v = basis_vector.amplitudes();
        let on_offsets: Vec<usize> = (0..v.len()).map(|l| scatter_bits(n, on, l)).collect();
        let mut out = DMatrix::from_element(dr, dr, c(0.0, 0.0));
        for i in 0..dr {
            let bi = scatter_bits(n, &rest, i);
            for j in 0..dr {
                let bj = scatter_bits(n, &rest, j);
                let mut acc = c(0.0, 0.0);
                for (a, oa) in on_offsets.iter().enumerate() {
                    for (b, ob) in on_offsets.iter().enumerate() {
                        acc += v[a].conj() * self.m[(bi | oa, bj | ob)] * v[b];
                    }
                }
                out[(i, j)] = acc;
            }
        }
        let probability = out.trace().re;
        if probability < PROBABILITY_FLOOR {
            return Err(EqeError::ZeroProbabilityOutcome { probability });
        }
        let projected = DensityMatrix::with_tolerance(out, 1e-9)?.normalize()?;
        Ok((projected, probability))
    }

    /// `U ρ U†` with `U` acting on `targets`.
    pub fn conjugate(&self, gate: &UnitaryGate, targets: &[usize]) -> Result<Self> {
        if gate.arity() != targets.len() {
            return Err(EqeError::ArityMismatch {
                arity: gate.arity(),
                targets: targets.len(),
            });
        }
        check_targets(self.n_qubits, targets)?;
        let full = embed(self.n_qubits, gate, targets);
        Ok(Self {
            n_qubits: self.n_qubits,
            m: &full * &self.m * full.adjoint(),
        })
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            m: self.m.kronecker(&other.m),
        }
    }
}

/// Dense `2^n × 2^n` matrix of `gate` acting on `targets`, identity elsewhere.
pub fn embed(n_qubits: usize, gate: &UnitaryGate, targets: &[usize]) -> DMatrix<C64> {
    let d = 1usize << n_qubits;
    let rest = complement(n_qubits, targets);
    DMatrix::from_fn(d, d, |row, col| {
        let rest_row = gather_bits(n_qubits, &rest, row);
        let rest_col = gather_bits(n_qubits, &rest, col);
        if rest_row != rest_col {
            return c(0.0, 0.0);
        }
        gate.matrix[(
            gather_bits(n_qubits, targets, row),
            gather_bits(n_qubits, targets, col),
        )]
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryGate {
    label: String,
    arity: usize,
    matrix: DMatrix<C64>,
}

impl UnitaryGate {
    pub fn new(label: impl Into<String>, matrix: DMatrix<C64>) -> Result<Self> {
        let label = label.into();
        let arity = match (matrix.nrows(), matrix.ncols()) {
            (2, 2) => 1,
            (4, 4) => 2,
            (r, _) => {
                return Err(EqeError::DimensionMismatch {
                    expected: if r <= 2 { 2 } else { 4 },
                    got: r,
                })
            }
        };
        let dim = matrix.nrows();
        let deviation = (matrix.adjoint() * &matrix - DMatrix::<C64>::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation > STRUCTURE_TOL {
            return Err(EqeError::NotUnitary { label, deviation });
        }
        Ok(Self {
            label,
            arity,
            matrix,
        })
    }

    /// Row-major construction helper.
    pub fn from_rows(label: impl Into<String>, dim: usize, rows: &[C64]) -> Result<Self> {
        Self::new(label, DMatrix::from_row_slice(dim, dim, rows))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            label: format!("{}†", self.label),
            arity: self.arity,
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self · other` (other applied first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.arity != other.arity {
            return Err(EqeError::ArityMismatch {
                arity: self.arity,
                targets: other.arity,
            });
        }
        Self::new(
            format!("{}·{}", self.label, other.label),
            &self.matrix * &other.matrix,
        )
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        Self::new(
            format!("{}⊗{}", self.label, other.label),
            self.matrix.kronecker(&other.matrix),
        )
    }

    /// Max entrywise deviation after removing a global phase.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        let overlap: C64 = self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            c(1.0, 0.0)
        };
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Bell states on two qubits, ordered `(q0 q1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    pub fn vector(self) -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps = match self {
            BellState::PhiPlus => [h, 0.0, 0.0, h],
            BellState::PhiMinus => [h, 0.0, 0.0, -h],
            BellState::PsiPlus => [0.0, h, h, 0.0],
            BellState::PsiMinus => [0.0, h, -h, 0.0],
        };
        StateVector::new(amps.iter().map(|&a| c(a, 0.0)).collect()).expect("4 amplitudes")
    }

    pub fn name(self) -> &'static str {
        match self {
            BellState::PhiPlus => "Phi+",
            BellState::PhiMinus => "Phi-",
            BellState::PsiPlus => "Psi+",
            BellState::PsiMinus => "Psi-",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn real(v: &[f64]) -> StateVector {
        StateVector::new(v.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    fn x_gate() -> UnitaryGate {
        UnitaryGate::from_rows("X", 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
    }

    fn h_gate() -> UnitaryGate {
        let h = FRAC_1_SQRT_2;
        UnitaryGate::from_rows("H", 2, &[c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)]).unwrap()
    }

    fn cnot() -> UnitaryGate {
        let o = c(0., 0.);
        let l = c(1., 0.);
        UnitaryGate::from_rows(
            "CNOT",
            4,
            &[l, o, o, o, o, l, o, o, o, o, o, l, o, o, l, o],
        )
        .unwrap()
    }

    #[test]
    fn tensor_of_basis_states() {
        let z = StateVector::zero(1);
        assert_eq!(z.tensor(&z), real(&[1., 0., 0., 0.]));
        let plus = real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let one = StateVector::basis(1, 1);
        let p = plus.tensor(&one);
        assert!(p.max_abs_diff(&real(&[0., FRAC_1_SQRT_2, 0., FRAC_1_SQRT_2])) < 1e-15);
    }

    #[test]
    fn tensor_of_density_matrices() {
        let mixed = DensityMatrix::maximally_mixed(1);
        let zero = StateVector::zero(1).to_density();
        let t = mixed.tensor(&zero);
        let expect = DensityMatrix::from_diagonal(&[0.5, 0.0, 0.5, 0.0]).unwrap();
        assert!(t.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn x_on_second_qubit() {
        let s = StateVector::zero(2).apply_gate(&x_gate(), &[1]).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b01));
    }

    #[test]
    fn bell_preparation() {
        let s = StateVector::zero(2)
            .apply_gate(&h_gate(), &[0])
            .unwrap()
            .apply_gate(&cnot(), &[0, 1])
            .unwrap()
            .apply_gate(&x_gate(), &[1])
            .unwrap();
        assert!(s.max_abs_diff(&BellState::PsiPlus.vector()) < 1e-15);
    }

    #[test]
    fn gate_errors() {
        let s = StateVector::zero(3);
        assert!(matches!(
            s.apply_gate(&x_gate(), &[3]),
            Err(EqeError::QubitOutOfRange { index: 3, .. })
        ));
        assert!(matches!(
            s.apply_gate(&x_gate(), &[0, 1]),
            Err(EqeError::ArityMismatch { .. })
        ));
        assert!(matches!(
            s.apply_gate(&cnot(), &[1, 1]),
            Err(EqeError::DuplicateQubit(1))
        ));
    }

    #[test]
    fn non_unitary_rejected() {
        let r = UnitaryGate::from_rows("bad", 2, &[c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)]);
        assert!(matches!(r, Err(EqeError::NotUnitary { .. })));
    }

    #[test]
    fn partial_trace_examples() {
        let bell = BellState::PsiPlus.vector().to_density();
        let rb = bell.partial_trace(&[1]).unwrap();
        assert!(rb.max_abs_diff(&DensityMatrix::maximally_mixed(1)) < 1e-15);

        let s01 = StateVector::basis(2, 0b01).to_density();
        let r = s01.partial_trace(&[1]).unwrap();
        assert!(r.max_abs_diff(&StateVector::basis(1, 1).to_density()) < 1e-15);

        assert!(bell.partial_trace(&[]).is_err());
        assert!(bell.partial_trace(&[2]).is_err());
    }

    #[test]
    fn partial_trace_respects_keep_order() {
        // |01⟩: keeping (1, 0) should give |10⟩.
        let s = StateVector::basis(2, 0b01).to_density();
        let r = s.partial_trace(&[1, 0]).unwrap();
        assert!(r.max_abs_diff(&StateVector::basis(2, 0b10).to_density()) < 1e-15);
    }

    #[test]
    fn projection_examples() {
        let psi = BellState::PsiPlus.vector().tensor(&StateVector::zero(1));
        let (cond, p) = psi.project(&BellState::PsiPlus.vector(), &[0, 1]).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!(cond.distance_up_to_phase(&StateVector::zero(1)) < 1e-15);

        let err = psi.project(&BellState::PhiPlus.vector(), &[0, 1]);
        assert!(matches!(err, Err(EqeError::ZeroProbabilityOutcome { .. })));
    }

    #[test]
    fn density_projection_of_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(3);
        let (r, p) = rho.project(&BellState::PsiPlus.vector(), &[0, 1]).unwrap();
        assert!((p - 0.25).abs() < 1e-15);
        assert!(r.max_abs_diff(&DensityMatrix::maximally_mixed(1)) < 1e-15);
    }

    #[test]
    fn clip_repairs_negative_eigenvalue() {
        let rho = DensityMatrix::from_diagonal(&[1.1, -0.1]).unwrap();
        let fixed = rho.clip_to_physical().unwrap();
        assert!(fixed.max_abs_diff(&StateVector::zero(1).to_density()) < 1e-12);
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let a = StateVector::basis(1, 0).to_density();
        let b = StateVector::basis(1, 1).to_density();
        assert!((a.trace_distance(&b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_phase_ignores_global_phase() {
        let s = real(&[0.6, 0.8]);
        let t = s.scale(C64::from_polar(1.0, 1.234));
        assert!(s.distance_up_to_phase(&t) < 1e-15);
    }
}
