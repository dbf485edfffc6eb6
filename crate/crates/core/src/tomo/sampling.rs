//! Finite-shot measurement in Pauli bases with optional readout error.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::pauli::{Pauli, PauliString};
use crate::error::{EqeError, Result};
use crate::optics;
use crate::qstate::{StateVector, UnitaryGate};

/// How many shots to spend per measurement setting, which settings, and
/// the seed that makes the run reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotPlan {
    pub shots_per_basis: u64,
    pub rng_seed: u64,
    pub basis_set: Vec<PauliString>,
}

impl ShotPlan {
    /// Complete tomography set (`3^n` settings).
    pub fn full(n_qubits: usize, shots_per_basis: u64, rng_seed: u64) -> Self {
        Self {
            shots_per_basis,
            rng_seed,
            basis_set: PauliString::measurement_bases(n_qubits),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.rng_seed)
    }
}

/// Per-qubit readout confusion matrices `M[reported][true]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutNoise {
    per_qubit: Vec<[[f64; 2]; 2]>,
}

/// Estimated confusion matrices share the representation of the injected
/// ones.
pub type Calibration = ReadoutNoise;

const STOCHASTIC_TOL: f64 = 1e-12;

impl ReadoutNoise {
    pub fn new(per_qubit: Vec<[[f64; 2]; 2]>) -> Result<Self> {
        for (q, m) in per_qubit.iter().enumerate() {
            #[allow(clippy::needless_range_loop)]
            for col in 0..2 {
                let (a, b) = (m[0][col], m[1][col]);
                if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
                    return Err(EqeError::InvalidNoise(format!(
                        "qubit {q}: entries must lie in [0, 1]"
                    )));
                }
                if (a + b - 1.0).abs() > STOCHASTIC_TOL {
                    return Err(EqeError::InvalidNoise(format!(
                        "qubit {q}: column {col} sums to {}",
                        a + b
                    )));
                }
            }
        }
        Ok(Self { per_qubit })
    }

    /// From flip probabilities: `p01 = P(read 1 | true 0)`,
    /// `p10 = P(read 0 | true 1)`.
    pub fn from_flips(flips: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            flips
                .iter()
                .map(|&(p01, p10)| [[1.0 - p01, p10], [p01, 1.0 - p10]])
                .collect(),
        )
    }

    pub fn uniform(n_qubits: usize, p01: f64, p10: f64) -> Result<Self> {
        Self::from_flips(&vec![(p01, p10); n_qubits])
    }

    pub fn ideal(n_qubits: usize) -> Self {
        Self {
            per_qubit: vec![[[1.0, 0.0], [0.0, 1.0]]; n_qubits],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.per_qubit.len()
    }

    pub fn qubit(&self, q: usize) -> &[[f64; 2]; 2] {
        &self.per_qubit[q]
    }

    /// Tensor product of the confusion matrices of `qubits` (first listed =
    /// most significant), row-major `2^k × 2^k`.
    pub fn joint_matrix(&self, qubits: &[usize]) -> Result<nalgebra::DMatrix<f64>> {
        for &q in qubits {
            if q >= self.per_qubit.len() {
                return Err(EqeError::QubitOutOfRange {
                    index: q,
                    n_qubits: self.per_qubit.len(),
                });
            }
        }
        Ok(qubits.iter().fold(nalgebra::DMatrix::from_element(1, 1, 1.0), |acc, &q| {
            let m = &self.per_qubit[q];
            acc.kronecker(&nalgebra::DMatrix::from_row_slice(
                2,
                2,
                &[m[0][0], m[0][1], m[1][0], m[1][1]],
            ))
        }))
    }

    /// Reported-outcome distribution for a true distribution on `qubits`.
    pub fn push_forward(&self, probs: &[f64], qubits: &[usize]) -> Result<Vec<f64>> {
        let m = self.joint_matrix(qubits)?;
        if m.ncols() != probs.len() {
            return Err(EqeError::DimensionMismatch {
                expected: m.ncols(),
                got: probs.len(),
            });
        }
        Ok((m * nalgebra::DVector::from_column_slice(probs)).iter().copied().collect())
    }
}

fn basis_change(p: Pauli) -> Option<UnitaryGate> {
    match p {
        Pauli::X => Some(optics::hadamard()),
        Pauli::Y => Some(
            optics::hadamard()
                .compose(&optics::phase_s().adjoint())
                .expect("unitary"),
        ),
        Pauli::Z | Pauli::I => None,
    }
}

/// Exact outcome distribution for measuring `qubits` of `state` in `basis`
/// (one Pauli per listed qubit). Outcome index bit order follows `qubits`;
/// bit value 0 is the +1 eigenvalue.
pub fn outcome_distribution(state: &StateVector, qubits: &[usize], basis: &PauliString) -> Result<Vec<f64>> {
    if basis.len() != qubits.len() {
        return Err(EqeError::InvalidBasis(format!(
            "{basis} has {} factors for {} measured qubit(s)",
            basis.len(),
            qubits.len()
        )));
    }
    if !basis.is_measurement_basis() {
        return Err(EqeError::InvalidBasis(basis.to_string()));
    }
    let mut rotated = state.clone();
    for (&q, &p) in qubits.iter().zip(basis.ops()) {
        if let Some(g) = basis_change(p) {
            rotated = rotated.apply_gate(&g, &[q])?;
        }
    }
    let n = state.n_qubits();
    let mut probs = vec![0.0; 1 << qubits.len()];
    for (idx, p) in rotated.probabilities().into_iter().enumerate() {
        let local = qubits
            .iter()
            .fold(0, |acc, &q| (acc << 1) | ((idx >> (n - 1 - q)) & 1));
        probs[local] += p;
    }
    Ok(probs)
}

/// Distribution actually reported by the device: global depolarizing of
/// strength `depolarizing` followed by readout confusion.
pub fn noisy_distribution(
    state: &StateVector,
    qubits: &[usize],
    basis: &PauliString,
    noise: Option<&ReadoutNoise>,
    depolarizing: f64,
) -> Result<Vec<f64>> {
    let mut probs = outcome_distribution(state, qubits, basis)?;
    if depolarizing > 0.0 {
        let uniform = 1.0 / probs.len() as f64;
        for p in probs.iter_mut() {
            *p = (1.0 - depolarizing) * *p + depolarizing * uniform;
        }
    }
    match noise {
        Some(n) => n.push_forward(&probs, qubits),
        None => Ok(probs),
    }
}

/// Multinomial draw via conditional binomials; cost is independent of the
/// shot count.
pub fn multinomial<R: Rng + ?Sized>(shots: u64, probs: &[f64], rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = remaining;
            break;
        }
        let q = if mass > 0.0 { (p.max(0.0) / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(remaining, q).expect("probability in [0, 1]").sample(rng);
        counts[i] = k;
        remaining -= k;
        mass -= p.max(0.0);
    }
    counts
}

/// Samples `shots` readouts of every qubit of `state` in `basis`.
pub fn sample_counts<R: Rng + ?Sized>(
    state: &StateVector,
    basis: &PauliString,
    shots: u64,
    noise: Option<&ReadoutNoise>,
    rng: &mut R,
) -> Result<Vec<u64>> {
    if basis.len() != state.n_qubits() {
        return Err(EqeError::InvalidBasis(format!(
            "{basis} does not cover {} qubits",
            state.n_qubits()
        )));
    }
    let qubits: Vec<usize> = (0..state.n_qubits()).collect();
    sample_counts_on(state, &qubits, basis, shots, noise, 0.0, rng)
}

/// Samples readouts of the listed qubits only.
pub fn sample_counts_on<R: Rng + ?Sized>(
    state: &StateVector,
    qubits: &[usize],
    basis: &PauliString,
    shots: u64,
    noise: Option<&ReadoutNoise>,
    depolarizing: f64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    let probs = noisy_distribution(state, qubits, basis, noise, depolarizing)?;
    Ok(multinomial(shots, &probs, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::c;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn z() -> PauliString {
        "Z".parse().unwrap()
    }

    #[test]
    fn zero_state_in_z() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let counts = sample_counts(&StateVector::zero(1), &z(), 1000, None, &mut rng).unwrap();
        assert_eq!(counts, vec![1000, 0]);
    }

    #[test]
    fn plus_state_is_balanced() {
        let h = FRAC_1_SQRT_2;
        let plus = StateVector::new(vec![c(h, 0.), c(h, 0.)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let shots = 1_000_000;
        let counts = sample_counts(&plus, &z(), shots, None, &mut rng).unwrap();
        let f0 = counts[0] as f64 / shots as f64;
        assert!((f0 - 0.5).abs() < 0.002, "{f0}");
        // In the X basis |+⟩ is deterministic.
        let x = sample_counts(&plus, &"X".parse().unwrap(), 500, None, &mut rng).unwrap();
        assert_eq!(x, vec![500, 0]);
    }

    #[test]
    fn y_eigenstate_is_deterministic() {
        let h = FRAC_1_SQRT_2;
        let plus_i = StateVector::new(vec![c(h, 0.), c(0., h)]).unwrap();
        let d = outcome_distribution(&plus_i, &[0], &"Y".parse().unwrap()).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn readout_error_pushforward() {
        let noise = ReadoutNoise::new(vec![[[0.95, 0.1], [0.05, 0.9]]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let shots = 100_000u64;
        let counts = sample_counts(&StateVector::zero(1), &z(), shots, Some(&noise), &mut rng).unwrap();
        let f1 = counts[1] as f64 / shots as f64;
        let sigma = (0.05 * 0.95 / shots as f64).sqrt();
        assert!((f1 - 0.05).abs() < 3.0 * sigma, "{f1}");
    }

    #[test]
    fn same_seed_same_counts() {
        let s = StateVector::new(vec![c(0.6, 0.), c(0., 0.8)]).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sample_counts(&s, &"X".parse().unwrap(), 4096, None, &mut rng).unwrap()
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9), run(10));
    }

    #[test]
    fn marginal_on_subset() {
        // |010⟩: measuring qubit 1 alone in Z always reads 1.
        let s = StateVector::basis(3, 0b010);
        let d = outcome_distribution(&s, &[1], &z()).unwrap();
        assert_eq!(d, vec![0.0, 1.0]);
        let d2 = outcome_distribution(&s, &[2, 1], &"ZZ".parse().unwrap()).unwrap();
        assert_eq!(d2, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn invalid_noise_rejected() {
        assert!(ReadoutNoise::new(vec![[[0.9, 0.1], [0.2, 0.9]]]).is_err());
        assert!(ReadoutNoise::from_flips(&[(1.5, 0.0)]).is_err());
    }

    #[test]
    fn basis_length_checked() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = sample_counts(&StateVector::zero(2), &z(), 10, None, &mut rng);
        assert!(matches!(r, Err(EqeError::InvalidBasis(_))));
        let r = outcome_distribution(&StateVector::zero(1), &[0], &"I".parse().unwrap());
        assert!(r.is_err());
    }

    #[test]
    fn multinomial_totals() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = multinomial(12345, &[0.1, 0.2, 0.3, 0.4], &mut rng);
        assert_eq!(c.iter().sum::<u64>(), 12345);
    }
}
