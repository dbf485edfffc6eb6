//! Readout-error calibration and mitigation under a tensor-product
//! confusion model.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{multinomial, Calibration, ReadoutNoise};
use crate::error::{EqeError, Result};

/// Calibrations with a larger condition number are rejected.
pub const MAX_CONDITION: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MitigationMethod {
    /// `min ‖M p − f‖₂` over the probability simplex.
    #[default]
    ConstrainedLeastSquares,
    /// `p = M⁻¹ f`; may produce negative quasi-probabilities.
    Inversion,
}

/// Prepares every computational basis state of `n_qubits`, reads each one
/// out `shots` times through `noise`, and estimates the per-qubit confusion
/// matrices from the marginals.
pub fn calibrate<R: Rng + ?Sized>(
    noise: Option<&ReadoutNoise>,
    n_qubits: usize,
    shots: u64,
    rng: &mut R,
) -> Result<Calibration> {
    let qubits: Vec<usize> = (0..n_qubits).collect();
    let dim = 1usize << n_qubits;
    // tallies[q][reported][true]
    let mut tallies = vec![[[0u64; 2]; 2]; n_qubits];
    for prepared in 0..dim {
        let mut truth = vec![0.0; dim];
        truth[prepared] = 1.0;
        let reported = match noise {
            Some(n) => n.push_forward(&truth, &qubits)?,
            None => truth,
        };
        let counts = multinomial(shots, &reported, rng);
        for (outcome, &k) in counts.iter().enumerate() {
            for (q, tally) in tallies.iter_mut().enumerate() {
                let bit = |x: usize| (x >> (n_qubits - 1 - q)) & 1;
                tally[bit(outcome)][bit(prepared)] += k;
            }
        }
    }
    let per_qubit = tallies
        .iter()
        .map(|t| {
            let mut m = [[0.0; 2]; 2];
            for col in 0..2 {
                let total = (t[0][col] + t[1][col]) as f64;
                m[0][col] = t[0][col] as f64 / total;
                m[1][col] = 1.0 - m[0][col];
            }
            m
        })
        .collect();
    ReadoutNoise::new(per_qubit)
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Euclidean projection onto `{p : p ≥ 0, Σ p = 1}`.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Accelerated projected gradient on the simplex.
fn simplex_least_squares(m: &DMatrix<f64>, f: &DVector<f64>, start: Vec<f64>) -> Vec<f64> {
    let mtm = m.transpose() * m;
    let mtf = m.transpose() * f;
    let lipschitz = mtm.symmetric_eigenvalues().iter().copied().fold(0.0, f64::max);
    let step = 1.0 / lipschitz;
    let mut x = DVector::from_vec(start);
    let mut y = x.clone();
    let mut t = 1.0f64;
    for _ in 0..50_000 {
        let grad = &mtm * &y - &mtf;
        let next: Vec<f64> = (&y - grad * step).iter().copied().collect();
        let x_next = DVector::from_vec(project_to_simplex(&next));
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let delta = (&x_next - &x).amax();
        y = &x_next + (&x_next - &x) * ((t - 1.0) / t_next);
        x = x_next;
        t = t_next;
        if delta < 1e-14 {
            break;
        }
    }
    x.iter().copied().collect()
}

/// Corrects a histogram of readouts of `qubits` (first listed = most
/// significant outcome bit). Returns quasi-counts with the same total.
pub fn mitigate(
    counts: &[f64],
    calibration: &Calibration,
    qubits: &[usize],
    method: MitigationMethod,
) -> Result<Vec<f64>> {
    let m = calibration.joint_matrix(qubits)?;
    if m.ncols() != counts.len() {
        return Err(EqeError::DimensionMismatch {
            expected: m.ncols(),
            got: counts.len(),
        });
    }
    let condition = condition_number(&m);
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(EqeError::SingularCalibration { condition });
    }
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return Ok(counts.to_vec());
    }
    let f = DVector::from_iterator(counts.len(), counts.iter().map(|c| c / total));
    let direct = m
        .clone()
        .lu()
        .solve(&f)
        .ok_or(EqeError::SingularCalibration { condition })?;
    let p: Vec<f64> = match method {
        MitigationMethod::Inversion => direct.iter().copied().collect(),
        MitigationMethod::ConstrainedLeastSquares => {
            if direct.iter().all(|&x| x >= 0.0) {
                direct.iter().copied().collect()
            } else {
                let start = project_to_simplex(direct.as_slice());
                simplex_least_squares(&m, &f, start)
            }
        }
    };
    Ok(p.into_iter().map(|x| x * total).collect())
}

/// Total-variation distance between two (quasi-)distributions after
/// normalizing each to unit mass.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    0.5 * a.iter().zip(b).map(|(x, y)| (x / sa - y / sb).abs()).sum::<f64>()
}
