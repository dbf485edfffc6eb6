//! Linear-inversion state tomography, `ρ = 2^{-n} Σ_P ⟨P⟩ P`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use super::mitigation::{mitigate, MitigationMethod};
use super::pauli::{Pauli, PauliString};
use super::sampling::{noisy_distribution, multinomial, Calibration, ReadoutNoise, ShotPlan};
use crate::error::{EqeError, Result};
use crate::qstate::{c, DensityMatrix, StateVector, C64};

/// Eigenvalues below this trigger the physicality repair.
pub const NEGATIVITY_TOL: f64 = 1e-6;

/// Outcome weights (counts, quasi-counts or exact probabilities) observed in
/// one measurement setting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisData {
    pub basis: PauliString,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyResult {
    pub estimate: DensityMatrix,
    pub raw_counts: Vec<(PauliString, Vec<u64>)>,
    pub mitigated: bool,
    pub physicality_adjusted: bool,
}

/// Estimates `⟨P⟩` for every Pauli string, averaging over all settings that
/// measure it.
pub fn pauli_expectations(data: &[BasisData]) -> Result<BTreeMap<PauliString, f64>> {
    let n = data
        .first()
        .map(|d| d.basis.len())
        .ok_or_else(|| EqeError::IncompleteBasisSet {
            missing: "all settings".into(),
        })?;
    for d in data {
        if d.basis.len() != n || d.weights.len() != 1 << n {
            return Err(EqeError::DimensionMismatch {
                expected: 1 << n,
                got: d.weights.len(),
            });
        }
    }
    let mut out = BTreeMap::new();
    for p in PauliString::all(n) {
        if p.ops().iter().all(|&o| o == Pauli::I) {
            out.insert(p, 1.0);
            continue;
        }
        let mask = p.support_mask();
        let estimates: Vec<f64> = data
            .iter()
            .filter(|d| p.is_compatible_with(&d.basis))
            .map(|d| {
                let total: f64 = d.weights.iter().sum();
                d.weights
                    .iter()
                    .enumerate()
                    .map(|(o, w)| {
                        let sign = if (o & mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                        sign * w
                    })
                    .sum::<f64>()
                    / total
            })
            .collect();
        if estimates.is_empty() {
            return Err(EqeError::IncompleteBasisSet {
                missing: p.to_string(),
            });
        }
        out.insert(p, estimates.iter().sum::<f64>() / estimates.len() as f64);
    }
    Ok(out)
}

/// `ρ = 2^{-n} Σ_P ⟨P⟩ P` from a full table of expectations.
pub fn from_expectations(n_qubits: usize, expectation: impl Fn(&PauliString) -> f64) -> Result<DensityMatrix> {
    let d = 1usize << n_qubits;
    let mut m = DMatrix::from_element(d, d, c(0.0, 0.0));
    for p in PauliString::all(n_qubits) {
        let e = expectation(&p);
        if e != 0.0 {
            m += p.matrix() * C64::new(e / d as f64, 0.0);
        }
    }
    DensityMatrix::with_tolerance(m, 1e-9)
}

/// Exact `Tr(ρP)`.
pub fn exact_expectation(rho: &DensityMatrix, p: &PauliString) -> f64 {
    (rho.matrix() * p.matrix()).trace().re
}

/// Linear inversion from measured data, with optional eigenvalue clipping
/// when the estimate has an eigenvalue below `−NEGATIVITY_TOL`.
pub fn tomography(data: &[BasisData], repair: bool) -> Result<(DensityMatrix, bool)> {
    let table = pauli_expectations(data)?;
    let n = data[0].basis.len();
    let rho = from_expectations(n, |p| table[p])?;
    if repair && rho.eigenvalues()[0] < -NEGATIVITY_TOL {
        return Ok((rho.clip_to_physical()?, true));
    }
    Ok((rho, false))
}

/// How outcome weights are produced for each setting.
pub enum Readout<'a> {
    /// Exact (noisy) outcome probabilities, no sampling.
    Exact,
    /// Finite shots drawn from `rng`.
    Shots { shots: u64, rng: &'a mut dyn rand::RngCore },
}

/// Measurement settings, noise and post-processing for one tomography run.
#[derive(Debug, Clone, Copy)]
pub struct TomographySetup<'a> {
    pub qubits: &'a [usize],
    pub bases: &'a [PauliString],
    pub noise: Option<&'a ReadoutNoise>,
    pub depolarizing: f64,
    pub mitigation: Option<(MitigationMethod, &'a Calibration)>,
    pub repair: bool,
}

/// Measures `qubits` of `state` in each setting and reconstructs their
/// joint state.
pub fn run_tomography(state: &StateVector, setup: &TomographySetup<'_>, readout: Readout<'_>) -> Result<TomographyResult> {
    let mut readout = readout;
    let mut data = Vec::with_capacity(setup.bases.len());
    let mut raw_counts = Vec::new();
    for basis in setup.bases {
        let probs = noisy_distribution(state, setup.qubits, basis, setup.noise, setup.depolarizing)?;
        let weights = match &mut readout {
            Readout::Exact => probs,
            Readout::Shots { shots, rng } => {
                let counts = multinomial(*shots, &probs, &mut **rng);
                let w = counts.iter().map(|&k| k as f64).collect();
                raw_counts.push((basis.clone(), counts));
                w
            }
        };
        let weights = match setup.mitigation {
            Some((method, cal)) => mitigate(&weights, cal, setup.qubits, method)?,
            None => weights,
        };
        data.push(BasisData {
            basis: basis.clone(),
            weights,
        });
    }
    let (estimate, physicality_adjusted) = tomography(&data, setup.repair)?;
    Ok(TomographyResult {
        estimate,
        raw_counts,
        mitigated: setup.mitigation.is_some(),
        physicality_adjusted,
    })
}

/// Shot-based tomography of the listed qubits following `plan`.
pub fn run_planned<R: Rng>(
    state: &StateVector,
    qubits: &[usize],
    plan: &ShotPlan,
    noise: Option<&ReadoutNoise>,
    mitigation: Option<(MitigationMethod, &Calibration)>,
    rng: &mut R,
) -> Result<TomographyResult> {
    let setup = TomographySetup {
        qubits,
        bases: &plan.basis_set,
        noise,
        depolarizing: 0.0,
        mitigation,
        repair: true,
    };
    run_tomography(
        state,
        &setup,
        Readout::Shots {
            shots: plan.shots_per_basis,
            rng,
        },
    )
}
