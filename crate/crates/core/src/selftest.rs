//! Fast built-in property suite over a grid of VPPBS settings.

use std::f64::consts::TAU;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::ccr::CcrTriple;
use crate::circuit::{bbm_transform, run_to_stage, CircuitParams, Stage, QUBIT_A, QUBIT_B, QUBIT_PATH};
use crate::error::EqeError;
use crate::optics::{catalog, reflection, transmission, VppbsParams};
use crate::qstate::{BellState, StateVector, C64};

pub const SELFTEST_TOL: f64 = 1e-10;
/// Points per angle axis.
const GRID: usize = 17;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Largest deviation found.
    pub worst: f64,
    pub cases: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub elapsed_ms: f64,
    pub checks: Vec<SelftestCheck>,
}

fn axis() -> impl Iterator<Item = f64> + Clone {
    (0..GRID).map(|k| TAU * k as f64 / (GRID - 1) as f64)
}

fn grid() -> Vec<VppbsParams> {
    axis()
        .flat_map(|h| axis().map(move |v| VppbsParams::new(h, v)))
        .collect()
}

struct Tally {
    name: &'static str,
    worst: f64,
    cases: usize,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            worst: 0.0,
            cases: 0,
        }
    }

    fn record(&mut self, deviation: f64) {
        self.cases += 1;
        // NaN deviations must fail
        self.worst = if deviation.is_nan() { f64::INFINITY } else { self.worst.max(deviation) };
    }

    fn finish(self) -> SelftestCheck {
        SelftestCheck {
            name: self.name,
            passed: self.worst <= SELFTEST_TOL,
            worst: self.worst,
            cases: self.cases,
        }
    }
}

fn bell_probability(state: &StateVector, bell: BellState) -> f64 {
    match state.project(&bell.vector(), &[QUBIT_A, QUBIT_B]) {
        Ok((_, p)) => p,
        Err(EqeError::ZeroProbabilityOutcome { probability }) => probability,
        Err(e) => panic!("three-qubit projection failed: {e}"),
    }
}

pub fn run_selftest() -> SelftestReport {
    let start = Instant::now();
    let params = grid();

    let mut unitarity = Tally::new("catalog_unitarity");
    for p in &params {
        for gate in catalog(p, p.phi_h()) {
            let m = gate.matrix();
            let id = DMatrix::<C64>::identity(m.nrows(), m.ncols());
            unitarity.record((m.adjoint() * m - id).camax());
        }
    }

    let mut coefficients = Tally::new("transmission_reflection_norm");
    for k in 0..=256 {
        let phi = TAU * k as f64 / 256.0;
        coefficients.record((transmission(phi).norm_sqr() + reflection(phi).norm_sqr() - 1.0).abs());
    }

    let mut bell_sum = Tally::new("bell_probabilities_sum_to_one");
    let mut phi_empty = Tally::new("phi_sector_empty");
    let mut pure_after = Tally::new("post_selected_path_pure");
    let mut ccr = Tally::new("ccr_identity");
    let mut bbm_sector = Tally::new("bbm_phi_outcomes_empty");
    for p in &params {
        for stage in Stage::ALL {
            let state = run_to_stage(&CircuitParams::new(*p, p.phi_v(), stage)).state;
            let probs: Vec<f64> = BellState::ALL.iter().map(|&b| bell_probability(&state, b)).collect();
            bell_sum.record((probs.iter().sum::<f64>() - 1.0).abs());
            phi_empty.record(probs[0] + probs[1]);
            let path = state.to_density().partial_trace(&[QUBIT_PATH]).expect("3 qubits");
            ccr.record((CcrTriple::of(&path).sum() - 0.5).abs());
            for bell in [BellState::PsiPlus, BellState::PsiMinus] {
                if let Ok((post, _)) = state.project(&bell.vector(), &[QUBIT_A, QUBIT_B]) {
                    pure_after.record(CcrTriple::of(&post.to_density()).entanglement.abs());
                }
            }
        }
        let rotated = bbm_transform(&run_to_stage(&CircuitParams::new(*p, 0.0, Stage::Psi2)));
        let probs = rotated.state.probabilities();
        // outcomes 00 and 10 on (q0, q1) are the two Φ readouts
        let phi_mass: f64 = probs
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> 1) & 1 == 0)
            .map(|(_, x)| x)
            .sum();
        bbm_sector.record(phi_mass);
    }

    let checks: Vec<SelftestCheck> = [unitarity, coefficients, bell_sum, phi_empty, bbm_sector, pure_after, ccr]
        .into_iter()
        .map(Tally::finish)
        .collect();
    SelftestReport {
        passed: checks.iter().all(|c| c.passed),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        checks,
    }
}
