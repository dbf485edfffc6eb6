//! The entangled-eraser circuit on three qubits: `q0 = A` (polarization of
//! the partner photon), `q1 = B` (polarization of the interferometer
//! photon) and `q2 = B′` (its path). The partner's path mode stays in `|0⟩`
//! throughout and is not represented.
//!
//! ```text
//! q0 ─H─●─────────────────────────────── [BBM] ─
//! q1 ───X─X─┤      ├──────────────────── [BBM] ─
//! q2 ───────┤VPPBS ├─Z─Y─P(φ)─BS─────────────────
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{EqeError, Result};
use crate::optics::{self, wrap_angle, VppbsParams};
use crate::qstate::{BellState, StateVector};

pub const QUBIT_A: usize = 0;
pub const QUBIT_B: usize = 1;
pub const QUBIT_PATH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    /// Bell pair, path in `|0⟩`.
    Psi1,
    /// After the VPPBS.
    Psi2,
    /// After the mirrors and the phase shifter.
    Psi3,
    /// After the output beam splitter.
    Psi4,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Psi1, Stage::Psi2, Stage::Psi3, Stage::Psi4];
}

/// Which computational outcome of `(q0, q1)` after the BBM rotation
/// corresponds to each Bell state.
pub fn bbm_bits(bell: BellState) -> usize {
    match bell {
        BellState::PhiPlus => 0b00,
        BellState::PhiMinus => 0b10,
        BellState::PsiPlus => 0b01,
        BellState::PsiMinus => 0b11,
    }
}

pub fn bell_from_bbm_bits(bits: usize) -> BellState {
    match bits & 0b11 {
        0b00 => BellState::PhiPlus,
        0b10 => BellState::PhiMinus,
        0b01 => BellState::PsiPlus,
        _ => BellState::PsiMinus,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    pub vppbs: VppbsParams,
    /// Interferometer phase shifter.
    pub phi: f64,
    pub include_bbm: bool,
    pub stage: Stage,
}

impl CircuitParams {
    pub fn new(vppbs: VppbsParams, phi: f64, stage: Stage) -> Self {
        Self {
            vppbs,
            phi: wrap_angle(phi),
            include_bbm: false,
            stage,
        }
    }

    pub fn with_bbm(mut self) -> Self {
        self.include_bbm = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineState {
    pub stage: Stage,
    pub bbm_applied: bool,
    pub state: StateVector,
}

/// `|Ψ⁺⟩_{AB}|0⟩_{B′}` via H(q0), CNOT(q0→q1), X(q1).
pub fn prepare_psi1() -> PipelineState {
    let state = StateVector::zero(3)
        .apply_gate(&optics::hadamard(), &[QUBIT_A])
        .and_then(|s| s.apply_gate(&optics::cnot(), &[QUBIT_A, QUBIT_B]))
        .and_then(|s| s.apply_gate(&optics::pauli_x(), &[QUBIT_B]))
        .expect("fixed 3-qubit circuit");
    PipelineState {
        stage: Stage::Psi1,
        bbm_applied: false,
        state,
    }
}

fn advance(state: &StateVector, to: Stage, p: &CircuitParams) -> StateVector {
    let out = match to {
        Stage::Psi1 => Ok(state.clone()),
        Stage::Psi2 => state.apply_gate(&optics::vppbs_matrix(&p.vppbs), &[QUBIT_B, QUBIT_PATH]),
        Stage::Psi3 => state
            .apply_gate(&optics::pauli_z(), &[QUBIT_PATH])
            .and_then(|s| s.apply_gate(&optics::pauli_y(), &[QUBIT_PATH]))
            .and_then(|s| s.apply_gate(&optics::phase(p.phi), &[QUBIT_PATH])),
        Stage::Psi4 => state.apply_gate(&optics::beam_splitter(), &[QUBIT_PATH]),
    };
    out.expect("fixed 3-qubit circuit")
}

/// Runs the circuit up to `p.stage`, then the BBM rotation if requested.
pub fn run_to_stage(p: &CircuitParams) -> PipelineState {
    let mut state = prepare_psi1().state;
    for stage in Stage::ALL.iter().skip(1).filter(|s| **s <= p.stage) {
        state = advance(&state, *stage, p);
    }
    let out = PipelineState {
        stage: p.stage,
        bbm_applied: false,
        state,
    };
    if p.include_bbm {
        bbm_transform(&out)
    } else {
        out
    }
}

/// CNOT(q0→q1) then H(q0). Afterwards a computational readout of `(q0, q1)`
/// is a Bell measurement, decoded with [`bell_from_bbm_bits`].
pub fn bbm_transform(state: &PipelineState) -> PipelineState {
    let s = state
        .state
        .apply_gate(&optics::bbm_pair(), &[QUBIT_A, QUBIT_B])
        .expect("fixed 3-qubit circuit");
    PipelineState {
        stage: state.stage,
        bbm_applied: true,
        state: s,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorProbabilities {
    pub detector0: f64,
    pub detector1: f64,
    pub outcome: f64,
}

/// Detector statistics of the path qubit after the output beam splitter,
/// conditioned on a post-selected Bell outcome of `(A, B)`.
pub fn output_probabilities(p: &CircuitParams, outcome: BellState) -> Result<DetectorProbabilities> {
    if p.stage != Stage::Psi4 {
        return Err(EqeError::InvalidStage(format!("{:?}", p.stage)));
    }
    let run = run_to_stage(p);
    let selector = if run.bbm_applied {
        StateVector::basis(2, bbm_bits(outcome))
    } else {
        outcome.vector()
    };
    let (path, prob) = run.state.project(&selector, &[QUBIT_A, QUBIT_B])?;
    let pr = path.probabilities();
    Ok(DetectorProbabilities {
        detector0: pr[0],
        detector1: pr[1],
        outcome: prob,
    })
}
