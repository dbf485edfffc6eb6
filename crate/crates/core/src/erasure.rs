//! Bell-basis measurement on `(A, B)` with post-selection, and the
//! before/after complementarity report it produces for the path qubit.

use serde::Serialize;

use crate::ccr::CcrTriple;
use crate::circuit::{bbm_bits, run_to_stage, CircuitParams, Stage, QUBIT_A, QUBIT_B, QUBIT_PATH};
use crate::error::{EqeError, Result};
use crate::optics::VppbsParams;
use crate::qstate::{BellState, DensityMatrix, StateVector};

/// Tolerated trace deviation of a three-qubit input before it is rejected.
pub const TRACE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErasureRecord {
    pub phi_h: f64,
    pub phi_v: f64,
    pub phi: f64,
    pub stage: Stage,
    pub prob_psi_plus: f64,
    pub prob_psi_minus: f64,
    pub before: CcrTriple,
    pub after_plus: Option<CcrTriple>,
    pub after_minus: Option<CcrTriple>,
    pub delta_c_plus: Option<f64>,
    pub delta_c_minus: Option<f64>,
    #[serde(skip)]
    pub path_plus: Option<StateVector>,
    #[serde(skip)]
    pub path_minus: Option<StateVector>,
    #[serde(skip)]
    pub path_before: DensityMatrix,
}

impl ErasureRecord {
    pub fn after(&self, outcome: BellState) -> Option<CcrTriple> {
        match outcome {
            BellState::PsiPlus => self.after_plus,
            BellState::PsiMinus => self.after_minus,
            _ => None,
        }
    }

    pub fn path_state(&self, outcome: BellState) -> Option<&StateVector> {
        match outcome {
            BellState::PsiPlus => self.path_plus.as_ref(),
            BellState::PsiMinus => self.path_minus.as_ref(),
            _ => None,
        }
    }
}

struct Branch {
    probability: f64,
    path: Option<StateVector>,
}

fn branch(state: &StateVector, outcome: BellState) -> Result<Branch> {
    match state.project(&outcome.vector(), &[QUBIT_A, QUBIT_B]) {
        Ok((path, probability)) => Ok(Branch {
            probability,
            path: Some(path),
        }),
        Err(EqeError::ZeroProbabilityOutcome { probability }) => Ok(Branch {
            probability,
            path: None,
        }),
        Err(e) => Err(e),
    }
}

/// Erasure evaluated inside the interferometer (after the VPPBS).
pub fn erase(params: &VppbsParams) -> ErasureRecord {
    erase_at(params, 0.0, Stage::Psi2)
}

/// Erasure evaluated on the state at `stage`; `phi` only matters from
/// `Psi3` on.
pub fn erase_at(params: &VppbsParams, phi: f64, stage: Stage) -> ErasureRecord {
    let cp = CircuitParams::new(*params, phi, stage);
    let state = run_to_stage(&cp).state;
    let path_before = state
        .to_density()
        .partial_trace(&[QUBIT_PATH])
        .expect("3-qubit state");
    let before = CcrTriple::of(&path_before);

    let plus = branch(&state, BellState::PsiPlus).expect("3-qubit state");
    let minus = branch(&state, BellState::PsiMinus).expect("3-qubit state");
    let after = |b: &Branch| b.path.as_ref().map(|s| CcrTriple::of(&s.to_density()));
    let after_plus = after(&plus);
    let after_minus = after(&minus);

    ErasureRecord {
        phi_h: params.phi_h(),
        phi_v: params.phi_v(),
        phi: cp.phi,
        stage,
        prob_psi_plus: plus.probability,
        prob_psi_minus: minus.probability,
        before,
        after_plus,
        after_minus,
        delta_c_plus: after_plus.map(|t| t.coherence - before.coherence),
        delta_c_minus: after_minus.map(|t| t.coherence - before.coherence),
        path_plus: plus.path,
        path_minus: minus.path,
        path_before,
    }
}

fn check_three_qubit(rho3: &DensityMatrix) -> Result<()> {
    if rho3.n_qubits() != 3 {
        return Err(EqeError::DimensionMismatch {
            expected: 8,
            got: rho3.dim(),
        });
    }
    let t = rho3.trace();
    if (t - 1.0).abs() > TRACE_TOL {
        return Err(EqeError::NonPhysicalInput(format!("trace {t} deviates from 1")));
    }
    Ok(())
}

/// Post-selects a (possibly mixed or estimated) three-qubit state on a Bell
/// outcome of `(A, B)`. Returns the normalized path state and the outcome
/// probability.
pub fn density_matrix_postselect(rho3: &DensityMatrix, outcome: BellState) -> Result<(DensityMatrix, f64)> {
    check_three_qubit(rho3)?;
    rho3.project(&outcome.vector(), &[QUBIT_A, QUBIT_B])
}

/// Same as [`density_matrix_postselect`] for a state already rotated by the
/// BBM gate, where Bell outcomes are computational readouts of `(A, B)`.
pub fn postselect_after_bbm(rho3: &DensityMatrix, outcome: BellState) -> Result<(DensityMatrix, f64)> {
    check_three_qubit(rho3)?;
    rho3.project(&StateVector::basis(2, bbm_bits(outcome)), &[QUBIT_A, QUBIT_B])
}
