//! The two-step hardware protocol, emulated.
//!
//! 1. Tomography of the path qubit right after the VPPBS gives the
//!    complementarity triple before erasure.
//! 2. The BBM rotation is appended, all three qubits are tomographed, the
//!    estimate is projected on the wanted Bell outcome and the normalized
//!    path block gives the triple after erasure.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mitigation::{calibrate, MitigationMethod};
use super::pauli::PauliString;
use super::reconstruct::{run_tomography, Readout, TomographySetup};
use super::sampling::{Calibration, ReadoutNoise};
use crate::ccr::CcrTriple;
use crate::circuit::{bbm_transform, run_to_stage, CircuitParams, Stage, QUBIT_PATH};
use crate::erasure::postselect_after_bbm;
use crate::error::{EqeError, Result};
use crate::optics::VppbsParams;
use crate::qstate::{BellState, DensityMatrix};

pub const DEFAULT_SHOTS: u64 = 8192;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// `None` reconstructs from exact outcome probabilities.
    pub shots_per_basis: Option<u64>,
    pub seed: u64,
    pub noise: Option<ReadoutNoise>,
    /// Applied only when `noise` is present.
    pub mitigation: Option<MitigationMethod>,
    /// Shots per prepared basis state during calibration.
    pub calibration_shots: u64,
    /// Strength of a global depolarizing channel before readout.
    pub depolarizing: f64,
    /// Clip negative eigenvalues of the three-qubit estimate.
    pub repair: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            shots_per_basis: Some(DEFAULT_SHOTS),
            seed: 0,
            noise: None,
            mitigation: Some(MitigationMethod::ConstrainedLeastSquares),
            calibration_shots: DEFAULT_SHOTS,
            depolarizing: 0.0,
            repair: true,
        }
    }
}

impl ExperimentConfig {
    pub fn exact() -> Self {
        Self {
            shots_per_basis: None,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoStepOutcome {
    pub before: CcrTriple,
    pub after_plus: Option<CcrTriple>,
    pub after_minus: Option<CcrTriple>,
    pub prob_plus: f64,
    pub prob_minus: f64,
    #[serde(skip)]
    pub path_before: DensityMatrix,
    #[serde(skip)]
    pub three_qubit: DensityMatrix,
    pub physicality_adjusted: bool,
}

fn readout(shots: Option<u64>, rng: &mut dyn RngCore) -> Readout<'_> {
    match shots {
        None => Readout::Exact,
        Some(shots) => Readout::Shots { shots, rng },
    }
}

pub fn two_step_experiment(params: &VppbsParams, cfg: &ExperimentConfig) -> Result<TwoStepOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    two_step_experiment_with_rng(params, cfg, &mut rng)
}

/// As [`two_step_experiment`], drawing all randomness from `rng` so sweeps
/// can hand each point its own stream.
pub fn two_step_experiment_with_rng(
    params: &VppbsParams,
    cfg: &ExperimentConfig,
    rng: &mut dyn RngCore,
) -> Result<TwoStepOutcome> {
    if !(0.0..=1.0).contains(&cfg.depolarizing) {
        return Err(EqeError::InvalidConfig {
            field: "depolarizing".into(),
            reason: format!("{} not in [0, 1]", cfg.depolarizing),
        });
    }
    let noise = cfg.noise.as_ref();
    let calibration: Option<(MitigationMethod, Calibration)> = match (noise, cfg.mitigation) {
        (Some(n), Some(method)) => {
            let cal = match cfg.shots_per_basis {
                None => n.clone(),
                Some(_) => calibrate(Some(n), n.n_qubits(), cfg.calibration_shots, rng)?,
            };
            Some((method, cal))
        }
        _ => None,
    };
    let mitigation = calibration.as_ref().map(|(m, c)| (*m, c));

    let psi2 = run_to_stage(&CircuitParams::new(*params, 0.0, Stage::Psi2));

    let path_bases = PauliString::measurement_bases(1);
    let step1 = run_tomography(
        &psi2.state,
        &TomographySetup {
            qubits: &[QUBIT_PATH],
            bases: &path_bases,
            noise,
            depolarizing: cfg.depolarizing,
            mitigation,
            repair: cfg.repair,
        },
        readout(cfg.shots_per_basis, &mut *rng),
    )?;
    let before = CcrTriple::of(&step1.estimate);

    let rotated = bbm_transform(&psi2);
    let all_bases = PauliString::measurement_bases(3);
    let step2 = run_tomography(
        &rotated.state,
        &TomographySetup {
            qubits: &[0, 1, 2],
            bases: &all_bases,
            noise,
            depolarizing: cfg.depolarizing,
            mitigation,
            repair: cfg.repair,
        },
        readout(cfg.shots_per_basis, &mut *rng),
    )?;

    let branch = |outcome| match postselect_after_bbm(&step2.estimate, outcome) {
        Ok((rho, p)) => Ok((Some(CcrTriple::of(&rho)), p)),
        Err(EqeError::ZeroProbabilityOutcome { probability }) => Ok((None, probability)),
        Err(e) => Err(e),
    };
    let (after_plus, prob_plus) = branch(BellState::PsiPlus)?;
    let (after_minus, prob_minus) = branch(BellState::PsiMinus)?;

    Ok(TwoStepOutcome {
        before,
        after_plus,
        after_minus,
        prob_plus,
        prob_minus,
        path_before: step1.estimate,
        three_qubit: step2.estimate,
        physicality_adjusted: step1.physicality_adjusted || step2.physicality_adjusted,
    })
}
