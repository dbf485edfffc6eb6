//! Complete complementarity relation for a subsystem of a pure state:
//! predictability + coherence + entanglement = (d − 1)/d.
//!
//! All three measures are Hilbert–Schmidt based:
//!
//! * `P_hs(ρ) = Σ_j ρ_jj² − 1/d`
//! * `C_hs(ρ) = Σ_{j≠k} |ρ_jk|²` (for a qubit, `2|ρ_01|²`)
//! * `S_ln(ρ) = 1 − Tr ρ²`
//!
//! With this coherence normalization the three terms add up exactly to
//! `1 − 1/d`, since `Tr ρ² = Σ_j ρ_jj² + Σ_{j≠k} |ρ_jk|²`.

use serde::{Deserialize, Serialize};

use crate::circuit::{run_to_stage, CircuitParams, Stage, QUBIT_A, QUBIT_B, QUBIT_PATH};
use crate::error::{EqeError, Result};
use crate::optics::{Coefficients, VppbsParams};
use crate::qstate::{BellState, DensityMatrix, C64, PROBABILITY_FLOOR};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcrTriple {
    pub predictability: f64,
    pub coherence: f64,
    pub entanglement: f64,
}

impl CcrTriple {
    pub fn new(predictability: f64, coherence: f64, entanglement: f64) -> Self {
        Self {
            predictability,
            coherence,
            entanglement,
        }
    }

    pub fn sum(&self) -> f64 {
        self.predictability + self.coherence + self.entanglement
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.predictability - other.predictability)
            .abs()
            .max((self.coherence - other.coherence).abs())
            .max((self.entanglement - other.entanglement).abs())
    }

    pub fn of(rho: &DensityMatrix) -> Self {
        Self::new(predictability_hs(rho), coherence_hs(rho), entanglement_ln(rho))
    }
}

pub fn predictability_hs(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    (0..d).map(|j| rho.get(j, j).re.powi(2)).sum::<f64>() - 1.0 / d as f64
}

pub fn coherence_hs(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    (0..d)
        .flat_map(|j| (0..d).filter(move |&k| k != j).map(move |k| (j, k)))
        .map(|(j, k)| rho.get(j, k).norm_sqr())
        .sum()
}

pub fn entanglement_ln(rho: &DensityMatrix) -> f64 {
    1.0 - rho.purity()
}

/// Branch amplitudes `(T_H ± T_V, i(R_H ∓ R_V))` of the path state for a
/// Bell outcome, unnormalized. Φ± outcomes never occur.
fn branch_amplitudes(k: &Coefficients, outcome: BellState) -> Option<(C64, C64)> {
    let i = C64::new(0.0, 1.0);
    match outcome {
        BellState::PsiPlus => Some((k.t_h + k.t_v, i * (k.r_h - k.r_v))),
        BellState::PsiMinus => Some((k.t_h - k.t_v, i * (k.r_h + k.r_v))),
        _ => None,
    }
}

/// `|N_{Ψ±}|² = |T_H ± T_V|² + |R_H ∓ R_V|²`; the outcome probability is a
/// quarter of this.
pub fn branch_norm_sqr(params: &VppbsParams, outcome: BellState) -> f64 {
    branch_amplitudes(&params.coefficients(), outcome)
        .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
        .unwrap_or(0.0)
}

/// Closed-form triple for the path state inside the interferometer,
/// before any Bell measurement.
pub fn closed_form_before(params: &VppbsParams) -> CcrTriple {
    let Coefficients { t_h, r_h, t_v, r_v } = params.coefficients();
    let t2 = t_h.norm_sqr() + t_v.norm_sqr();
    let r2 = r_h.norm_sqr() + r_v.norm_sqr();
    let cross = (t_h * r_h.conj() - t_v * r_v.conj()).norm_sqr();
    CcrTriple::new(
        0.25 * t2 * t2 + 0.25 * r2 * r2 - 0.5,
        0.5 * cross,
        1.0 - 0.25 * r2 * r2 - 0.25 * t2 * t2 - 0.5 * cross,
    )
}

/// Closed-form triple of the post-selected path state.
pub fn closed_form_after(params: &VppbsParams, outcome: BellState) -> Result<CcrTriple> {
    let (a, b) = branch_amplitudes(&params.coefficients(), outcome)
        .ok_or(EqeError::ZeroProbabilityOutcome { probability: 0.0 })?;
    let (a2, b2) = (a.norm_sqr(), b.norm_sqr());
    let n2 = a2 + b2;
    if n2 / 4.0 < PROBABILITY_FLOOR {
        return Err(EqeError::ZeroProbabilityOutcome { probability: n2 / 4.0 });
    }
    let n4 = n2 * n2;
    Ok(CcrTriple::new(
        (a2 * a2 + b2 * b2) / n4 - 0.5,
        2.0 * a2 * b2 / n4,
        0.0,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForms {
    pub before: CcrTriple,
    /// `None` where the branch has vanishing probability.
    pub after_plus: Option<CcrTriple>,
    pub after_minus: Option<CcrTriple>,
}

pub fn ccr_closed_forms(params: &VppbsParams) -> ClosedForms {
    ClosedForms {
        before: closed_form_before(params),
        after_plus: closed_form_after(params, BellState::PsiPlus).ok(),
        after_minus: closed_form_after(params, BellState::PsiMinus).ok(),
    }
}

/// Coherence gained by the path qubit through Bell measurement and
/// post-selection, `C_after − C_before`, evaluated on the simulated state.
pub fn restored_coherence(params: &VppbsParams, outcome: BellState) -> Result<f64> {
    let psi2 = run_to_stage(&CircuitParams::new(*params, 0.0, Stage::Psi2)).state;
    let before = coherence_hs(&psi2.to_density().partial_trace(&[QUBIT_PATH])?);
    let (path, _) = psi2.project(&outcome.vector(), &[QUBIT_A, QUBIT_B])?;
    let after = coherence_hs(&path.to_density());
    let delta = after - before;
    if delta < -1e-8 {
        log::warn!(
            "negative restored coherence {delta:.3e} at (φ_H, φ_V) = ({}, {})",
            params.phi_h(),
            params.phi_v()
        );
    }
    Ok(delta)
}
