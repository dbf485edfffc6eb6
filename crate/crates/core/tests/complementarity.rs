//! Complementarity measures and erasure against amplitude-level oracles.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use common::{c, circle, r_coeff, t_coeff};
use eqe_core::ccr::{
    ccr_closed_forms, closed_form_after, coherence_hs, entanglement_ln, predictability_hs, restored_coherence,
};
use eqe_core::circuit::{run_to_stage, CircuitParams, Stage};
use eqe_core::erasure::density_matrix_postselect;
use eqe_core::qstate::C64;
use eqe_core::{erase, BellState, CcrTriple, DensityMatrix, EqeError, StateVector, VppbsParams};
use nalgebra::DMatrix;

const TOL: f64 = 1e-10;

fn qubit_triple(r00: f64, r11: f64, r01: C64) -> CcrTriple {
    let p = r00 * r00 + r11 * r11 - 0.5;
    let coh = 2.0 * r01.norm_sqr();
    let s = 1.0 - (r00 * r00 + r11 * r11 + 2.0 * r01.norm_sqr());
    CcrTriple::new(p, coh, s)
}

/// Path marginal worked out from the stage-2 amplitudes
/// `−(|01⟩(T_V|0⟩ − iR_V|1⟩) + |10⟩(T_H|0⟩ + iR_H|1⟩))/√2`.
fn oracle_before(h: f64, v: f64) -> CcrTriple {
    let (th, rh, tv, rv) = (t_coeff(h), r_coeff(h), t_coeff(v), r_coeff(v));
    let i = c(0.0, 1.0);
    let r00 = (tv.norm_sqr() + th.norm_sqr()) / 2.0;
    let r11 = (rv.norm_sqr() + rh.norm_sqr()) / 2.0;
    let r01 = (tv * (-i * rv).conj() + th * (i * rh).conj()) / 2.0;
    qubit_triple(r00, r11, r01)
}

/// Unnormalized post-selected path amplitudes `(T_H ± T_V, i(R_H ∓ R_V))`.
fn oracle_branch(h: f64, v: f64, plus: bool) -> (C64, C64) {
    let (th, rh, tv, rv) = (t_coeff(h), r_coeff(h), t_coeff(v), r_coeff(v));
    let i = c(0.0, 1.0);
    if plus {
        (th + tv, i * (rh - rv))
    } else {
        (th - tv, i * (rh + rv))
    }
}

fn oracle_after(h: f64, v: f64, plus: bool) -> Option<(f64, CcrTriple)> {
    let (a, b) = oracle_branch(h, v, plus);
    let n2 = a.norm_sqr() + b.norm_sqr();
    if n2 / 4.0 < 1e-12 {
        return None;
    }
    let (p0, p1) = (a.norm_sqr() / n2, b.norm_sqr() / n2);
    let r01 = a * b.conj() / n2;
    Some((n2 / 4.0, qubit_triple(p0, p1, r01)))
}

fn state_psi2(h: f64, v: f64) -> StateVector {
    run_to_stage(&CircuitParams::new(VppbsParams::new(h, v), 0.0, Stage::Psi2)).state
}

fn dm(rows: &[C64]) -> DensityMatrix {
    let d = (rows.len() as f64).sqrt() as usize;
    DensityMatrix::new(DMatrix::from_row_slice(d, d, rows)).unwrap()
}

#[test]
fn measures_on_simple_states() {
    let z = c(0.0, 0.0);
    let zero = dm(&[c(1.0, 0.0), z, z, z]);
    assert!((predictability_hs(&zero) - 0.5).abs() < 1e-15);
    let mixed = DensityMatrix::maximally_mixed(1);
    assert!(predictability_hs(&mixed).abs() < 1e-15);
    assert!((entanglement_ln(&mixed) - 0.5).abs() < 1e-15);
    let biased = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
    assert!((predictability_hs(&biased) - 0.125).abs() < 1e-15);
    assert!((entanglement_ln(&biased) - 0.375).abs() < 1e-15);
    assert!(coherence_hs(&biased).abs() < 1e-15);
    let plus = dm(&[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)]);
    assert!((coherence_hs(&plus) - 0.5).abs() < 1e-15);
    assert!(entanglement_ln(&plus).abs() < 1e-15);
    let minus_i = StateVector::new(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2)]).unwrap();
    assert!((coherence_hs(&minus_i.to_density()) - 0.5).abs() < 1e-15);
}

#[test]
fn partial_traces_of_simple_states() {
    let bell = BellState::PsiPlus.vector().to_density();
    let ra = bell.partial_trace(&[1]).unwrap();
    assert!(ra.max_abs_diff(&DensityMatrix::maximally_mixed(1)) < 1e-15);
    let s01 = StateVector::basis(2, 0b01).to_density();
    let r = s01.partial_trace(&[1]).unwrap();
    assert!(r.max_abs_diff(&StateVector::basis(1, 1).to_density()) < 1e-15);
}

#[test]
fn path_marginal_by_index_contraction() {
    let psi = state_psi2(FRAC_PI_2, 0.0);
    let a = psi.amplitudes();
    let full = DMatrix::from_fn(8, 8, |i, j| a[i] * a[j].conj());
    let contracted = DMatrix::from_fn(2, 2, |j, k| {
        (0..4).map(|ab| full[(2 * ab + j, 2 * ab + k)]).sum::<C64>()
    });
    let lib = psi.to_density().partial_trace(&[2]).unwrap();
    for j in 0..2 {
        for k in 0..2 {
            assert!((lib.get(j, k) - contracted[(j, k)]).norm() < 1e-15);
        }
    }
    let t = CcrTriple::of(&lib);
    assert!(t.max_abs_diff(&CcrTriple::new(0.125, 0.125, 0.25)) < TOL, "{t:?}");
    assert!(t.max_abs_diff(&oracle_before(FRAC_PI_2, 0.0)) < TOL);
}

#[test]
fn erasure_matches_oracles_on_grid() {
    for h in circle(33) {
        for v in circle(33) {
            let r = erase(&VppbsParams::new(h, v));
            assert!(r.before.max_abs_diff(&oracle_before(h, v)) < TOL, "before at ({h}, {v})");
            let cf = ccr_closed_forms(&VppbsParams::new(h, v));
            assert!(cf.before.max_abs_diff(&r.before) < TOL);
            for (plus, after, prob, closed) in [
                (true, r.after_plus, r.prob_psi_plus, cf.after_plus),
                (false, r.after_minus, r.prob_psi_minus, cf.after_minus),
            ] {
                match (oracle_after(h, v, plus), after, closed) {
                    (Some((p, t)), Some(got), Some(cft)) => {
                        assert!((p - prob).abs() < TOL);
                        assert!(got.max_abs_diff(&t) < TOL, "after at ({h}, {v}), plus={plus}");
                        assert!(cft.max_abs_diff(&t) < TOL);
                        assert!(got.entanglement.abs() < TOL);
                    }
                    (None, None, None) => assert!(prob < 1e-12),
                    other => panic!("branch definedness disagrees at ({h}, {v}): {other:?}"),
                }
            }
            assert!((r.prob_psi_plus + r.prob_psi_minus - 1.0).abs() < TOL);
        }
    }
}

#[test]
fn phi_v_zero_predictability_curve() {
    for h in circle(33) {
        let r = erase(&VppbsParams::new(h, 0.0));
        assert!((r.before.predictability - (h / 2.0).cos().powi(4) / 2.0).abs() < TOL);
    }
}

#[test]
fn unconditional_marginal_is_the_branch_average() {
    for h in circle(17) {
        for v in circle(17) {
            let r = erase(&VppbsParams::new(h, v));
            let mut avg = DMatrix::<C64>::zeros(2, 2);
            for bell in [BellState::PsiPlus, BellState::PsiMinus] {
                if let Some(s) = r.path_state(bell) {
                    let p = if bell == BellState::PsiPlus { r.prob_psi_plus } else { r.prob_psi_minus };
                    avg += s.to_density().matrix() * c(p, 0.0);
                }
            }
            let d = (avg - r.path_before.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(d < TOL, "({h}, {v}): {d:e}");
        }
    }
}

#[test]
fn named_points() {
    // PBS limit: wave behavior restored in both branches
    let r = erase(&VppbsParams::pbs_limit());
    let oplus = StateVector::new(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]).unwrap();
    let ominus = StateVector::new(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2)]).unwrap();
    assert!(r.path_plus.as_ref().unwrap().distance_up_to_phase(&oplus) < TOL);
    assert!(r.path_minus.as_ref().unwrap().distance_up_to_phase(&ominus) < TOL);
    let pbs = VppbsParams::pbs_limit();
    assert!((restored_coherence(&pbs, BellState::PsiPlus).unwrap() - 0.5).abs() < TOL);

    // equal angles π/2: the branches are |0⟩ and |1⟩
    let r = erase(&VppbsParams::new(FRAC_PI_2, FRAC_PI_2));
    assert!(r.path_plus.as_ref().unwrap().distance_up_to_phase(&StateVector::basis(1, 0)) < TOL);
    assert!(r.path_minus.as_ref().unwrap().distance_up_to_phase(&StateVector::basis(1, 1)) < TOL);

    // identity VPPBS: only Ψ+ occurs
    let r = erase(&VppbsParams::new(0.0, 0.0));
    assert!((r.prob_psi_plus - 1.0).abs() < TOL);
    assert!(r.after_minus.is_none() && r.delta_c_minus.is_none());

    // (π, 0): pure entanglement before, pure coherence after Ψ+
    let r = erase(&VppbsParams::new(PI, 0.0));
    assert!(r.before.max_abs_diff(&CcrTriple::new(0.0, 0.0, 0.5)) < TOL);
    assert!(r.after_plus.unwrap().max_abs_diff(&CcrTriple::new(0.0, 0.5, 0.0)) < TOL);

    // (π, π): maximal predictability that erasure leaves alone; Ψ+ cannot occur
    let p = VppbsParams::new(PI, PI);
    let r = erase(&p);
    assert!(r.before.max_abs_diff(&CcrTriple::new(0.5, 0.0, 0.0)) < TOL);
    assert!(r.after_minus.unwrap().max_abs_diff(&r.before) < TOL);
    assert!(r.after_plus.is_none());
    assert!(restored_coherence(&p, BellState::PsiMinus).unwrap().abs() < TOL);
    assert!(matches!(
        closed_form_after(&p, BellState::PsiPlus),
        Err(EqeError::ZeroProbabilityOutcome { .. })
    ));

    // restored coherence at (π/2, 0) from the branch oracle
    let (_, after) = oracle_after(FRAC_PI_2, 0.0, true).unwrap();
    let expect = after.coherence - oracle_before(FRAC_PI_2, 0.0).coherence;
    let got = restored_coherence(&VppbsParams::new(FRAC_PI_2, 0.0), BellState::PsiPlus).unwrap();
    assert!((got - expect).abs() < TOL);
}

#[test]
fn projection_examples() {
    let s = StateVector::new(
        BellState::PsiPlus
            .vector()
            .amplitudes()
            .iter()
            .flat_map(|&a| [a, c(0.0, 0.0)])
            .collect(),
    )
    .unwrap();
    let (path, p) = s.project(&BellState::PsiPlus.vector(), &[0, 1]).unwrap();
    assert!((p - 1.0).abs() < 1e-15);
    assert!(path.distance_up_to_phase(&StateVector::zero(1)) < 1e-15);
    assert!(matches!(
        s.project(&BellState::PhiPlus.vector(), &[0, 1]),
        Err(EqeError::ZeroProbabilityOutcome { .. })
    ));
}

#[test]
fn density_matrix_postselection() {
    for (h, v) in [(FRAC_PI_2, 0.0), (1.1, 4.0), (0.0, PI)] {
        let rho = state_psi2(h, v).to_density();
        let r = erase(&VppbsParams::new(h, v));
        for bell in [BellState::PsiPlus, BellState::PsiMinus] {
            let (path, p) = density_matrix_postselect(&rho, bell).unwrap();
            let pure = r.path_state(bell).unwrap().to_density();
            assert!(path.max_abs_diff(&pure) < TOL);
            let expect = if bell == BellState::PsiPlus { r.prob_psi_plus } else { r.prob_psi_minus };
            assert!((p - expect).abs() < TOL);
        }
    }

    let (path, p) = density_matrix_postselect(&DensityMatrix::maximally_mixed(3), BellState::PhiMinus).unwrap();
    assert!((p - 0.25).abs() < 1e-15);
    assert!(path.max_abs_diff(&DensityMatrix::maximally_mixed(1)) < 1e-15);

    let half = DensityMatrix::from_diagonal(&[0.0625; 8]).unwrap();
    assert!(matches!(
        density_matrix_postselect(&half, BellState::PsiPlus),
        Err(EqeError::NonPhysicalInput(_))
    ));
    assert!(density_matrix_postselect(&DensityMatrix::maximally_mixed(2), BellState::PsiPlus).is_err());
}
