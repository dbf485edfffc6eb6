//! Optical elements as unitary gates.
//!
//! The variable partially-polarizing beam splitter (VPPBS) acts on the
//! polarization `B` and the path `B′` of the interferometer photon. Its
//! transmission and reflection amplitudes for polarization `j ∈ {H, V}` are
//!
//! ```text
//! T_j = e^{iφ_j/2} cos(φ_j/2)      R_j = i e^{iφ_j/2} sin(φ_j/2)
//! ```
//!
//! The two-qubit gate is available both in closed form
//! ([`vppbs_matrix`]) and assembled from beam splitters, a mirror and two
//! controlled phases ([`vppbs_decomposed`]).

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::qstate::{c, UnitaryGate, C64};

const O: C64 = c(0.0, 0.0);
const L: C64 = c(1.0, 0.0);
const I: C64 = c(0.0, 1.0);

/// Brings an angle into `[0, 2π]`. Values already inside (including the
/// closed endpoint `2π`) are returned untouched.
pub fn wrap_angle(phi: f64) -> f64 {
    if (0.0..=TAU).contains(&phi) {
        phi
    } else {
        let wrapped = phi.rem_euclid(TAU);
        log::warn!("angle {phi} outside [0, 2π], wrapped to {wrapped}");
        wrapped
    }
}

/// Transmission amplitude for one polarization.
pub fn transmission(phi: f64) -> C64 {
    C64::from_polar(1.0, phi / 2.0) * (phi / 2.0).cos()
}

/// Reflection amplitude for one polarization.
pub fn reflection(phi: f64) -> C64 {
    I * C64::from_polar(1.0, phi / 2.0) * (phi / 2.0).sin()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub t_h: C64,
    pub r_h: C64,
    pub t_v: C64,
    pub r_v: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct VppbsParams {
    phi_h: f64,
    phi_v: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    phi_h: f64,
    phi_v: f64,
}

impl TryFrom<RawParams> for VppbsParams {
    type Error = String;
    fn try_from(r: RawParams) -> Result<Self, String> {
        if !r.phi_h.is_finite() || !r.phi_v.is_finite() {
            return Err("VPPBS angles must be finite".into());
        }
        Ok(VppbsParams::new(r.phi_h, r.phi_v))
    }
}

impl From<VppbsParams> for RawParams {
    fn from(p: VppbsParams) -> Self {
        RawParams {
            phi_h: p.phi_h,
            phi_v: p.phi_v,
        }
    }
}

impl VppbsParams {
    /// Angles outside `[0, 2π]` are wrapped with a warning.
    pub fn new(phi_h: f64, phi_v: f64) -> Self {
        Self {
            phi_h: wrap_angle(phi_h),
            phi_v: wrap_angle(phi_v),
        }
    }

    /// `(φ_H, φ_V) = (0, π)`: horizontal fully transmitted, vertical fully
    /// reflected, i.e. an ordinary polarizing beam splitter.
    pub fn pbs_limit() -> Self {
        Self::new(0.0, std::f64::consts::PI)
    }

    pub fn phi_h(&self) -> f64 {
        self.phi_h
    }

    pub fn phi_v(&self) -> f64 {
        self.phi_v
    }

    pub fn coefficients(&self) -> Coefficients {
        Coefficients {
            t_h: transmission(self.phi_h),
            r_h: reflection(self.phi_h),
            t_v: transmission(self.phi_v),
            r_v: reflection(self.phi_v),
        }
    }
}

pub fn hadamard() -> UnitaryGate {
    let h = c(FRAC_1_SQRT_2, 0.0);
    UnitaryGate::from_rows("H", 2, &[h, h, h, -h]).expect("unitary")
}

pub fn pauli_x() -> UnitaryGate {
    UnitaryGate::from_rows("X", 2, &[O, L, L, O]).expect("unitary")
}

pub fn pauli_y() -> UnitaryGate {
    UnitaryGate::from_rows("Y", 2, &[O, -I, I, O]).expect("unitary")
}

pub fn pauli_z() -> UnitaryGate {
    UnitaryGate::from_rows("Z", 2, &[L, O, O, -L]).expect("unitary")
}

pub fn phase_s() -> UnitaryGate {
    UnitaryGate::from_rows("S", 2, &[L, O, O, I]).expect("unitary")
}

/// `P(φ) = |0⟩⟨0| + e^{iφ}|1⟩⟨1|`, also the interferometer phase shifter.
pub fn phase(phi: f64) -> UnitaryGate {
    UnitaryGate::from_rows("P", 2, &[L, O, O, C64::from_polar(1.0, phi)]).expect("unitary")
}

/// Half-wave plate in the H/V basis: flips the polarization.
pub fn half_wave_plate() -> UnitaryGate {
    UnitaryGate::from_rows("HWP", 2, &[O, L, L, O]).expect("unitary")
}

/// Symmetric 50:50 beam splitter, `S·H·S = (1/√2)[[1, i], [i, 1]]`.
pub fn beam_splitter() -> UnitaryGate {
    let s = phase_s();
    let bs = s.compose(&hadamard()).and_then(|g| g.compose(&s)).expect("unitary");
    UnitaryGate::new("BS", bs.matrix().clone()).expect("unitary")
}

/// Both interferometer mirrors, `Y·Z = [[0, i], [i, 0]]`.
pub fn mirror() -> UnitaryGate {
    let yz = pauli_y().compose(&pauli_z()).expect("unitary");
    UnitaryGate::new("M", yz.matrix().clone()).expect("unitary")
}

/// CNOT with control on the first (more significant) qubit.
pub fn cnot() -> UnitaryGate {
    UnitaryGate::from_rows("CNOT", 4, &[L, O, O, O, O, L, O, O, O, O, O, L, O, O, L, O])
        .expect("unitary")
}

/// Controlled phase `|0⟩⟨0|⊗I + |1⟩⟨1|⊗P(φ)`. Symmetric in its two qubits.
pub fn controlled_phase(phi: f64) -> UnitaryGate {
    let e = C64::from_polar(1.0, phi);
    UnitaryGate::from_rows("CP", 4, &[L, O, O, O, O, L, O, O, O, O, L, O, O, O, O, e])
        .expect("unitary")
}

/// Polarization-selective phase shifters on `(B, B′)`.
///
/// `PS_V = CP(φ_V)` picks up its phase on `|11⟩`; `PS_H` is the same gate
/// conjugated by `X⊗X`, so its phase lands on `|00⟩`.
pub fn controlled_phase_pair(params: &VppbsParams) -> (UnitaryGate, UnitaryGate) {
    let ps_v = controlled_phase(params.phi_v());
    let xx = pauli_x().kron(&pauli_x()).expect("unitary");
    let ps_h = xx
        .compose(&controlled_phase(params.phi_h()))
        .and_then(|g| g.compose(&xx))
        .expect("unitary");
    (
        UnitaryGate::new("PS_V", ps_v.matrix().clone()).expect("unitary"),
        UnitaryGate::new("PS_H", ps_h.matrix().clone()).expect("unitary"),
    )
}

/// Closed-form VPPBS on `(B, B′)`, including the overall factor −1:
///
/// ```text
/// −[ T_H  −iR_H   0     0   ]
///  [ iR_H  T_H    0     0   ]
///  [ 0     0      T_V   iR_V]
///  [ 0     0     −iR_V  T_V ]
/// ```
pub fn vppbs_matrix(params: &VppbsParams) -> UnitaryGate {
    let Coefficients { t_h, r_h, t_v, r_v } = params.coefficients();
    let rows = [
        t_h, -I * r_h, O, O, //
        I * r_h, t_h, O, O, //
        O, O, t_v, I * r_v, //
        O, O, -I * r_v, t_v,
    ];
    let rows: Vec<C64> = rows.iter().map(|z| -z).collect();
    UnitaryGate::from_rows("VPPBS", 4, &rows).expect("unitary")
}

/// The VPPBS built from its optical parts: beam splitter, mirrors, the two
/// polarization-controlled phase shifters, second beam splitter.
pub fn vppbs_decomposed(params: &VppbsParams) -> UnitaryGate {
    let id = UnitaryGate::from_rows("I", 2, &[L, O, O, L]).expect("unitary");
    let bs = id.kron(&beam_splitter()).expect("unitary");
    let m = id.kron(&mirror()).expect("unitary");
    let (ps_v, ps_h) = controlled_phase_pair(params);
    let u = bs
        .compose(&ps_h)
        .and_then(|g| g.compose(&ps_v))
        .and_then(|g| g.compose(&m))
        .and_then(|g| g.compose(&bs))
        .expect("unitary");
    UnitaryGate::new("VPPBS(gates)", u.matrix().clone()).expect("unitary")
}

/// Bell-basis rotation on `(A, B)`: CNOT(A→B) then H on A.
pub fn bbm_pair() -> UnitaryGate {
    let id = UnitaryGate::from_rows("I", 2, &[L, O, O, L]).expect("unitary");
    let h_a = hadamard().kron(&id).expect("unitary");
    let u = h_a.compose(&cnot()).expect("unitary");
    UnitaryGate::new("BBM", u.matrix().clone()).expect("unitary")
}

/// Every named gate, for catalog-wide property checks.
pub fn catalog(params: &VppbsParams, phi: f64) -> Vec<UnitaryGate> {
    let (ps_v, ps_h) = controlled_phase_pair(params);
    vec![
        hadamard(),
        pauli_x(),
        pauli_y(),
        pauli_z(),
        phase_s(),
        phase(phi),
        half_wave_plate(),
        beam_splitter(),
        mirror(),
        cnot(),
        controlled_phase(phi),
        ps_v,
        ps_h,
        vppbs_matrix(params),
        vppbs_decomposed(params),
        bbm_pair(),
    ]
}
