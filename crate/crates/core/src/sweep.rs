//! Parameter sweeps over the VPPBS angles, emitted as flat CSV rows.

use std::f64::consts::{PI, TAU};
use std::io::{Read, Write};
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::erasure::erase;
use crate::error::{EqeError, Result};
use crate::optics::VppbsParams;
use crate::tomo::experiment::{two_step_experiment_with_rng, ExperimentConfig};
use crate::tomo::mitigation::MitigationMethod;
use crate::tomo::sampling::ReadoutNoise;

/// Tolerance of the invariant checks run on exact sweeps.
pub const CHECK_TOL: f64 = 1e-10;
/// Slack allowed on range endpoints written as decimals of `2π`.
const RANGE_SLACK: f64 = 1e-12;

/// The column order of emitted CSV files.
pub const CSV_HEADER: [&str; 17] = [
    "phi_H",
    "phi_V",
    "phi",
    "prob_psi_plus",
    "prob_psi_minus",
    "P_before",
    "C_before",
    "S_before",
    "ccr_sum",
    "P_after_plus",
    "C_after_plus",
    "P_after_minus",
    "C_after_minus",
    "delta_C_plus",
    "delta_C_minus",
    "mode",
    "seed",
];

/// Parses an angle given in radians (`"1.5708"`) or in units of π
/// (`"pi:0.5"`).
pub fn parse_angle(text: &str) -> Result<f64> {
    let t = text.trim();
    let bad = || EqeError::InvalidConfig {
        field: "angle".into(),
        reason: format!("cannot parse `{text}`"),
    };
    let value = match t.strip_prefix("pi:") {
        Some(rest) => rest.trim().parse::<f64>().map_err(|_| bad())? * PI,
        None => t.parse::<f64>().map_err(|_| bad())?,
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

/// An angle in radians that deserializes from a number or a `"pi:"` string.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AngleRepr", into = "f64")]
pub struct Angle(pub f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum AngleRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<AngleRepr> for Angle {
    type Error = String;
    fn try_from(r: AngleRepr) -> std::result::Result<Self, String> {
        match r {
            AngleRepr::Number(x) => Ok(Angle(x)),
            AngleRepr::Text(s) => parse_angle(&s).map(Angle).map_err(|e| e.to_string()),
        }
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

impl std::str::FromStr for Angle {
    type Err = EqeError;
    fn from_str(s: &str) -> Result<Self> {
        parse_angle(s).map(Angle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    /// Full `φ_H × φ_V` grid, `φ_H` outer.
    #[serde(rename = "grid2d")]
    Grid2d,
    /// `φ_V = 0`, `φ_H` swept.
    #[serde(rename = "phiV_zero")]
    PhiVZero,
    /// `φ_H = π + φ_V`, `φ_V` swept.
    #[serde(rename = "phiH_eq_pi_plus_phiV")]
    PhiHEqPiPlusPhiV,
    /// The explicit list in `points`.
    #[serde(rename = "custom")]
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Exact,
    Emulated,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Emulated => "emulated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub scenario: Scenario,
    /// Points per swept axis, endpoints included.
    pub resolution: usize,
    pub phi_h_range: [Angle; 2],
    pub phi_v_range: [Angle; 2],
    /// `(φ_H, φ_V)` pairs for [`Scenario::Custom`].
    pub points: Vec<[Angle; 2]>,
    /// Interferometer phase, recorded in every row. The triples are taken
    /// inside the interferometer where it has no effect.
    pub phi: Angle,
    pub mode: Mode,
    pub shots: u64,
    pub seed: u64,
    /// `(p01, p10)` per qubit; a single pair applies to all three.
    pub readout_error: Option<Vec<[f64; 2]>>,
    pub mitigate: bool,
    pub out: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::Grid2d,
            resolution: 33,
            phi_h_range: [Angle(0.0), Angle(TAU)],
            phi_v_range: [Angle(0.0), Angle(TAU)],
            points: Vec::new(),
            phi: Angle(0.0),
            mode: Mode::Exact,
            shots: crate::tomo::experiment::DEFAULT_SHOTS,
            seed: 0,
            readout_error: None,
            mitigate: true,
            out: None,
        }
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> EqeError {
    EqeError::InvalidConfig {
        field: field.into(),
        reason: reason.into(),
    }
}

fn check_range(field: &str, r: &[Angle; 2]) -> Result<()> {
    for a in r {
        if !(a.0.is_finite() && (-RANGE_SLACK..=TAU + RANGE_SLACK).contains(&a.0)) {
            return Err(invalid(field, format!("{} outside [0, 2π]", a.0)));
        }
    }
    Ok(())
}

fn clamp_to_circle(x: f64) -> f64 {
    x.clamp(0.0, TAU)
}

impl SweepConfig {
    /// Parses JSON, reporting syntax and type errors with line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| {
            invalid(
                &format!("line {}, column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(invalid("resolution", format!("{} < 2", self.resolution)));
        }
        check_range("phi_h_range", &self.phi_h_range)?;
        check_range("phi_v_range", &self.phi_v_range)?;
        for (i, p) in self.points.iter().enumerate() {
            check_range(&format!("points[{i}]"), p)?;
        }
        if self.scenario == Scenario::Custom && self.points.is_empty() {
            return Err(invalid("points", "custom scenario needs at least one point"));
        }
        if !self.phi.0.is_finite() {
            return Err(invalid("phi", "not finite"));
        }
        if self.mode == Mode::Emulated && self.shots == 0 {
            return Err(invalid("shots", "emulated mode needs at least one shot"));
        }
        self.noise()?;
        Ok(())
    }

    pub fn noise(&self) -> Result<Option<ReadoutNoise>> {
        let Some(flips) = &self.readout_error else {
            return Ok(None);
        };
        let pairs: Vec<(f64, f64)> = match flips.as_slice() {
            [one] => vec![(one[0], one[1]); 3],
            many if many.len() == 3 => many.iter().map(|f| (f[0], f[1])).collect(),
            other => {
                return Err(invalid(
                    "readout_error",
                    format!("expected 1 or 3 (p01, p10) pairs, got {}", other.len()),
                ))
            }
        };
        ReadoutNoise::from_flips(&pairs)
            .map(Some)
            .map_err(|e| invalid("readout_error", e.to_string()))
    }

    /// The `(φ_H, φ_V)` points of the sweep in row order.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        let axis = |r: &[Angle; 2]| -> Vec<f64> {
            let (a, b) = (clamp_to_circle(r[0].0), clamp_to_circle(r[1].0));
            let n = self.resolution;
            (0..n)
                .map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
                .collect()
        };
        match self.scenario {
            Scenario::Grid2d => {
                let vs = axis(&self.phi_v_range);
                axis(&self.phi_h_range)
                    .into_iter()
                    .flat_map(|h| vs.iter().map(move |&v| (h, v)))
                    .collect()
            }
            Scenario::PhiVZero => axis(&self.phi_h_range).into_iter().map(|h| (h, 0.0)).collect(),
            Scenario::PhiHEqPiPlusPhiV => axis(&self.phi_v_range)
                .into_iter()
                .map(|v| {
                    let h = PI + v;
                    (if h > TAU { h - TAU } else { h }, v)
                })
                .collect(),
            Scenario::Custom => self
                .points
                .iter()
                .map(|p| (clamp_to_circle(p[0].0), clamp_to_circle(p[1].0)))
                .collect(),
        }
    }

    fn experiment(&self) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig {
            shots_per_basis: Some(self.shots),
            seed: self.seed,
            noise: self.noise()?,
            mitigation: self.mitigate.then_some(MitigationMethod::ConstrainedLeastSquares),
            calibration_shots: self.shots,
            ..ExperimentConfig::default()
        })
    }
}

/// One CSV row. Undefined branches are `None` and written as empty fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "phi_H")]
    pub phi_h: f64,
    #[serde(rename = "phi_V")]
    pub phi_v: f64,
    pub phi: f64,
    pub prob_psi_plus: f64,
    pub prob_psi_minus: f64,
    #[serde(rename = "P_before")]
    pub p_before: f64,
    #[serde(rename = "C_before")]
    pub c_before: f64,
    #[serde(rename = "S_before")]
    pub s_before: f64,
    pub ccr_sum: f64,
    #[serde(rename = "P_after_plus")]
    pub p_after_plus: Option<f64>,
    #[serde(rename = "C_after_plus")]
    pub c_after_plus: Option<f64>,
    #[serde(rename = "P_after_minus")]
    pub p_after_minus: Option<f64>,
    #[serde(rename = "C_after_minus")]
    pub c_after_minus: Option<f64>,
    #[serde(rename = "delta_C_plus")]
    pub delta_c_plus: Option<f64>,
    #[serde(rename = "delta_C_minus")]
    pub delta_c_minus: Option<f64>,
    pub mode: Mode,
    /// Only set in emulated mode.
    pub seed: Option<u64>,
}

impl SweepRow {
    #[allow(clippy::too_many_arguments)]
    fn new(
        phi_h: f64,
        phi_v: f64,
        phi: f64,
        probs: (f64, f64),
        before: crate::CcrTriple,
        plus: Option<crate::CcrTriple>,
        minus: Option<crate::CcrTriple>,
        mode: Mode,
        seed: Option<u64>,
    ) -> Self {
        Self {
            phi_h,
            phi_v,
            phi,
            prob_psi_plus: probs.0,
            prob_psi_minus: probs.1,
            p_before: before.predictability,
            c_before: before.coherence,
            s_before: before.entanglement,
            ccr_sum: ccr_sum(before.predictability, before.coherence, before.entanglement),
            p_after_plus: plus.map(|t| t.predictability),
            c_after_plus: plus.map(|t| t.coherence),
            p_after_minus: minus.map(|t| t.predictability),
            c_after_minus: minus.map(|t| t.coherence),
            delta_c_plus: plus.map(|t| t.coherence - before.coherence),
            delta_c_minus: minus.map(|t| t.coherence - before.coherence),
            mode,
            seed,
        }
    }
}

fn ccr_sum(p: f64, c: f64, s: f64) -> f64 {
    p + c + s
}

/// A failed invariant, in a form meant for machine consumption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckFailure {
    pub row: usize,
    pub check: String,
    pub value: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<CheckFailure>,
}

fn evaluate_point(cfg: &SweepConfig, exp: Option<&ExperimentConfig>, index: usize, h: f64, v: f64) -> Result<SweepRow> {
    let params = VppbsParams::new(h, v);
    let phi = cfg.phi.0;
    match exp {
        None => {
            let r = erase(&params);
            Ok(SweepRow::new(
                h,
                v,
                phi,
                (r.prob_psi_plus, r.prob_psi_minus),
                r.before,
                r.after_plus,
                r.after_minus,
                Mode::Exact,
                None,
            ))
        }
        Some(exp) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(index as u64);
            let out = two_step_experiment_with_rng(&params, exp, &mut rng)?;
            Ok(SweepRow::new(
                h,
                v,
                phi,
                (out.prob_plus, out.prob_minus),
                out.before,
                out.after_plus,
                out.after_minus,
                Mode::Emulated,
                Some(cfg.seed),
            ))
        }
    }
}

/// Evaluates every grid point in parallel. Rows come back in grid order and
/// are identical for a fixed configuration regardless of thread count.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let exp = match cfg.mode {
        Mode::Exact => None,
        Mode::Emulated => Some(cfg.experiment()?),
    };
    let rows = cfg
        .grid()
        .into_par_iter()
        .enumerate()
        .map(|(i, (h, v))| evaluate_point(cfg, exp.as_ref(), i, h, v))
        .collect::<Result<Vec<_>>>()?;
    let failures = match cfg.mode {
        Mode::Exact => check_exact_rows(&rows),
        Mode::Emulated => Vec::new(),
    };
    Ok(SweepOutput { rows, failures })
}

/// Invariants every exact row must satisfy.
pub fn check_exact_rows(rows: &[SweepRow]) -> Vec<CheckFailure> {
    let mut out = Vec::new();
    let mut check = |row: usize, name: &str, value: f64, expected: f64| {
        let err = (value - expected).abs();
        if err.is_nan() || err > CHECK_TOL {
            out.push(CheckFailure {
                row,
                check: name.into(),
                value,
                expected,
            });
        }
    };
    for (i, r) in rows.iter().enumerate() {
        check(i, "ccr_sum", r.ccr_sum, 0.5);
        check(i, "bell_probability_sum", r.prob_psi_plus + r.prob_psi_minus, 1.0);
        // Post-selected path states are pure, so P + C saturates the bound.
        if let (Some(p), Some(c)) = (r.p_after_plus, r.c_after_plus) {
            check(i, "after_plus_pure", p + c, 0.5);
        }
        if let (Some(p), Some(c)) = (r.p_after_minus, r.c_after_minus) {
            check(i, "after_minus_pure", p + c, 0.5);
        }
    }
    out
}

/// Recomputes `ccr_sum` and the two `delta_C` columns and reports every row
/// where they are not bit-identical to the stored values.
pub fn verify_derived_columns(rows: &[SweepRow]) -> Vec<CheckFailure> {
    let mut out = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let sum = ccr_sum(r.p_before, r.c_before, r.s_before);
        if sum.to_bits() != r.ccr_sum.to_bits() {
            out.push(CheckFailure {
                row: i,
                check: "ccr_sum_recomputed".into(),
                value: r.ccr_sum,
                expected: sum,
            });
        }
        for (name, after, delta) in [
            ("delta_C_plus_recomputed", r.c_after_plus, r.delta_c_plus),
            ("delta_C_minus_recomputed", r.c_after_minus, r.delta_c_minus),
        ] {
            let expected = after.map(|c| c - r.c_before);
            if expected.map(f64::to_bits) != delta.map(f64::to_bits) {
                out.push(CheckFailure {
                    row: i,
                    check: name.into(),
                    value: delta.unwrap_or(f64::NAN),
                    expected: expected.unwrap_or(f64::NAN),
                });
            }
        }
    }
    out
}

pub fn write_csv<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file produced by [`write_csv`], rejecting any other header.
pub fn read_csv<R: Read>(reader: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(EqeError::Io(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(EqeError::from)).collect()
}
