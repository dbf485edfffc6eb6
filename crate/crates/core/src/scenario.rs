//! Named special cases of the VPPBS with the qualitative erasure claim each
//! one makes, checked numerically.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::ccr::CcrTriple;
use crate::erasure::erase;
use crate::error::{EqeError, Result};
use crate::optics::VppbsParams;

/// Tolerance for every scenario claim.
pub const CLAIM_TOL: f64 = 1e-10;

pub const SCENARIOS: [&str; 4] = ["pbs-limit", "equal-T", "conjugate-T", "anti-diagonal"];

/// What erasure does to the path qubit's entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    ConvertedToC,
    ConvertedToP,
    Unchanged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioPoint {
    pub phi_h: f64,
    pub phi_v: f64,
    pub prob_psi_plus: f64,
    pub prob_psi_minus: f64,
    pub before: CcrTriple,
    pub after_plus: Option<CcrTriple>,
    pub after_minus: Option<CcrTriple>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub claim: Claim,
    pub statement: String,
    pub points: Vec<ScenarioPoint>,
    pub verified: bool,
    pub failures: Vec<String>,
}

/// Nine evenly spaced angles over `[0, 2π]`.
pub fn sample_angles() -> Vec<f64> {
    (0..9).map(|k| if k == 8 { TAU } else { TAU * k as f64 / 8.0 }).collect()
}

fn point(h: f64, v: f64) -> ScenarioPoint {
    let r = erase(&VppbsParams::new(h, v));
    ScenarioPoint {
        phi_h: r.phi_h,
        phi_v: r.phi_v,
        prob_psi_plus: r.prob_psi_plus,
        prob_psi_minus: r.prob_psi_minus,
        before: r.before,
        after_plus: r.after_plus,
        after_minus: r.after_minus,
    }
}

struct Checker<'a> {
    failures: &'a mut Vec<String>,
}

impl Checker<'_> {
    fn near(&mut self, what: &str, p: &ScenarioPoint, value: f64, expected: f64) {
        let err = (value - expected).abs();
        if err.is_nan() || err > CLAIM_TOL {
            self.failures.push(format!(
                "({:.6}, {:.6}) {what}: {value} != {expected}",
                p.phi_h, p.phi_v
            ));
        }
    }

    fn fail(&mut self, what: &str, p: &ScenarioPoint) {
        self.failures
            .push(format!("({:.6}, {:.6}) {what}", p.phi_h, p.phi_v));
    }
}

fn defined(p: &ScenarioPoint) -> Vec<(&'static str, CcrTriple)> {
    [("psi_plus", p.after_plus), ("psi_minus", p.after_minus)]
        .into_iter()
        .filter_map(|(n, t)| t.map(|t| (n, t)))
        .collect()
}

/// Evaluates the named scenario and checks its claim.
pub fn run_scenario_report(name: &str) -> Result<ScenarioReport> {
    let (claim, statement, points): (Claim, &str, Vec<ScenarioPoint>) = match name {
        "pbs-limit" => (
            Claim::ConvertedToC,
            "entanglement -> coherence, C_after = 0.5",
            vec![point(0.0, PI)],
        ),
        "equal-T" => (
            Claim::ConvertedToP,
            "entanglement -> predictability, P_after = 0.5",
            sample_angles().into_iter().map(|t| point(t, t)).collect(),
        ),
        "conjugate-T" => (
            Claim::Unchanged,
            "unchanged before/after",
            sample_angles().into_iter().map(|t| point(TAU - t, t)).collect(),
        ),
        "anti-diagonal" => (
            Claim::ConvertedToC,
            "entanglement -> coherence, P_before = 0 and C_after = 0.5",
            sample_angles()
                .into_iter()
                .map(|t| {
                    let h = PI + t;
                    point(if h > TAU { h - TAU } else { h }, t)
                })
                .collect(),
        ),
        other => return Err(EqeError::UnknownScenario(other.into())),
    };

    let mut failures = Vec::new();
    let mut ck = Checker {
        failures: &mut failures,
    };
    for p in &points {
        let branches = defined(p);
        if branches.is_empty() {
            ck.fail("no defined branch", p);
        }
        match name {
            "pbs-limit" => {
                ck.near("P_before", p, p.before.predictability, 0.0);
                ck.near("C_before", p, p.before.coherence, 0.0);
                ck.near("S_before", p, p.before.entanglement, 0.5);
                ck.near("prob_psi_plus", p, p.prob_psi_plus, 0.5);
                ck.near("prob_psi_minus", p, p.prob_psi_minus, 0.5);
                if branches.len() != 2 {
                    ck.fail("a branch is undefined", p);
                }
                for (b, t) in &branches {
                    ck.near(&format!("P_after_{b}"), p, t.predictability, 0.0);
                    ck.near(&format!("C_after_{b}"), p, t.coherence, 0.5);
                }
            }
            "equal-T" => {
                for (b, t) in &branches {
                    ck.near(&format!("P_after_{b}"), p, t.predictability, 0.5);
                    ck.near(&format!("C_after_{b}"), p, t.coherence, 0.0);
                }
            }
            "conjugate-T" => {
                for (b, t) in &branches {
                    ck.near(&format!("after_{b} vs before"), p, t.max_abs_diff(&p.before), 0.0);
                }
            }
            _ => {
                ck.near("P_before", p, p.before.predictability, 0.0);
                if branches.len() != 2 {
                    ck.fail("a branch is undefined", p);
                }
                for (b, t) in &branches {
                    ck.near(&format!("C_after_{b}"), p, t.coherence, 0.5);
                }
            }
        }
    }

    Ok(ScenarioReport {
        scenario: name.into(),
        claim,
        statement: statement.into(),
        points,
        verified: failures.is_empty(),
        failures,
    })
}
