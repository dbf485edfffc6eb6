//! Sweep datasets, CSV emission and scenario reports.

mod common;

use std::f64::consts::PI;

use eqe_core::scenario::{Claim, SCENARIOS};
use eqe_core::sweep::{
    check_exact_rows, read_csv, verify_derived_columns, write_csv, Angle, Mode, Scenario, CSV_HEADER,
};
use eqe_core::{run_scenario_report, run_sweep, EqeError, SweepConfig};

fn exact(scenario: Scenario, resolution: usize) -> SweepConfig {
    SweepConfig {
        scenario,
        resolution,
        ..SweepConfig::default()
    }
}

#[test]
fn grid2d_three_by_three() {
    let out = run_sweep(&exact(Scenario::Grid2d, 3)).unwrap();
    assert_eq!(out.rows.len(), 9);
    assert!(out.failures.is_empty());
    for r in &out.rows {
        assert!((r.ccr_sum - 0.5).abs() < 1e-10);
        assert_eq!(r.mode, Mode::Exact);
        assert_eq!(r.seed, None);
    }
    // φ_H is the outer axis
    assert_eq!((out.rows[1].phi_h, out.rows[1].phi_v), (0.0, PI));
    assert_eq!((out.rows[3].phi_h, out.rows[3].phi_v), (PI, 0.0));
}

#[test]
fn phi_v_zero_scenario() {
    let rows = run_sweep(&exact(Scenario::PhiVZero, 33)).unwrap().rows;
    assert_eq!(rows.len(), 33);
    let at_pi = rows.iter().find(|r| r.phi_h == PI).unwrap();
    assert!((at_pi.c_after_plus.unwrap() - 0.5).abs() < 1e-10);
    for r in &rows {
        assert_eq!(r.phi_v, 0.0);
        assert!((r.p_before - (r.phi_h / 2.0).cos().powi(4) / 2.0).abs() < 1e-10);
    }
}

#[test]
fn anti_diagonal_scenario() {
    let rows = run_sweep(&exact(Scenario::PhiHEqPiPlusPhiV, 17)).unwrap().rows;
    for r in &rows {
        assert!(r.p_before.abs() < 1e-10);
        if let Some(c) = r.c_after_plus {
            assert!((c - 0.5).abs() < 1e-10);
        }
    }
}

#[test]
fn custom_points() {
    let cfg = SweepConfig::from_json(r#"{"scenario": "custom", "points": [["pi:0", "pi:1"], [1.0, 2.0]]}"#).unwrap();
    let rows = run_sweep(&cfg).unwrap().rows;
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0].phi_h, rows[0].phi_v), (0.0, PI));
    assert!(SweepConfig::from_json(r#"{"scenario": "custom"}"#).is_err());
}

#[test]
fn csv_round_trip_is_bit_identical() {
    let out = run_sweep(&exact(Scenario::Grid2d, 9)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    write_csv(&out.rows, std::fs::File::create(&path).unwrap()).unwrap();

    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    // the corner (0, 2π) has an undefined Ψ− branch
    assert!(text.lines().any(|l| l.contains(",,")));

    let back = read_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back, out.rows);
    for (a, b) in back.iter().zip(&out.rows) {
        assert_eq!(a.ccr_sum.to_bits(), b.ccr_sum.to_bits());
    }
    assert!(verify_derived_columns(&back).is_empty());
    assert!(check_exact_rows(&back).is_empty());
}

#[test]
fn tampered_csv_is_detected() {
    let out = run_sweep(&exact(Scenario::PhiVZero, 5)).unwrap();
    let mut buf = Vec::new();
    write_csv(&out.rows, &mut buf).unwrap();
    let mut rows = read_csv(buf.as_slice()).unwrap();
    rows[2].ccr_sum = f64::from_bits(rows[2].ccr_sum.to_bits() + 1);
    let failures = verify_derived_columns(&rows);
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0].row, 2);

    let bad_header = "a,b\n1,2\n";
    assert!(matches!(read_csv(bad_header.as_bytes()), Err(EqeError::Io(_))));
}

fn emulated(seed: u64) -> SweepConfig {
    SweepConfig {
        scenario: Scenario::PhiVZero,
        resolution: 5,
        mode: Mode::Emulated,
        shots: 2048,
        seed,
        readout_error: Some(vec![[0.05, 0.03]]),
        phi: Angle(0.0),
        ..SweepConfig::default()
    }
}

#[test]
fn emulated_rows_independent_of_thread_count() {
    let run_with = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_sweep(&emulated(9)).unwrap().rows)
    };
    let one = run_with(1);
    let four = run_with(4);
    assert_eq!(one, four);
    assert!(one.iter().all(|r| r.seed == Some(9) && r.mode == Mode::Emulated));
    assert_ne!(one, run_sweep(&emulated(10)).unwrap().rows);
    // separate points draw from separate streams
    assert_ne!(one[0].p_before, one[4].p_before);
}

#[test]
fn invalid_configs() {
    for (json, field) in [
        (r#"{"resolution": 1}"#, "resolution"),
        (r#"{"phi_v_range": [-1, 1]}"#, "phi_v_range"),
        (r#"{"readout_error": [[0.5, 0.7], [0.1, 0.1]]}"#, "readout_error"),
        (r#"{"mode": "emulated", "shots": 0}"#, "shots"),
    ] {
        match SweepConfig::from_json(json) {
            Err(EqeError::InvalidConfig { field: f, .. }) => assert_eq!(f, field, "{json}"),
            other => panic!("{json}: {other:?}"),
        }
    }
    match SweepConfig::from_json("{\n  \"scenario\": \"spiral\"\n}") {
        Err(EqeError::InvalidConfig { field, .. }) => assert!(field.starts_with("line 2"), "{field}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn scenario_reports() {
    let claims = [
        ("pbs-limit", Claim::ConvertedToC),
        ("equal-T", Claim::ConvertedToP),
        ("conjugate-T", Claim::Unchanged),
        ("anti-diagonal", Claim::ConvertedToC),
    ];
    assert_eq!(SCENARIOS.len(), claims.len());
    for (name, claim) in claims {
        let r = run_scenario_report(name).unwrap();
        assert!(r.verified, "{name}: {:?}", r.failures);
        assert_eq!(r.claim, claim);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["verified"], true);
        assert!(json["points"].as_array().unwrap().iter().all(|p| p["before"].is_object()));
    }
    assert!(matches!(run_scenario_report("pbs"), Err(EqeError::UnknownScenario(_))));
}
