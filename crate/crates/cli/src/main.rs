use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use eqe_core::circuit::{output_probabilities, CircuitParams, Stage};
use eqe_core::sweep::{
    read_csv, verify_derived_columns, write_csv, Angle, CheckFailure, Mode, Scenario, SweepConfig,
};
use eqe_core::tomo::{two_step_experiment, ExperimentConfig, MitigationMethod, ReadoutNoise};
use eqe_core::{ccr_closed_forms, run_scenario_report, run_selftest, run_sweep, BellState, VppbsParams};

/// Exit status when a requested check fails.
const CHECK_FAILED: u8 = 1;
/// Exit status for usage, configuration and I/O errors.
const ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "eqe", version, about = "Entangled quantum eraser sweeps and reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the VPPBS angles and emit one row per grid point.
    Sweep(SweepArgs),
    /// Check the claim of a named special case.
    Scenario {
        /// pbs-limit, equal-T, conjugate-T or anti-diagonal
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the emulated two-step tomography at one setting.
    Tomo(TomoArgs),
    /// Detector probabilities after the output beam splitter, per Bell outcome.
    Probabilities(ProbArgs),
    /// Run the built-in property suite.
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Emulated,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    #[value(name = "grid2d")]
    Grid2d,
    #[value(name = "phiV_zero")]
    PhiVZero,
    #[value(name = "phiH_eq_pi_plus_phiV")]
    PhiHEqPiPlusPhiV,
    #[value(name = "custom")]
    Custom,
}

/// Options shared by every command that runs the emulator.
#[derive(Args)]
struct EmulationArgs {
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Shots per measurement setting.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, env = "EQE_SEED")]
    seed: Option<u64>,
    /// `p01,p10`; give once for all qubits or three times, one per qubit.
    #[arg(long, value_parser = parse_flip_pair)]
    readout_error: Vec<[f64; 2]>,
    #[arg(long, value_enum)]
    mitigate: Option<OnOff>,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON file with sweep settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    /// `start,end` range, or a single angle. Angles may use `pi:` units.
    #[arg(long, allow_hyphen_values = true)]
    phi_h: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi_v: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<Angle>,
    #[arg(long)]
    resolution: Option<usize>,
    #[command(flatten)]
    emulation: EmulationArgs,
    /// Re-read the written CSV and verify the derived columns bit for bit.
    #[arg(long)]
    check_roundtrip: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct TomoArgs {
    #[arg(long, allow_hyphen_values = true)]
    phi_h: Angle,
    #[arg(long, allow_hyphen_values = true)]
    phi_v: Angle,
    #[command(flatten)]
    emulation: EmulationArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProbArgs {
    #[arg(long, allow_hyphen_values = true)]
    phi_h: Angle,
    #[arg(long, allow_hyphen_values = true)]
    phi_v: Angle,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    phi: Angle,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn parse_flip_pair(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok([
            a.parse().map_err(|_| format!("bad p01 `{a}`"))?,
            b.parse().map_err(|_| format!("bad p10 `{b}`"))?,
        ]),
        _ => Err(format!("expected `p01,p10`, got `{s}`")),
    }
}

fn parse_range(s: &str) -> anyhow::Result<[Angle; 2]> {
    let parts: Vec<&str> = s.split(',').collect();
    let angles = parts
        .iter()
        .map(|p| p.parse::<Angle>())
        .collect::<Result<Vec<_>, _>>()?;
    match angles.as_slice() {
        [a] => Ok([*a, *a]),
        [a, b] => Ok([*a, *b]),
        _ => bail!("expected an angle or `start,end`, got `{s}`"),
    }
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json(path: Option<&Path>, value: &serde_json::Value) -> anyhow::Result<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Prints the machine-readable failure list and picks the exit status.
fn report_failures(failures: &serde_json::Value, any: bool) -> ExitCode {
    if any {
        eprintln!("{}", json!({ "failures": failures }));
        ExitCode::from(CHECK_FAILED)
    } else {
        ExitCode::SUCCESS
    }
}

fn sweep_config(args: &SweepArgs) -> anyhow::Result<SweepConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            SweepConfig::from_json(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => SweepConfig::default(),
    };
    if let Some(s) = args.scenario {
        cfg.scenario = match s {
            ScenarioArg::Grid2d => Scenario::Grid2d,
            ScenarioArg::PhiVZero => Scenario::PhiVZero,
            ScenarioArg::PhiHEqPiPlusPhiV => Scenario::PhiHEqPiPlusPhiV,
            ScenarioArg::Custom => Scenario::Custom,
        };
    }
    if let Some(r) = &args.phi_h {
        cfg.phi_h_range = parse_range(r).context("--phi-h")?;
    }
    if let Some(r) = &args.phi_v {
        cfg.phi_v_range = parse_range(r).context("--phi-v")?;
    }
    if let Some(phi) = args.phi {
        cfg.phi = phi;
    }
    if let Some(n) = args.resolution {
        cfg.resolution = n;
    }
    let e = &args.emulation;
    if let Some(m) = e.mode {
        cfg.mode = match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Emulated => Mode::Emulated,
        };
    }
    if let Some(s) = e.shots {
        cfg.shots = s;
    }
    if let Some(s) = e.seed {
        cfg.seed = s;
    }
    if !e.readout_error.is_empty() {
        cfg.readout_error = Some(e.readout_error.clone());
    }
    if let Some(m) = e.mitigate {
        cfg.mitigate = matches!(m, OnOff::On);
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sweep(args: &SweepArgs) -> anyhow::Result<ExitCode> {
    let cfg = sweep_config(args)?;
    if args.check_roundtrip && (cfg.out.is_none() || args.format != Format::Csv) {
        bail!("--check-roundtrip needs --format csv and an output file");
    }
    let result = run_sweep(&cfg)?;
    let out = cfg.out.as_deref();
    match args.format {
        Format::Csv => {
            let mut w = output(out)?;
            write_csv(&result.rows, &mut w)?;
            w.flush()?;
        }
        Format::Json => emit_json(out, &serde_json::to_value(&result)?)?,
    }
    let mut failures: Vec<CheckFailure> = result.failures;
    if args.check_roundtrip {
        let path = out.expect("checked above");
        let rows = read_csv(File::open(path)?)?;
        if rows.len() != result.rows.len() {
            bail!("read back {} rows, wrote {}", rows.len(), result.rows.len());
        }
        failures.extend(verify_derived_columns(&rows));
        if cfg.mode == Mode::Exact && rows != result.rows {
            bail!("rows read back from {} differ from the rows written", path.display());
        }
    }
    Ok(report_failures(&serde_json::to_value(&failures)?, !failures.is_empty()))
}

fn experiment_config(e: &EmulationArgs) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match e.mode {
        Some(ModeArg::Exact) => ExperimentConfig::exact(),
        _ => ExperimentConfig::default(),
    };
    if let Some(s) = e.shots {
        if cfg.shots_per_basis.is_some() {
            cfg.shots_per_basis = Some(s);
            cfg.calibration_shots = s;
        }
    }
    if let Some(s) = e.seed {
        cfg.seed = s;
    }
    cfg.noise = match e.readout_error.as_slice() {
        [] => None,
        [one] => Some(ReadoutNoise::from_flips(&[(one[0], one[1]); 3])?),
        many if many.len() == 3 => Some(ReadoutNoise::from_flips(
            &many.iter().map(|f| (f[0], f[1])).collect::<Vec<_>>(),
        )?),
        other => bail!("--readout-error given {} times; expected 1 or 3", other.len()),
    };
    if matches!(e.mitigate, Some(OnOff::Off)) {
        cfg.mitigation = None;
    } else {
        cfg.mitigation = Some(MitigationMethod::ConstrainedLeastSquares);
    }
    Ok(cfg)
}

fn tomo(args: &TomoArgs) -> anyhow::Result<ExitCode> {
    let params = VppbsParams::new(args.phi_h.0, args.phi_v.0);
    let cfg = experiment_config(&args.emulation)?;
    let measured = two_step_experiment(&params, &cfg)?;
    let exact = ccr_closed_forms(&params);
    emit_json(
        args.out.as_deref(),
        &json!({
            "phi_H": params.phi_h(),
            "phi_V": params.phi_v(),
            "config": cfg,
            "measured": measured,
            "exact": {
                "before": exact.before,
                "after_plus": exact.after_plus,
                "after_minus": exact.after_minus,
            },
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn probabilities(args: &ProbArgs) -> anyhow::Result<ExitCode> {
    let params = VppbsParams::new(args.phi_h.0, args.phi_v.0);
    let cp = CircuitParams::new(params, args.phi.0, Stage::Psi4);
    let mut rows = Vec::new();
    for bell in BellState::ALL {
        let p = output_probabilities(&cp, bell).ok();
        rows.push((bell, p));
    }
    match args.format {
        Format::Json => emit_json(
            args.out.as_deref(),
            &json!({
                "phi_H": params.phi_h(),
                "phi_V": params.phi_v(),
                "phi": cp.phi,
                "outcomes": rows.iter().map(|(b, p)| json!({
                    "bell": b.name(),
                    "probability": p.map(|p| p.outcome),
                    "detector0": p.map(|p| p.detector0),
                    "detector1": p.map(|p| p.detector1),
                })).collect::<Vec<_>>(),
            }),
        )?,
        Format::Csv => {
            let mut w = output(args.out.as_deref())?;
            writeln!(w, "bell,probability,detector0,detector1")?;
            for (b, p) in &rows {
                match p {
                    Some(p) => writeln!(w, "{},{},{},{}", b.name(), p.outcome, p.detector0, p.detector1)?,
                    None => writeln!(w, "{},,,", b.name())?,
                }
            }
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Sweep(args) => sweep(&args),
        Command::Scenario { name, out } => {
            let report = run_scenario_report(&name)?;
            emit_json(out.as_deref(), &serde_json::to_value(&report)?)?;
            Ok(report_failures(&json!(report.failures), !report.verified))
        }
        Command::Tomo(args) => tomo(&args),
        Command::Probabilities(args) => probabilities(&args),
        Command::Selftest { out } => {
            let report = run_selftest();
            emit_json(out.as_deref(), &serde_json::to_value(&report)?)?;
            let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
            Ok(report_failures(&serde_json::to_value(&failed)?, !report.passed))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(ERROR)
        }
    }
}
