//! Simulation of the entangled quantum eraser: a Mach-Zehnder interferometer
//! fed through a variable partially-polarizing beam splitter, whose path
//! information is erased by a Bell-basis measurement on the two
//! polarizations.
//!
//! The crate provides the exact three-qubit statevector pipeline, the
//! complementarity measures of the path qubit before and after erasure, an
//! emulator of the finite-shot tomography experiment with readout error and
//! mitigation, and parameter sweeps that emit the results as CSV.

pub mod ccr;
pub mod circuit;
pub mod erasure;
pub mod error;
pub mod optics;
pub mod qstate;
pub mod scenario;
pub mod selftest;
pub mod sweep;
pub mod tomo;

pub use ccr::{ccr_closed_forms, CcrTriple};
pub use circuit::{CircuitParams, PipelineState, Stage};
pub use erasure::{erase, ErasureRecord};
pub use error::{EqeError, Result};
pub use optics::VppbsParams;
pub use qstate::{BellState, DensityMatrix, StateVector, Tensor, UnitaryGate};
pub use scenario::{run_scenario_report, ScenarioReport};
pub use selftest::{run_selftest, SelftestReport};
pub use sweep::{run_sweep, SweepConfig, SweepOutput, SweepRow};
