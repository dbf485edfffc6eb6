//! Emulation of the hardware experiment: Pauli-basis sampling with readout
//! error, confusion-matrix calibration and mitigation, and linear-inversion
//! tomography.

pub mod experiment;
pub mod mitigation;
pub mod pauli;
pub mod reconstruct;
pub mod sampling;

pub use experiment::{two_step_experiment, ExperimentConfig, TwoStepOutcome};
pub use mitigation::{calibrate, mitigate, MitigationMethod};
pub use pauli::{Pauli, PauliString};
pub use reconstruct::{tomography, BasisData, TomographyResult};
pub use sampling::{sample_counts, Calibration, ReadoutNoise, ShotPlan};
