use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EqeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("duplicate qubit index {0}")]
    DuplicateQubit(usize),

    #[error("gate of arity {arity} applied to {targets} target(s)")]
    ArityMismatch { arity: usize, targets: usize },

    #[error("matrix `{label}` is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { label: String, deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("outcome has probability {probability:.3e}, below the post-selection floor")]
    ZeroProbabilityOutcome { probability: f64 },

    #[error("input is not a physical state: {0}")]
    NonPhysicalInput(String),

    #[error("calibration matrix is singular or ill-conditioned (condition number {condition:.3e})")]
    SingularCalibration { condition: f64 },

    #[error("incomplete tomography basis set: missing {missing}")]
    IncompleteBasisSet { missing: String },

    #[error("invalid Pauli basis `{0}`")]
    InvalidBasis(String),

    #[error("invalid readout noise: {0}")]
    InvalidNoise(String),

    #[error("invalid configuration field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("stage {0} is not valid for this operation")]
    InvalidStage(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for EqeError {
    fn from(e: std::io::Error) -> Self {
        EqeError::Io(e.to_string())
    }
}

impl From<csv::Error> for EqeError {
    fn from(e: csv::Error) -> Self {
        EqeError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, EqeError>;
