use thiserror::Error;

/// Errors raised anywhere in the simulation, mitigation and runner stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("gate acts twice on qubit {0}")]
    DuplicateQubit(usize),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("qubit count mismatch: expected {expected}, got {got}")]
    QubitCountMismatch { expected: usize, got: usize },
    #[error("bit width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("layer {layer} uses qubit {qubit} more than once")]
    LayerConflict { layer: usize, qubit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty measurement set")]
    EmptyMeasurement,
    #[error("empty counts histogram")]
    EmptyCounts,
    #[error("system of {n} qubits exceeds the exact-oracle limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing config key `{0}`")]
    MissingKey(String),
    #[error("estimate failed: {0}")]
    EstimateFailed(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
