use alloc::string::String;

/// Errors raised by the core numerics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("qubit index {qubit} repeated in gate support")]
    RepeatedQubit { qubit: usize },
    #[error("qubit index {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("eigenbasis is defective (condition estimate {condition:e})")]
    DefectiveEigenbasis { condition: f64 },
    #[error("mask selects no entries")]
    EmptyMask,
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("size L={n_qubits} exceeds the dense ceiling L<={ceiling}")]
    SizeCeiling { n_qubits: usize, ceiling: usize },
    #[error("parameter vector has length {actual}, template expects {expected}")]
    ParamLength { expected: usize, actual: usize },
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("cost became non-finite or diverged at iteration {iteration} (epsilon {epsilon})")]
    Diverged { iteration: usize, epsilon: f64 },
    #[error("unknown state name {0:?}")]
    UnknownState(String),
    #[error("invalid angle selector {0}")]
    InvalidAngle(usize),
}

pub type Result<T> = core::result::Result<T, Error>;
