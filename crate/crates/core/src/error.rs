use thiserror::Error;

use crate::gate::GateKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{kind} takes {expected} parameter(s), got {got}")]
    ParamArity {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("{kind} acts on {expected} qubit(s), got {got}")]
    QubitArity {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("clbit {clbit} out of range for {num_clbits} classical bit(s)")]
    ClbitOutOfRange { clbit: usize, num_clbits: usize },
    #[error("qubit {0} repeated in one instruction")]
    DuplicateQubit(usize),
    #[error("barrier must cover at least one qubit")]
    EmptyBarrier,
    #[error("{0} has no inverse")]
    NotInvertible(String),
    #[error("circuit contains measurements; no unitary exists")]
    ContainsMeasure,
    #[error("{num_qubits} qubits exceeds the cap of {cap}")]
    TooManyQubits { num_qubits: usize, cap: usize },
    #[error("qubit {qubit} is used after being measured at instruction {index}")]
    MidCircuitMeasure { qubit: usize, index: usize },
    #[error("basis is not universal: {0}")]
    NonUniversalBasis(String),
    #[error("coupling map: {0}")]
    CouplingMap(String),
    #[error("layout: {0}")]
    Layout(String),
    #[error("distribution: {0}")]
    Distribution(String),
    #[error("watermark: {0}")]
    Watermark(String),
    #[error("ppa configuration: {0}")]
    Ppa(String),
    #[error("graph: {0}")]
    Graph(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
