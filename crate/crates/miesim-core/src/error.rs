use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit count must be at least 1")]
    ZeroQubits,
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("duplicate qubit index {0} in gate support")]
    DuplicateQubit(usize),
    #[error("gate arity {arity} does not match support size {support}")]
    ArityMismatch { arity: usize, support: usize },
    #[error("size mismatch: expected {expected} qubits, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("invalid Clifford gate: {0}")]
    InvalidGate(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid template: {0}")]
    InvalidTemplate(String),
    #[error("invalid tripartition: {0}")]
    InvalidTripartition(String),
    #[error("{what} exceeds cap {cap} (got {got})")]
    CapExceeded {
        what: &'static str,
        cap: usize,
        got: usize,
    },
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("outcome has probability zero")]
    ImpossibleOutcome,
    #[error("gate {0} is not Clifford")]
    NotClifford(usize),
    #[error("state is not GHZ-type on the given triple")]
    NotGhzType,
    #[error("graph: {0}")]
    Graph(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
