use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode index {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("FCIDUMP parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),

    #[error("expected {expected} parameters, got {got}")]
    ParamLength { expected: usize, got: usize },

    #[error("observable is not Hermitian")]
    NonHermitian,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("{n} qubits exceeds the {max}-qubit guard")]
    TooManyQubits { n: usize, max: usize },

    #[error("circuit kind mismatch: {0}")]
    CircuitKind(&'static str),

    #[error("eigensolver did not converge (residual {0:e})")]
    NoConvergence(f64),

    #[error("all {0} optimization restarts diverged")]
    AllRestartsFailed(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
