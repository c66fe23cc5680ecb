use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("Hilbert space of {qubits} qubits exceeds the supported maximum of {max}")]
    DimensionOverflow { qubits: usize, max: usize },

    #[error("parameter `{name}` out of range: {detail}")]
    OutOfRange { name: &'static str, detail: String },

    #[error("invalid bath configuration: {0}")]
    InvalidBath(String),

    #[error("invalid fragment: {0}")]
    InvalidFragment(String),

    #[error("effective coupling f_dd = {value} outside the attainable interval |f_dd| < {bound:.9}")]
    CouplingOutOfRange { value: f64, bound: f64 },

    #[error("no filter root for f_dd = {f_dd}: {detail}")]
    NoFilterRoot { f_dd: f64, detail: String },

    #[error("integrator failed: {0}")]
    Integrator(String),

    #[error("closed-form path requires {0}")]
    NotApplicable(&'static str),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, Error>;
