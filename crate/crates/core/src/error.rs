use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree mismatch: expected {expected}, found {found}")]
    Degree { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("Jacobi identity fails on ({i}, {j}, {k})")]
    Jacobi { i: usize, j: usize, k: usize },
    #[error("data set mismatch: {0}")]
    DataSetMismatch(String),
    #[error("calibration has no solution: {0}")]
    NotAdmissible(String),
    #[error("calibration is not unique: {0}")]
    CalibrationNotUnique(String),
    #[error("bracket violates the symmetric-part condition: {0}")]
    SymmetricPart(String),
    #[error("not null: {0}")]
    NotNull(String),
    #[error("not isotropic: {0}")]
    NotIsotropic(String),
    #[error("not Lagrangian: {0}")]
    NotLagrangian(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
