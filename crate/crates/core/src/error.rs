use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("matrix is numerically singular (smallest singular value {sigma_min:e})")]
    Singular { sigma_min: f64 },

    #[error("Sylvester equation is singular: spectral gap {gap:e} below tolerance")]
    SingularSylvester { gap: f64 },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("range and kernel are not orthogonal (largest principal cosine {cosine:e})")]
    RangeKernelNotOrthogonal { cosine: f64 },

    #[error("diagonal entry {index} is zero")]
    ZeroDiagonal { index: usize },

    #[error("matrix is outside the tangent space (entry ({row}, {col}) = {value:e})")]
    NotTangent { row: usize, col: usize, value: f64 },

    #[error("too few usable steps for a rate estimate ({0} < 3)")]
    TooFewSteps(usize),

    #[error("could not sample an instance within the resampling budget")]
    SamplingBudget,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerical kernels (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. }
                | Error::NotPositive { .. }
                | Error::NotUnitary { .. }
                | Error::Singular { .. }
                | Error::SingularSylvester { .. }
                | Error::NoConvergence(_)
                | Error::RangeKernelNotOrthogonal { .. }
                | Error::TooFewSteps(_)
                | Error::SamplingBudget
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
