use thiserror::Error;

/// Errors raised by constructors and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix entry count {found} is not a perfect square of the dimension {dim}")]
    BadEntryCount { dim: usize, found: usize },

    #[error("matrix is not Hermitian (max |M - M†| = {max_deviation:e})")]
    NotHermitian { max_deviation: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },

    #[error("matrix is not unitary (max |U†U - I| = {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("invalid trace {trace} (expected 1 within {tolerance:e})")]
    InvalidTrace { trace: f64, tolerance: f64 },

    #[error("unphysical state: minimum eigenvalue {min_eigenvalue}")]
    Unphysical { min_eigenvalue: f64 },

    #[error("{what} is not normalized (norm {norm})")]
    NotNormalized { what: &'static str, norm: f64 },

    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("projectors do not form a complete orthogonal rank-1 set (residual {residual:e})")]
    InvalidMeasurement { residual: f64 },

    #[error("Kraus operators are not trace preserving (max |ΣA†A - I| = {residual:e})")]
    NotTracePreserving { residual: f64 },

    #[error("post-selection overlap {overlap:e} below threshold")]
    OrthogonalPostselection { overlap: f64 },

    #[error("Hellinger distance {distance:e} too small: states coincide")]
    DegenerateDenominator { distance: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
