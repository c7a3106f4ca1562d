use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not positive definite: pivot {index} is {value}")]
    NotPositiveDefinite { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("dimension too small: d = {0} (need d >= 3)")]
    DimensionTooSmall(usize),

    #[error("invalid weight parameters: recurrence coefficient b_{k}^2 = {value}")]
    InvalidWeightParameters { k: usize, value: f64 },

    #[error("degree {degree} exceeds basis maximum {max}")]
    DegreeExceedsBasis { degree: usize, max: usize },

    #[error("quadrature not converged: {0}")]
    QuadratureNotConverged(String),

    #[error("limit coefficients require Taylor data")]
    LimitRequiresTaylor,

    #[error("derivatives unavailable for this kernel")]
    DerivativesUnavailable,

    #[error("activation expansion truncation too small: {0}")]
    TruncationTooSmall(String),

    #[error("kernel bound violated: |f({z})| = {value} exceeds C_f = {bound}")]
    KernelBoundViolated { z: f64, value: f64, bound: f64 },

    #[error("teacher growth bound violated at x = {x}")]
    TeacherGrowthViolated { x: f64 },

    #[error("non-degeneracy violated: mu_{k} = {value} must be positive at every degree up to K")]
    NonDegeneracyViolated { k: usize, value: f64 },

    #[error("truncation degree {l} is below phase degree {k}")]
    TruncationBelowPhase { l: usize, k: usize },

    #[error("effective ridge must be positive (got {0}); use ridgeless_limit")]
    NonPositiveRidge(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("epsilon {epsilon} outside perturbation domain [-{bound}, {bound}]")]
    OutsidePerturbationDomain { epsilon: f64, bound: f64 },

    #[error("interpolation threshold: variance diverges at delta = 1")]
    InterpolationThreshold,

    #[error("off-sphere input: kernel argument {0} outside [-1, 1]")]
    OffSphereInput(f64),

    #[error("train-error identity violated: resolvent form {resolvent}, objective form {objective}")]
    TrainErrorIdentity { resolvent: f64, objective: f64 },

    #[error("solver residual identity violated: relative error {relative}")]
    SolverResidual { relative: f64 },

    #[error("surrogate dimension too large: {dimension} > cap {cap}")]
    SurrogateTooLarge { dimension: f64, cap: f64 },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("unknown recipe `{0}`")]
    UnknownRecipe(String),

    #[error("refusing to write empty output")]
    EmptyOutput,

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Process exit code: 1 for bad input or I/O, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. }
            | Error::UnknownRecipe(_)
            | Error::EmptyOutput
            | Error::Io { .. }
            | Error::InvalidArgument(_)
            | Error::DimensionTooSmall(_)
            | Error::TruncationBelowPhase { .. }
            | Error::KernelBoundViolated { .. }
            | Error::TeacherGrowthViolated { .. }
            | Error::NonDegeneracyViolated { .. }
            | Error::DerivativesUnavailable
            | Error::LimitRequiresTaylor
            | Error::SurrogateTooLarge { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
