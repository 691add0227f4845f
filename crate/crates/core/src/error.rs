use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (deviation {deviation:.3e} exceeds tolerance {tol:.1e})")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("factor index {index} out of range for {count} tensor factors")]
    FactorOutOfRange { index: usize, count: usize },

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("eigendecomposition did not converge")]
    EigenNoConvergence,

    #[error("problem size {required} exceeds budget {budget}")]
    BudgetExceeded { required: usize, budget: usize },

    #[error("state is not PPT across the requested cut (min eigenvalue {min_eig:.3e})")]
    NotPpt { min_eig: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("solver breakdown: {0}")]
    SolverBreakdown(String),

    #[error("query is infeasible")]
    Infeasible,

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
