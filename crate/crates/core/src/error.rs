use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsstError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("generator is not numerically diagonalizable (condition {kappa:.3e} > cap {cap:.3e})")]
    NotDiagonalizable { kappa: f64, cap: f64 },

    #[error("infeasible tolerance: truncation bound {bound} is not below target {target}")]
    InfeasibleTolerance { bound: f64, target: f64 },

    #[error("signal is identically zero; SNR undefined")]
    UndefinedSignal,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CsstError>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::CsstError::InvalidArgument(format!($($arg)*))
    };
}
pub(crate) use invalid;
