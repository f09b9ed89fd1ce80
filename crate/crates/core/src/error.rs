//! Error type shared by every module, with a stable mapping to CLI exit codes.

use thiserror::Error;

/// Library-wide error type.
///
/// Each variant corresponds to one CLI exit code (see [`Error::exit_code`]);
/// keeping the mapping here means the binary never has to pattern-match on
/// message strings.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated an operation's documented precondition, or a
    /// configuration failed validation. Exit code 2.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A requested computation exceeds a configured resource budget (memory
    /// for sieve windows, work budget for scans). Exit code 3.
    #[error("resource budget exceeded: {0}")]
    ResourceBudget(String),

    /// A quadrature or root-finding loop failed to reach its tolerance within
    /// its iteration/panel budget. Exit code 4.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    /// A statistic is undefined on the given data (e.g. a maximum gap with
    /// fewer than two sign changes). Exit code 5.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Report emission failed. Exits with the generic code 1 (the reserved
    /// codes 2–5 are reserved for the failure classes above).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this failure class: 2 invalid parameters,
    /// 3 resource budget, 4 numerical non-convergence, 5 insufficient data,
    /// 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) => 2,
            Error::ResourceBudget(_) => 3,
            Error::NonConvergence(_) => 4,
            Error::InsufficientData(_) => 5,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand for precondition checks: `ensure!(cond, "msg {}", x)` returns
/// `Error::InvalidParameter` when the condition fails.
#[macro_export]
macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !($cond) {
            return Err($crate::Error::InvalidParameter(format!($($arg)*)));
        }
    };
}
