use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// The inputs are inconsistent or violate a precondition.
    Configuration,
    /// A numerical procedure failed or did not converge.
    Numeric,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A hypothesis of the jellium existence result is not met.
    #[error("hypothesis failure: {0}")]
    Hypothesis(String),

    #[error("numeric failure in {context}: error estimate {estimate:e} after {panels} panels")]
    Quadrature { context: &'static str, estimate: f64, panels: usize },

    /// The contour integral kept an imaginary part; a branch cut was crossed.
    #[error("branch handling: contour result has imaginary part {imag:e} against real part {real:e}")]
    Branch { real: f64, imag: f64 },

    #[error("resource limit: dense dimension {dimension} exceeds budget {budget}; use a smaller grid")]
    Resource { dimension: usize, budget: usize },

    #[error("eigensolver failure: residual {residual:e} exceeds {tolerance:e}")]
    Eigensolver { residual: f64, tolerance: f64 },

    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("no convergence after {iterations} iterations (last step {last_step:e})")]
    NonConvergence { iterations: usize, last_step: f64, ratios: Vec<f64> },

    #[error("iteration diverged at step {iteration}: step norm grew from {first:e} to {current:e}")]
    Divergence { iteration: usize, first: f64, current: f64, ratios: Vec<f64> },

    #[error("non-quadratic regime: Richardson disagreement {disagreement:.3} exceeds {limit:.3}")]
    Regime { disagreement: f64, limit: f64 },

    #[error("solve for initial guess {index} failed: {source}")]
    Member { index: usize, source: Box<Error> },
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidInput(_) | Error::Hypothesis(_) | Error::Resource { .. } => ErrorCategory::Configuration,
            Error::Member { source, .. } => source.category(),
            _ => ErrorCategory::Numeric,
        }
    }

    /// Short module-level label, e.g. `"quadrature"`.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::Hypothesis(_) => "hypothesis",
            Error::Quadrature { .. } => "quadrature",
            Error::Branch { .. } => "branch",
            Error::Resource { .. } => "resource",
            Error::Eigensolver { .. } => "eigensolver",
            Error::Internal(_) => "internal",
            Error::NonConvergence { .. } => "non-convergence",
            Error::Divergence { .. } => "divergence",
            Error::Regime { .. } => "regime",
            Error::Member { source, .. } => source.kind(),
        }
    }
}

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidInput(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
