use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the numerical routines.
///
/// Diagnostic payloads are stored as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("series did not converge within {terms} terms")]
    NoConvergence { terms: usize },

    #[error("a term's magnitude exceeds the floating range (log-magnitude {log_magnitude:.3})")]
    OverflowDomain { log_magnitude: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("root finder did not converge after {sweeps} sweeps (residual {residual:.3e})")]
    RootNonConvergence { sweeps: usize, best: Vec<Complex64>, residual: f64 },

    #[error("repeated roots: closest pair at distance {distance:.3e}")]
    RepeatedRoots { distance: f64 },

    #[error("numerator degree {numerator} is not below denominator degree {denominator}")]
    DegreeViolation { numerator: usize, denominator: usize },

    #[error("matrix is singular to working precision (condition estimate {condition:.3e})")]
    SingularMatrix { condition: f64 },

    #[error("samples are not on a uniform grid of spacing {expected}")]
    NonUniformGrid { expected: f64 },

    #[error("characteristic polynomial has a zero root")]
    ZeroRoot,

    #[error("imaginary residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    ConjugacyViolation { residual: f64, tolerance: f64 },

    #[error("equal orders have a constant boundary angle {angle} (units of pi)")]
    DegenerateOrders { angle: f64 },
}

impl Error {
    /// Whether the failure is an input/precondition problem as opposed to a
    /// numerical breakdown.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::DimensionMismatch(_)
                | Error::DegenerateInput(_)
                | Error::DegreeViolation { .. }
                | Error::NonUniformGrid { .. }
                | Error::DegenerateOrders { .. }
        )
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
