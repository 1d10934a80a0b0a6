use std::fmt;

use thiserror::Error;

/// Why an integrand refused to produce a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainErrorKind {
    /// Logarithm of a value `<= 0`.
    LogNonPositive,
    /// Square root of a negative value.
    SqrtNegative,
    DivisionByZero,
    /// An operation produced an infinity or NaN.
    NonFinite(&'static str),
    /// The point has fewer coordinates than the integrand needs.
    MissingVariable {
        index: usize,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for DomainErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainErrorKind::LogNonPositive => write!(f, "log of a non-positive value"),
            DomainErrorKind::SqrtNegative => write!(f, "sqrt of a negative value"),
            DomainErrorKind::DivisionByZero => write!(f, "division by zero"),
            DomainErrorKind::NonFinite(op) => write!(f, "non-finite result from {op}"),
            DomainErrorKind::MissingVariable { index } => {
                write!(f, "variable x{index} is not bound at this point")
            }
            DomainErrorKind::DimensionMismatch { expected, found } => {
                write!(f, "expected a point of dimension {expected}, got {found}")
            }
        }
    }
}

/// Integrand evaluation failure, carrying the offending point.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at point {point:?}")]
pub struct EvalError {
    pub kind: DomainErrorKind,
    pub point: Vec<f64>,
}

impl EvalError {
    pub fn new(kind: DomainErrorKind, point: &[f64]) -> Self {
        Self {
            kind,
            point: point.to_vec(),
        }
    }
}

/// A real-valued function on `R^n`.
///
/// Implementations must be pure: the same point always yields the same
/// result. `Sync` is required so grids can be evaluated from several threads.
pub trait Integrand: Sync {
    fn eval(&self, point: &[f64]) -> Result<f64, EvalError>;
}

impl<F> Integrand for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        Ok(self(point))
    }
}
