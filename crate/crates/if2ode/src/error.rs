//! Crate-wide error type shared by the numeric pipeline.
//!
//! Parsing has its own [`crate::expr::ParseError`] (it carries source
//! offsets); everything downstream of parsing funnels into [`Error`] so
//! closures, quadrature, steppers and the solver compose without generic
//! error parameters.

use std::fmt;

use num_complex::Complex64;

use crate::expr::ParseError;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by evaluation, quadrature, factor construction and solving.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Expression text failed to parse.
    Parse(ParseError),
    /// Evaluation hit a domain error (division by zero, ln of zero) at `x`.
    Domain { what: &'static str, x: Complex64 },
    /// Adaptive quadrature exhausted its subdivision budget.
    ToleranceNotMet { achieved: f64, requested: f64 },
    /// A point fell outside the range a grid function can serve.
    OutOfRange { x: f64, lo: f64, hi: f64 },
    /// The Riccati variable exceeded the blow-up threshold near `x`.
    SingularityDetected { x: f64 },
    /// Trigonometric factor must vanish somewhere on an interval this long.
    IntervalTooLong { len: f64, max: f64 },
    /// A supplied complementary solution vanishes inside the interval.
    ZeroOnInterval { x: f64 },
    /// A supplied complementary solution does not satisfy the homogeneous equation.
    InvalidComplementary { max_residual: f64, tol: f64 },
    /// The 2x2 initial-condition system is numerically singular.
    SingularSystem { det_mag: f64 },
    /// The adaptive stepper could not continue near `x`.
    StepFailure { x: f64 },
    /// Problem construction or configuration rejected the inputs.
    InvalidProblem(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(e) => write!(f, "parse error: {e}"),
            Error::Domain { what, x } => {
                if x.im == 0.0 {
                    write!(f, "domain error: {what} at x = {}", x.re)
                } else {
                    write!(f, "domain error: {what} at x = {x}")
                }
            }
            Error::ToleranceNotMet { achieved, requested } => write!(
                f,
                "quadrature tolerance not met: achieved {achieved:.3e}, requested {requested:.3e}"
            ),
            Error::OutOfRange { x, lo, hi } => {
                write!(f, "x = {x} outside usable range [{lo}, {hi}]")
            }
            Error::SingularityDetected { x } => write!(
                f,
                "SingularityDetected near x = {x:.6}; try --riccati-q0 <other value>"
            ),
            Error::IntervalTooLong { len, max } => write!(
                f,
                "interval of length {len} cannot carry a zero-free trigonometric factor (limit {max:.6})"
            ),
            Error::ZeroOnInterval { x } => write!(
                f,
                "complementary solution vanishes near x = {x}; shrink the interval"
            ),
            Error::InvalidComplementary { max_residual, tol } => write!(
                f,
                "supplied complementary solution fails the homogeneous equation: max residual {max_residual:.3e} > {tol:.3e}"
            ),
            Error::SingularSystem { det_mag } => write!(
                f,
                "initial-condition system is singular (|det| = {det_mag:.3e})"
            ),
            Error::StepFailure { x } => write!(f, "adaptive stepper failed near x = {x}"),
            Error::InvalidProblem(msg) => write!(f, "invalid problem: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}
