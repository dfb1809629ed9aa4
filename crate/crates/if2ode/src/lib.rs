//! Solve second-order linear ODEs `y'' + B(x) y' + C(x) y = R(x)` by
//! constructing a pair of integrating factors `(g, h)` and evaluating an
//! explicit double-integral solution formula.
//!
//! The factor pair satisfies `g'/g = P`, `h'/h = Q` with `P + Q = B`, where
//! `Q` solves the Riccati equation `Q' = Q^2 - B Q + C`. Five construction
//! routes are supported and selected automatically:
//!
//! * constant coefficients (roots of the characteristic quadratic),
//! * discriminant `B^2 + 2B' - 4C` identically zero,
//! * discriminant identically a nonzero constant,
//! * a user-supplied complementary solution,
//! * numeric integration of the Riccati equation as the general fallback.
//!
//! Every solution is assembled from definite integrals anchored at a base
//! point `x0`, fitted to initial conditions when supplied, and can be checked
//! against an independent Runge-Kutta reference integrator (see [`verify`]).

pub mod classify;
pub mod cli;
pub mod error;
pub mod expr;
pub mod factors;
pub mod quadrature;
pub mod rk;
pub mod solver;
pub mod verify;

pub use classify::{classify, discriminant, Interval, OdeProblem, Route, RouteVerdict, Tolerances};
pub use error::{Error, Result};
pub use expr::{detect_constant, differentiate, parse, simplify, Expr, ParseError};
pub use factors::{FactorPair, RiccatiConfig, RouteTag};
pub use quadrature::{antiderivative, finite_diff, integrate, GridFunction};
pub use solver::{solve, SolveReport, Solution};
pub use verify::VerificationMetrics;
