//! Single-variable expression trees for the ODE coefficients.
//!
//! An [`Expr`] represents a function of one real variable `x`. It can be
//! parsed from text, evaluated over the complex numbers, differentiated
//! symbolically and lightly simplified. Trees are immutable after
//! construction; every operation here is pure.

mod calculus;
mod parse;

pub use calculus::{differentiate, simplify};
pub use parse::{parse, ParseError};

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Unary functions the expression language knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn apply(self, z: Complex64, at: Complex64) -> Result<Complex64> {
        Ok(match self {
            Func::Exp => z.exp(),
            Func::Ln => {
                if z.norm() == 0.0 {
                    return Err(Error::Domain { what: "ln of zero", x: at });
                }
                z.ln()
            }
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Tan => {
                let c = z.cos();
                if c.norm() == 0.0 {
                    return Err(Error::Domain { what: "tan at odd multiple of pi/2", x: at });
                }
                z.sin() / c
            }
            Func::Sinh => z.sinh(),
            Func::Cosh => z.cosh(),
            Func::Tanh => z.tanh(),
            Func::Sqrt => z.sqrt(),
            Func::Abs => Complex64::new(z.norm(), 0.0),
        })
    }
}

/// Expression tree over a single independent variable `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Constant(f64),
    Variable,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Apply(Func, Box<Expr>),
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Constant(c)
    }

    pub fn variable() -> Expr {
        Expr::Variable
    }

    /// Evaluate at a complex point with standard complex-arithmetic semantics.
    ///
    /// Real inputs through real-only trees come back with zero imaginary
    /// part; integer powers are computed by repeated multiplication so that
    /// e.g. `(-2)^2` stays exactly real.
    pub fn evaluate(&self, x: Complex64) -> Result<Complex64> {
        match self {
            Expr::Constant(c) => Ok(Complex64::new(*c, 0.0)),
            Expr::Variable => Ok(x),
            Expr::Add(a, b) => Ok(a.evaluate(x)? + b.evaluate(x)?),
            Expr::Sub(a, b) => Ok(a.evaluate(x)? - b.evaluate(x)?),
            Expr::Mul(a, b) => Ok(a.evaluate(x)? * b.evaluate(x)?),
            Expr::Div(a, b) => {
                let den = b.evaluate(x)?;
                if den.norm() == 0.0 {
                    return Err(Error::Domain { what: "division by zero", x });
                }
                Ok(a.evaluate(x)? / den)
            }
            Expr::Pow(base, exp) => {
                let b = base.evaluate(x)?;
                let e = exp.evaluate(x)?;
                pow_complex(b, e, x)
            }
            Expr::Neg(a) => Ok(-a.evaluate(x)?),
            Expr::Apply(f, a) => f.apply(a.evaluate(x)?, x),
        }
    }

    /// Evaluate at a real point.
    pub fn eval_real(&self, x: f64) -> Result<Complex64> {
        self.evaluate(Complex64::new(x, 0.0))
    }

    /// True if the tree contains no `Variable` node.
    pub fn is_constant_tree(&self) -> bool {
        match self {
            Expr::Constant(_) => true,
            Expr::Variable => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.is_constant_tree() && b.is_constant_tree(),
            Expr::Neg(a) | Expr::Apply(_, a) => a.is_constant_tree(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Constant(c) if *c < 0.0 => 3, // prints with a leading minus
            Expr::Constant(_) | Expr::Variable | Expr::Apply(..) => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Constant(c) => write!(f, "{c}"),
            Expr::Variable => write!(f, "x"),
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " * ")?;
                b.fmt_prec(f, 3)
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " / ")?;
                b.fmt_prec(f, 3)
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, 3)
            }
            Expr::Pow(a, b) => {
                a.fmt_prec(f, 5)?;
                write!(f, "^")?;
                b.fmt_prec(f, 3)
            }
            Expr::Apply(func, a) => {
                write!(f, "{}(", func.name())?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

/// Printing uses the same grammar the parser accepts, so the output of
/// `to_string` reparses to a structurally identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

fn pow_complex(b: Complex64, e: Complex64, at: Complex64) -> Result<Complex64> {
    if b.norm() == 0.0 {
        // 0^e: defined for Re(e) > 0, conventionally 1 for e = 0.
        if e.norm() == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        if e.im == 0.0 && e.re > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(Error::Domain { what: "zero raised to a nonpositive power", x: at });
    }
    if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() <= i32::MAX as f64 {
        return Ok(b.powi(e.re as i32));
    }
    if b.im == 0.0 && b.re > 0.0 && e.im == 0.0 {
        return Ok(Complex64::new(b.re.powf(e.re), 0.0));
    }
    Ok(b.powc(e))
}

/// Decide whether `e` is constant over `[lo, hi]`.
///
/// Symbolic simplification is tried first; a literal constant is returned
/// exactly. Otherwise the expression is sampled at 64 Chebyshev points and
/// accepted as constant when the spread stays below `tol * (1 + |mean|)`.
pub fn detect_constant(e: &Expr, lo: f64, hi: f64, tol: f64) -> Result<Option<f64>> {
    let simplified = simplify(e);
    if let Expr::Constant(c) = simplified {
        return Ok(Some(c));
    }

    const N: usize = 64;
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut samples = Vec::with_capacity(N);
    for j in 0..N {
        let theta = (2 * j + 1) as f64 * std::f64::consts::PI / (2 * N) as f64;
        let x = mid + half * theta.cos();
        let v = simplified.eval_real(x)?;
        sum += v;
        samples.push(v);
    }
    let mean = sum / N as f64;

    let mut spread_re = (f64::INFINITY, f64::NEG_INFINITY);
    let mut spread_im = (f64::INFINITY, f64::NEG_INFINITY);
    for v in &samples {
        spread_re = (spread_re.0.min(v.re), spread_re.1.max(v.re));
        spread_im = (spread_im.0.min(v.im), spread_im.1.max(v.im));
    }
    let spread = (spread_re.1 - spread_re.0) + (spread_im.1 - spread_im.0);
    let scale = tol * (1.0 + mean.norm());
    if spread <= scale && mean.im.abs() <= scale {
        Ok(Some(mean.re))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests;
