//! Route selection for a given problem.
//!
//! The discriminant `D(x) = B^2 + 2B' - 4C` decides which closed-form factor
//! construction applies: identically zero, identically a nonzero constant,
//! or neither (numeric Riccati fallback). Exact constant coefficients and a
//! user-supplied complementary solution take precedence over the
//! discriminant routes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::{detect_constant, differentiate, simplify, Expr};
use crate::quadrature::anchored_grid;

/// Closed real interval with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Interval> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidProblem(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Tolerance bundle threaded through the pipeline.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Adaptive quadrature tolerance.
    pub quad: f64,
    /// Abs/rel tolerance of the adaptive steppers.
    pub stepper: f64,
    /// Relative threshold for constancy detection.
    pub const_detect: f64,
    /// Residual threshold for a supplied complementary solution.
    pub residual: f64,
    /// Number of grid points shared by all grid functions.
    pub grid: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { quad: 1e-10, stepper: 1e-10, const_detect: 1e-9, residual: 1e-6, grid: 513 }
    }
}

impl Tolerances {
    /// Same bundle with the quadrature/stepper base tolerance replaced.
    pub fn with_base(mut self, tol: f64) -> Self {
        self.quad = tol;
        self.stepper = tol;
        self
    }
}

/// Initial conditions `y(x0) = y0`, `y'(x0) = yp0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialConditions {
    pub y0: Complex64,
    pub yp0: Complex64,
}

/// A second-order linear problem `y'' + B(x) y' + C(x) y = R(x)` on an
/// interval, with a base point for all definite integrals.
#[derive(Debug, Clone)]
pub struct OdeProblem {
    pub coeff_b: Expr,
    pub coeff_c: Expr,
    pub rhs: Expr,
    pub interval: Interval,
    pub x0: f64,
    pub init: Option<InitialConditions>,
    pub complementary: Option<Expr>,
    pub tol: Tolerances,
}

impl OdeProblem {
    /// Build a problem and verify the coefficients evaluate at every grid
    /// point of the interval.
    pub fn new(
        coeff_b: Expr,
        coeff_c: Expr,
        rhs: Expr,
        interval: Interval,
        x0: f64,
    ) -> Result<OdeProblem> {
        if !interval.contains(x0) {
            return Err(Error::InvalidProblem(format!(
                "base point {x0} outside [{}, {}]",
                interval.lo, interval.hi
            )));
        }
        let p = OdeProblem {
            coeff_b,
            coeff_c,
            rhs,
            interval,
            x0,
            init: None,
            complementary: None,
            tol: Tolerances::default(),
        };
        for (name, e) in [("B", &p.coeff_b), ("C", &p.coeff_c), ("R", &p.rhs)] {
            for &x in &p.grid() {
                e.eval_real(x).map_err(|err| {
                    Error::InvalidProblem(format!("{name}(x) not evaluable: {err}"))
                })?;
            }
        }
        Ok(p)
    }

    pub fn with_initial_conditions(mut self, y0: Complex64, yp0: Complex64) -> Self {
        self.init = Some(InitialConditions { y0, yp0 });
        self
    }

    pub fn with_complementary(mut self, f: Expr) -> Self {
        self.complementary = Some(f);
        self
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    /// The shared evaluation grid (uniform, with `x0` as a node).
    pub fn grid(&self) -> Vec<f64> {
        anchored_grid(self.interval.lo, self.interval.hi, self.tol.grid, self.x0)
    }
}

/// Which factor construction applies.
#[derive(Debug, Clone, PartialEq)]
pub enum Route {
    ConstantCoefficients { b: f64, c: f64 },
    KnownComplementary { f: Expr },
    DiscriminantZero,
    DiscriminantConstant { k: f64 },
    GeneralRiccati,
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::ConstantCoefficients { .. } => "constant",
            Route::KnownComplementary { .. } => "complementary",
            Route::DiscriminantZero => "discriminant-zero",
            Route::DiscriminantConstant { .. } => "discriminant-const",
            Route::GeneralRiccati => "riccati",
        }
    }
}

/// Route decision plus discriminant diagnostics.
#[derive(Debug, Clone)]
pub struct RouteVerdict {
    pub route: Route,
    /// Detected constant value of `D`, when `D` is constant.
    pub d_const: Option<f64>,
    /// Discriminant samples over the interval (diagnostics; empty when the
    /// discriminant could not be evaluated).
    pub d_samples: Vec<f64>,
}

/// `D = B^2 + 2 B' - 4 C`, lightly simplified.
pub fn discriminant(coeff_b: &Expr, coeff_c: &Expr) -> Expr {
    let b2 = Expr::Pow(Box::new(coeff_b.clone()), Box::new(Expr::Constant(2.0)));
    let twice_bp = Expr::Mul(Box::new(Expr::Constant(2.0)), Box::new(differentiate(coeff_b)));
    let four_c = Expr::Mul(Box::new(Expr::Constant(4.0)), Box::new(coeff_c.clone()));
    simplify(&Expr::Sub(
        Box::new(Expr::Add(Box::new(b2), Box::new(twice_bp))),
        Box::new(four_c),
    ))
}

/// Decide the solution route for `p`.
///
/// Precedence: exact constant coefficients, then a supplied complementary
/// solution, then discriminant zero / constant, then the general Riccati
/// fallback. A supplied complementary solution that fails its residual check
/// is an error rather than a silent fallthrough.
///
/// `k` is `D/4`: the shifted Riccati variable `w = Q - B/2` satisfies
/// `w' = w^2 - D/4`, so the quarter discriminant is the constant that the
/// closed-form route needs (the `y'' - y = 0` sanity case, `D = 4`, must
/// produce the basis `e^{x}, e^{-x}`, which requires `k = 1`).
pub fn classify(p: &OdeProblem) -> Result<RouteVerdict> {
    let lo = p.interval.lo;
    let hi = p.interval.hi;
    let tol = p.tol.const_detect;

    let d_expr = discriminant(&p.coeff_b, &p.coeff_c);
    let d_samples: Vec<f64> = (0..64)
        .map(|i| lo + (hi - lo) * i as f64 / 63.0)
        .filter_map(|x| d_expr.eval_real(x).ok().map(|v| v.re))
        .collect();
    let d_const = detect_constant(&d_expr, lo, hi, tol).unwrap_or(None);

    let verdict = |route| RouteVerdict { route, d_const, d_samples: d_samples.clone() };

    // A bad complementary solution is a user error even when another route
    // would win; never ignore it silently.
    if let Some(f) = &p.complementary {
        check_complementary_residual(f, p)?;
    }

    let b_const = detect_constant(&p.coeff_b, lo, hi, tol)?;
    let c_const = detect_constant(&p.coeff_c, lo, hi, tol)?;
    if let (Some(b), Some(c)) = (b_const, c_const) {
        return Ok(verdict(Route::ConstantCoefficients { b, c }));
    }

    if let Some(f) = &p.complementary {
        return Ok(verdict(Route::KnownComplementary { f: f.clone() }));
    }

    if let Some(d) = d_const {
        if d.abs() <= 4.0 * tol {
            return Ok(verdict(Route::DiscriminantZero));
        }
        return Ok(verdict(Route::DiscriminantConstant { k: d / 4.0 }));
    }

    Ok(verdict(Route::GeneralRiccati))
}

/// Numeric residual check of `f'' + B f' + C f` over the grid.
fn check_complementary_residual(f: &Expr, p: &OdeProblem) -> Result<()> {
    let fp = differentiate(f);
    let fpp = simplify(&differentiate(&fp));
    let mut max_residual = 0.0f64;
    let mut scale = 1.0f64;
    for &x in &p.grid() {
        let v_fpp = fpp.eval_real(x)?;
        let v_fp = fp.eval_real(x)?;
        let v_f = f.eval_real(x)?;
        let b = p.coeff_b.eval_real(x)?;
        let c = p.coeff_c.eval_real(x)?;
        let r = v_fpp + b * v_fp + c * v_f;
        max_residual = max_residual.max(r.norm());
        scale = scale.max(v_fpp.norm() + (b * v_fp).norm() + (c * v_f).norm());
    }
    let allowed = p.tol.residual * scale;
    if max_residual > allowed {
        return Err(Error::InvalidComplementary { max_residual, tol: allowed });
    }
    Ok(())
}
