//! Assemble the general solution from a factor pair and fit constants.
//!
//! With `I_R(x) = Int_{x0}^{x} g R` and `J(x) = Int_{x0}^{x} h/g`, the
//! general solution is
//!
//! ```text
//! y(x) = (1/h) Int_{x0}^{x} (h/g) I_R  +  C1 (1/h) J  +  C2 / h
//! ```
//!
//! and the first derivative has the closed form
//! `y' = (I_R + C1)/g - Q y`, so no numeric differentiation enters the
//! reported solution. Anchoring every integral at `x0` makes the
//! initial-condition system triangular: the `C1` basis function vanishes at
//! `x0` and the `C2` one equals `1/h(x0)`.

use num_complex::Complex64;

use crate::classify::{classify, OdeProblem, Route, RouteVerdict};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::factors::{
    factors_constant, factors_discriminant_const, factors_discriminant_zero,
    factors_from_complementary, factors_riccati, ComplexFn, FactorPair, RiccatiConfig, RouteTag,
};
use crate::quadrature::{antiderivative, GridFunction};
use crate::verify::{self, VerificationMetrics};
use crate::classify::{Interval, Tolerances};

/// Evaluable general solution on the shared grid.
#[derive(Clone)]
pub struct Solution {
    /// The `R`-dependent term (zero constants).
    pub particular: GridFunction,
    /// Kernel of the `C1` term: `(1/h) Int h/g`.
    pub basis_u: GridFunction,
    /// The `C2` term: `1/h`.
    pub basis_v: ComplexFn,
    /// Fitted constants, present when initial conditions were supplied.
    pub c1: Option<Complex64>,
    pub c2: Option<Complex64>,
    /// Cached inner integral `I_R`.
    pub inner_r: GridFunction,
    /// Cached `J = Int h/g`.
    pub j: GridFunction,
    pub route: RouteTag,
}

impl Solution {
    /// `y(x; c1, c2)`.
    pub fn y_at(&self, x: f64, c1: Complex64, c2: Complex64) -> Result<Complex64> {
        Ok(self.particular.value_at(x)
            + c1 * self.basis_u.value_at(x)
            + c2 * (self.basis_v)(x)?)
    }

    /// `y(x)` with the fitted constants (zero when not fitted).
    pub fn y_fitted(&self, x: f64) -> Result<Complex64> {
        self.y_at(x, self.c1.unwrap_or_default(), self.c2.unwrap_or_default())
    }

    pub fn fitted_constants(&self) -> (Complex64, Complex64) {
        (self.c1.unwrap_or_default(), self.c2.unwrap_or_default())
    }
}

impl std::fmt::Debug for Solution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solution")
            .field("route", &self.route)
            .field("c1", &self.c1)
            .field("c2", &self.c2)
            .finish_non_exhaustive()
    }
}

/// Build the particular part and both complementary basis kernels on the
/// shared grid.
pub fn assemble_general(
    fp: &FactorPair,
    rhs: &Expr,
    x0: f64,
    interval: Interval,
    tol: &Tolerances,
) -> Result<Solution> {
    let (lo, hi) = (interval.lo(), interval.hi());
    let g = fp.g.clone();
    let h = fp.h.clone();

    let inner_r = antiderivative(
        {
            let g = g.clone();
            let rhs = rhs.clone();
            move |t| Ok(g(t)? * rhs.eval_real(t)?)
        },
        x0,
        lo,
        hi,
        tol.grid,
        tol.quad,
    )?;

    let ratio = {
        let g = g.clone();
        let h = h.clone();
        move |t: f64| -> Result<Complex64> {
            let gv = g(t)?;
            if gv.norm() == 0.0 {
                return Err(Error::Domain {
                    what: "integrating factor g vanished",
                    x: Complex64::new(t, 0.0),
                });
            }
            Ok(h(t)? / gv)
        }
    };

    let outer = antiderivative(
        {
            let ratio = ratio.clone();
            let inner = inner_r.clone();
            move |t| Ok(ratio(t)? * inner.value_at(t))
        },
        x0,
        lo,
        hi,
        tol.grid,
        tol.quad,
    )?;
    let j = antiderivative(ratio, x0, lo, hi, tol.grid, tol.quad)?;

    let xs = outer.xs().to_vec();
    let mut particular_vals = Vec::with_capacity(xs.len());
    let mut u_vals = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let hv = h(x)?;
        if hv.norm() == 0.0 {
            return Err(Error::Domain {
                what: "integrating factor h vanished",
                x: Complex64::new(x, 0.0),
            });
        }
        particular_vals.push(outer.values()[i] / hv);
        u_vals.push(j.values()[i] / hv);
    }
    let particular = GridFunction::new(xs.clone(), particular_vals)?;
    let basis_u = GridFunction::new(xs, u_vals)?;

    let basis_v: ComplexFn = {
        let h = h.clone();
        std::sync::Arc::new(move |x| {
            let hv = h(x)?;
            if hv.norm() == 0.0 {
                return Err(Error::Domain {
                    what: "integrating factor h vanished",
                    x: Complex64::new(x, 0.0),
                });
            }
            Ok(Complex64::new(1.0, 0.0) / hv)
        })
    };

    Ok(Solution {
        particular,
        basis_u,
        basis_v,
        c1: None,
        c2: None,
        inner_r,
        j,
        route: fp.route,
    })
}

/// Closed-form `y'(x) = (I_R(x) + C1)/g(x) - Q(x) y(x)`.
pub fn derivative_of_solution(
    s: &Solution,
    fp: &FactorPair,
    x: f64,
    c1: Complex64,
    c2: Complex64,
) -> Result<Complex64> {
    let gv = (fp.g)(x)?;
    if gv.norm() == 0.0 {
        return Err(Error::Domain {
            what: "integrating factor g vanished",
            x: Complex64::new(x, 0.0),
        });
    }
    let y = s.y_at(x, c1, c2)?;
    Ok((s.inner_r.value_at(x) + c1) / gv - (fp.q)(x)? * y)
}

/// Fit `(C1, C2)` to `y(x0) = y0`, `y'(x0) = yp0`.
pub fn apply_initial_conditions(
    s: &Solution,
    fp: &FactorPair,
    y0: Complex64,
    yp0: Complex64,
    x0: f64,
) -> Result<(Complex64, Complex64)> {
    let u0 = s.basis_u.value_at(x0);
    let v0 = (s.basis_v)(x0)?;
    let p0 = s.particular.value_at(x0);
    let g0 = (fp.g)(x0)?;
    let q0 = (fp.q)(x0)?;
    let ir0 = s.inner_r.value_at(x0);

    // derivatives of the three components from the closed form
    let up0 = Complex64::new(1.0, 0.0) / g0 - q0 * u0;
    let vp0 = -q0 * v0;
    let pp0 = ir0 / g0 - q0 * p0;

    let det = u0 * vp0 - v0 * up0;
    let scale = (u0 * vp0).norm() + (v0 * up0).norm();
    if det.norm() < 1e-12 * (1.0 + scale) {
        return Err(Error::SingularSystem { det_mag: det.norm() });
    }
    let ry = y0 - p0;
    let rp = yp0 - pp0;
    let c1 = (ry * vp0 - v0 * rp) / det;
    let c2 = (u0 * rp - ry * up0) / det;
    Ok((c1, c2))
}

/// Solve configuration: Riccati settings plus an optional route override.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveConfig {
    pub riccati: RiccatiConfig,
    pub force: Option<RouteTag>,
}

/// Full pipeline output.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: Solution,
    pub verdict: RouteVerdict,
    pub route_used: RouteTag,
    pub factors: FactorPair,
    pub metrics: VerificationMetrics,
    pub warnings: Vec<String>,
}

/// Classify, build factors (with the documented fallbacks), assemble the
/// general solution, fit initial conditions when present, and attach
/// verification metrics.
pub fn solve(p: &OdeProblem, cfg: &SolveConfig) -> Result<SolveReport> {
    let verdict = classify(p)?;
    let mut warnings = Vec::new();
    let riccati_cfg = RiccatiConfig { tol: p.tol.stepper, ..cfg.riccati };

    let fp = match cfg.force {
        Some(tag) => {
            if tag != route_tag(&verdict.route) {
                warnings.push(format!(
                    "route forced to {} (classifier chose {})",
                    tag.name(),
                    verdict.route.name()
                ));
            }
            build_forced(p, &verdict, tag, &riccati_cfg)?
        }
        None => match &verdict.route {
            Route::ConstantCoefficients { b, c } => factors_constant(*b, *c, p.x0),
            Route::KnownComplementary { f } => {
                factors_from_complementary(f, &p.coeff_b, p.x0, p.interval, &p.tol)?
            }
            Route::DiscriminantZero => {
                factors_discriminant_zero(&p.coeff_b, p.x0, p.interval, &p.tol)?
            }
            Route::DiscriminantConstant { k } => {
                match factors_discriminant_const(&p.coeff_b, *k, p.x0, p.interval, &p.tol) {
                    Ok(fp) => fp,
                    Err(Error::IntervalTooLong { len, max }) => {
                        warnings.push(format!(
                            "constant-discriminant route needs interval < {max:.6} (got {len}); \
                             falling back to the numeric Riccati route"
                        ));
                        factors_riccati(
                            &p.coeff_b,
                            &p.coeff_c,
                            &riccati_cfg,
                            p.x0,
                            p.interval,
                            &p.tol,
                        )?
                    }
                    Err(e) => return Err(e),
                }
            }
            Route::GeneralRiccati => {
                factors_riccati(&p.coeff_b, &p.coeff_c, &riccati_cfg, p.x0, p.interval, &p.tol)?
            }
        },
    };
    let route_used = fp.route;

    let mut solution = assemble_general(&fp, &p.rhs, p.x0, p.interval, &p.tol)?;
    if let Some(ic) = p.init {
        let (c1, c2) = apply_initial_conditions(&solution, &fp, ic.y0, ic.yp0, p.x0)?;
        solution.c1 = Some(c1);
        solution.c2 = Some(c2);
    } else {
        warnings.push("no initial conditions supplied; samples use C1 = C2 = 0".into());
    }

    let metrics = verify::solution_metrics(&solution, &fp, p)?;
    let scale = 1.0 + max_abs_y(&solution, p)?;
    if metrics.imag_residue > 1e-8 * scale {
        warnings.push(format!(
            "imaginary residue {:.3e} exceeds 1e-8 of the solution scale",
            metrics.imag_residue
        ));
    }

    Ok(SolveReport { solution, verdict, route_used, factors: fp, metrics, warnings })
}

fn max_abs_y(s: &Solution, p: &OdeProblem) -> Result<f64> {
    let mut m = 0.0f64;
    for &x in &p.grid() {
        m = m.max(s.y_fitted(x)?.norm());
    }
    Ok(m)
}

fn route_tag(route: &Route) -> RouteTag {
    match route {
        Route::ConstantCoefficients { .. } => RouteTag::Constant,
        Route::KnownComplementary { .. } => RouteTag::Complementary,
        Route::DiscriminantZero => RouteTag::DiscriminantZero,
        Route::DiscriminantConstant { .. } => RouteTag::DiscriminantConst,
        Route::GeneralRiccati => RouteTag::Riccati,
    }
}

fn build_forced(
    p: &OdeProblem,
    verdict: &RouteVerdict,
    tag: RouteTag,
    riccati_cfg: &RiccatiConfig,
) -> Result<FactorPair> {
    match tag {
        RouteTag::Constant => {
            let b = crate::expr::detect_constant(
                &p.coeff_b,
                p.interval.lo(),
                p.interval.hi(),
                p.tol.const_detect,
            )?
            .ok_or_else(|| Error::InvalidProblem("forced constant route: B is not constant".into()))?;
            let c = crate::expr::detect_constant(
                &p.coeff_c,
                p.interval.lo(),
                p.interval.hi(),
                p.tol.const_detect,
            )?
            .ok_or_else(|| Error::InvalidProblem("forced constant route: C is not constant".into()))?;
            Ok(factors_constant(b, c, p.x0))
        }
        RouteTag::DiscriminantZero => {
            factors_discriminant_zero(&p.coeff_b, p.x0, p.interval, &p.tol)
        }
        RouteTag::DiscriminantConst => {
            let k = verdict.d_const.map(|d| d / 4.0).ok_or_else(|| {
                Error::InvalidProblem("forced constant-discriminant route: D is not constant".into())
            })?;
            factors_discriminant_const(&p.coeff_b, k, p.x0, p.interval, &p.tol)
        }
        RouteTag::Complementary => {
            let f = p.complementary.as_ref().ok_or_else(|| {
                Error::InvalidProblem("forced complementary route: no f supplied".into())
            })?;
            factors_from_complementary(f, &p.coeff_b, p.x0, p.interval, &p.tol)
        }
        RouteTag::Riccati => {
            factors_riccati(&p.coeff_b, &p.coeff_c, riccati_cfg, p.x0, p.interval, &p.tol)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::Interval;
    use crate::expr::parse;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn problem(b: &str, cc: &str, r: &str, lo: f64, hi: f64, x0: f64) -> OdeProblem {
        OdeProblem::new(
            parse(b).unwrap(),
            parse(cc).unwrap(),
            parse(r).unwrap(),
            Interval::new(lo, hi).unwrap(),
            x0,
        )
        .unwrap()
    }

    /// Factor pair with g = e^{-x}, h = e^{x} (the P = -1, Q = 1 split of
    /// y'' - y = 0).
    fn swapped_oscillator_pair() -> FactorPair {
        use std::sync::Arc;
        FactorPair {
            g: Arc::new(|x| Ok(c((-x).exp()))),
            h: Arc::new(|x| Ok(c(x.exp()))),
            p: Arc::new(|_| Ok(c(-1.0))),
            q: Arc::new(|_| Ok(c(1.0))),
            route: RouteTag::Constant,
            riccati_shift: None,
            free_constant: None,
            riccati_grid: None,
        }
    }

    #[test]
    fn particular_of_forced_oscillator() {
        // y'' - y = x with the g = e^{-x}, h = e^{x} pair: particular is
        // sinh(x) - x.
        let fp = swapped_oscillator_pair();
        let interval = Interval::new(0.0, 2.0).unwrap();
        let sol =
            assemble_general(&fp, &parse("x").unwrap(), 0.0, interval, &Tolerances::default())
                .unwrap();
        let want = 1.0f64.sinh() - 1.0;
        assert_abs_diff_eq!(sol.particular.value_at(1.0).re, want, epsilon = 1e-8);
        // derivative of the particular part at 0 is 0
        let d = derivative_of_solution(&sol, &fp, 0.0, c(0.0), c(0.0)).unwrap();
        assert_abs_diff_eq!(d.re, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn zero_rhs_gives_exactly_zero_particular() {
        let fp = swapped_oscillator_pair();
        let interval = Interval::new(0.0, 2.0).unwrap();
        let sol =
            assemble_general(&fp, &parse("0").unwrap(), 0.0, interval, &Tolerances::default())
                .unwrap();
        assert!(sol.particular.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn repeated_root_basis() {
        // B = 2, C = 1: g = h = e^{x}; basis_u = e^{-x}(x - x0)
        let fp = factors_constant(2.0, 1.0, 0.0);
        let interval = Interval::new(0.0, 2.0).unwrap();
        let sol =
            assemble_general(&fp, &parse("0").unwrap(), 0.0, interval, &Tolerances::default())
                .unwrap();
        assert_abs_diff_eq!(
            sol.basis_u.value_at(1.5).re,
            1.5 * (-1.5f64).exp(),
            epsilon = 1e-9
        );
        assert_abs_diff_eq!((sol.basis_v)(1.5).unwrap().re, (-1.5f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn solution_is_affine_in_constants() {
        let fp = swapped_oscillator_pair();
        let interval = Interval::new(0.0, 2.0).unwrap();
        let sol =
            assemble_general(&fp, &parse("x").unwrap(), 0.0, interval, &Tolerances::default())
                .unwrap();
        let x = 1.3;
        let base = sol.y_at(x, c(0.0), c(0.0)).unwrap();
        let du = sol.y_at(x, c(1.0), c(0.0)).unwrap() - base;
        let dv = sol.y_at(x, c(0.0), c(1.0)).unwrap() - base;
        let (a, b) = (c(2.5), c(-0.75));
        let combo = sol.y_at(x, a, b).unwrap();
        assert_abs_diff_eq!((combo - (base + a * du + b * dv)).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn initial_conditions_are_triangular_at_base_point() {
        let fp = swapped_oscillator_pair();
        let interval = Interval::new(0.0, 2.0).unwrap();
        let sol =
            assemble_general(&fp, &parse("0").unwrap(), 0.0, interval, &Tolerances::default())
                .unwrap();
        // y(0) = 0, y'(0) = 1 picks sinh: C1 = 1, C2 = 0
        let (c1, c2) = apply_initial_conditions(&sol, &fp, c(0.0), c(1.0), 0.0).unwrap();
        assert_abs_diff_eq!((c1 - c(1.0)).norm(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(c2.norm(), 0.0, epsilon = 1e-10);
        let y1 = sol.y_at(1.0, c1, c2).unwrap();
        assert_abs_diff_eq!(y1.re, 1.0f64.sinh(), epsilon = 1e-8);
    }

    #[test]
    fn derivative_identity_for_pure_basis_v() {
        // y = 1/h has y' = -Q/h
        let fp = factors_constant(3.0, 2.0, 0.0);
        let interval = Interval::new(0.0, 2.0).unwrap();
        let sol =
            assemble_general(&fp, &parse("0").unwrap(), 0.0, interval, &Tolerances::default())
                .unwrap();
        let x = 0.8;
        let d = derivative_of_solution(&sol, &fp, x, c(0.0), c(1.0)).unwrap();
        let want = -(fp.q)(x).unwrap() * (sol.basis_v)(x).unwrap();
        assert_abs_diff_eq!((d - want).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn solve_constant_coefficients_end_to_end() {
        let p = problem("3", "2", "0", 0.0, 2.0, 0.0).with_initial_conditions(c(1.0), c(-1.0));
        let report = solve(&p, &SolveConfig::default()).unwrap();
        assert_eq!(report.route_used, RouteTag::Constant);
        let y1 = report.solution.y_fitted(1.0).unwrap();
        assert_abs_diff_eq!(y1.re, (-1.0f64).exp(), epsilon = 1e-8);
        assert!(y1.im.abs() < 1e-10);
    }

    #[test]
    fn solve_particular_already_fits_zero_conditions() {
        // y'' - y = x with zero conditions: sinh x - x needs C1 = C2 = 0
        let p = problem("0", "-1", "x", 0.0, 2.0, 0.0).with_initial_conditions(c(0.0), c(0.0));
        let report = solve(&p, &SolveConfig::default()).unwrap();
        let (c1, c2) = report.solution.fitted_constants();
        assert!(c1.norm() < 1e-9 && c2.norm() < 1e-9, "got C1={c1}, C2={c2}");
        assert_abs_diff_eq!(
            report.solution.y_fitted(1.0).unwrap().re,
            1.0f64.sinh() - 1.0,
            epsilon = 1e-7
        );
    }

    #[test]
    fn solve_with_known_complementary_solution() {
        let p = problem("-2/x", "2/x^2", "0", 1.0, 3.0, 1.0)
            .with_initial_conditions(c(1.0), c(2.0))
            .with_complementary(parse("x").unwrap());
        let report = solve(&p, &SolveConfig::default()).unwrap();
        assert_eq!(report.route_used, RouteTag::Complementary);
        assert_abs_diff_eq!(report.solution.y_fitted(2.0).unwrap().re, 4.0, epsilon = 1e-7);
    }

    #[test]
    fn solve_discriminant_zero_gaussian() {
        let p = problem("2*x", "x^2+1", "0", 0.0, 2.0, 0.0).with_initial_conditions(c(1.0), c(0.0));
        let report = solve(&p, &SolveConfig::default()).unwrap();
        assert_eq!(report.route_used, RouteTag::DiscriminantZero);
        assert_abs_diff_eq!(
            report.solution.y_fitted(1.0).unwrap().re,
            (-0.5f64).exp(),
            epsilon = 1e-7
        );
    }

    #[test]
    fn riccati_blow_up_propagates_with_location() {
        let p = problem("0", "1", "0", 0.0, 2.0, 0.0).with_initial_conditions(c(0.0), c(1.0));
        let cfg = SolveConfig { force: Some(RouteTag::Riccati), ..Default::default() };
        match solve(&p, &cfg) {
            Err(Error::SingularityDetected { x }) => {
                assert!((x - std::f64::consts::FRAC_PI_2).abs() < 0.05);
            }
            other => panic!("expected SingularityDetected, got {other:?}"),
        }
    }

    #[test]
    fn interval_too_long_falls_back_to_riccati() {
        // D = 4k with k = -1 but the interval is longer than pi: the
        // closed-form route is impossible and every real Riccati start hits
        // a movable pole, which must be reported with a suggestion.
        let p = problem("2*x", "x^2+2", "0", 0.0, 4.0, 0.0).with_initial_conditions(c(1.0), c(0.0));
        match solve(&p, &SolveConfig::default()) {
            Err(Error::SingularityDetected { .. }) => {}
            Ok(report) => {
                assert_eq!(report.route_used, RouteTag::Riccati);
                assert!(report.warnings.iter().any(|w| w.contains("falling back")));
            }
            other => panic!("expected fallback or pole report, got {other:?}"),
        }
    }

    #[test]
    fn superposition_of_right_hand_sides() {
        let tol = 1e-7;
        let mk = |r: &str| {
            let p = problem("0", "-1", r, 0.0, 2.0, 0.0).with_initial_conditions(c(0.0), c(0.0));
            solve(&p, &SolveConfig::default()).unwrap()
        };
        let r1 = mk("x");
        let r2 = mk("exp(x)");
        let sum = mk("x + exp(x)");
        for i in 0..=16 {
            let x = 0.125 * i as f64;
            let lhs = sum.solution.particular.value_at(x);
            let rhs = r1.solution.particular.value_at(x) + r2.solution.particular.value_at(x);
            assert!((lhs - rhs).norm() <= tol, "superposition failed at {x}");
        }
    }
}
