//! Construction of the integrating-factor pair `(g, h)`.
//!
//! The pair satisfies `g' = g P`, `h' = h Q`, `(g Q)' = g C` with
//! `P + Q = B`, which forces `Q' = Q^2 - B Q + C` (a Riccati equation).
//! Each route below produces the same contract by a different path:
//!
//! * constant coefficients: `P`, `Q` are the roots of `r^2 - B r + C`;
//! * discriminant zero: the shifted variable `w = Q - B/2` satisfies
//!   `w' = w^2`, solved by `w = -1/(x+c)`;
//! * constant discriminant `4k`: `w' = w^2 - k`, solved by a hyperbolic
//!   (or, for `k < 0`, trigonometric) cotangent;
//! * known complementary solution `f`: `h = 1/f`, `g = f e^{Int B}`;
//! * general: integrate the Riccati equation numerically from `q0`.
//!
//! All integrals are anchored at the base point `x0`, so `g(x)h(x)` always
//! equals `e^{Int_{x0}^{x} B}`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::classify::{Interval, Tolerances};
use crate::error::{Error, Result};
use crate::expr::{differentiate, simplify, Expr};
use crate::quadrature::{anchored_grid, antiderivative, GridFunction};
use crate::rk::{integrate_dense, StepperOptions};

/// Evaluable complex-valued function of a real argument.
pub type ComplexFn = Arc<dyn Fn(f64) -> Result<Complex64> + Send + Sync>;

/// Which construction produced a factor pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteTag {
    Constant,
    DiscriminantZero,
    DiscriminantConst,
    Complementary,
    Riccati,
}

impl RouteTag {
    pub fn name(self) -> &'static str {
        match self {
            RouteTag::Constant => "constant",
            RouteTag::DiscriminantZero => "discriminant-zero",
            RouteTag::DiscriminantConst => "discriminant-const",
            RouteTag::Complementary => "complementary",
            RouteTag::Riccati => "riccati",
        }
    }
}

/// The integrating factors `g`, `h` and the split `P + Q = B`.
#[derive(Clone)]
pub struct FactorPair {
    pub g: ComplexFn,
    pub h: ComplexFn,
    pub p: ComplexFn,
    pub q: ComplexFn,
    pub route: RouteTag,
    /// The shifted Riccati variable `Q - B/2` on the closed-form variable
    /// coefficient routes.
    pub riccati_shift: Option<ComplexFn>,
    /// The free constant `c` chosen by the closed-form routes.
    pub free_constant: Option<f64>,
    /// Numeric `Q` samples on the general route.
    pub riccati_grid: Option<GridFunction>,
}

impl std::fmt::Debug for FactorPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FactorPair")
            .field("route", &self.route)
            .field("free_constant", &self.free_constant)
            .finish_non_exhaustive()
    }
}

/// Settings for the numeric Riccati route.
#[derive(Debug, Clone, Copy)]
pub struct RiccatiConfig {
    /// Initial value `Q(x0)`. Any pole-free particular solution works; the
    /// default 0 is exposed as a CLI flag because poles are data-dependent.
    pub q0: f64,
    /// Magnitude threshold that counts as a blow-up.
    pub blow_up: f64,
    /// Stepper abs/rel tolerance.
    pub tol: f64,
}

impl Default for RiccatiConfig {
    fn default() -> Self {
        RiccatiConfig { q0: 0.0, blow_up: 1e6, tol: 1e-10 }
    }
}

/// Right-hand side of the Riccati equation `Q' = Q^2 - B Q + C`.
pub fn riccati_rhs(q: Complex64, bx: Complex64, cx: Complex64) -> Complex64 {
    q * q - bx * q + cx
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn expr_fn(e: &Expr) -> ComplexFn {
    let e = e.clone();
    Arc::new(move |x| e.eval_real(x))
}

/// `e^{Int_{x0}^{x} integrand}` backed by a cumulative grid.
fn grid_exp(grid: Arc<GridFunction>) -> ComplexFn {
    Arc::new(move |x| Ok(grid.value_at(x).exp()))
}

/// Factors for constant coefficients: `P`, `Q` are the roots of
/// `r^2 - B r + C = 0` (principal square root, complex roots allowed), and
/// the exponentials are anchored so `g(x0) = h(x0) = 1`.
pub fn factors_constant(b: f64, c: f64, x0: f64) -> FactorPair {
    let s = Complex64::new(b * b - 4.0 * c, 0.0).sqrt();
    let p = (real(b) + s) / 2.0;
    let q = (real(b) - s) / 2.0;
    let g: ComplexFn = Arc::new(move |x| Ok((p * (x - x0)).exp()));
    let h: ComplexFn = Arc::new(move |x| Ok((q * (x - x0)).exp()));
    FactorPair {
        g,
        h,
        p: Arc::new(move |_| Ok(p)),
        q: Arc::new(move |_| Ok(q)),
        route: RouteTag::Constant,
        riccati_shift: Some(Arc::new(move |_| Ok(-s / 2.0))),
        free_constant: None,
        riccati_grid: None,
    }
}

/// Factors when `B^2 + 2B' - 4C = 0`: the shift solves `w' = w^2`, so
/// `w = -1/(x+c)` with `c = 1 - a` keeping the pole strictly left of the
/// interval.
pub fn factors_discriminant_zero(
    coeff_b: &Expr,
    x0: f64,
    interval: Interval,
    tol: &Tolerances,
) -> Result<FactorPair> {
    let c = 1.0 - interval.lo();
    let half_b = half_b_integral(coeff_b, x0, interval, tol)?;
    let b_fn = expr_fn(coeff_b);

    let e = grid_exp(half_b.clone());
    let g: ComplexFn = {
        let e = e.clone();
        Arc::new(move |x| Ok(real(x + c) * e(x)?))
    };
    let h: ComplexFn = {
        let e = e.clone();
        Arc::new(move |x| Ok(e(x)? / real(x + c)))
    };
    let p: ComplexFn = {
        let b_fn = b_fn.clone();
        Arc::new(move |x| Ok(b_fn(x)? / 2.0 + real(1.0 / (x + c))))
    };
    let q: ComplexFn = {
        let b_fn = b_fn.clone();
        Arc::new(move |x| Ok(b_fn(x)? / 2.0 - real(1.0 / (x + c))))
    };
    Ok(FactorPair {
        g,
        h,
        p,
        q,
        route: RouteTag::DiscriminantZero,
        riccati_shift: Some(Arc::new(move |x| Ok(real(-1.0 / (x + c))))),
        free_constant: Some(c),
        riccati_grid: None,
    })
}

/// Factors when `B^2 + 2B' - 4C = 4k`, `k != 0`: the shift solves
/// `w' = w^2 - k`, giving `w = -s (e^{s(x+c)} + e^{-s(x+c)}) / (e^{s(x+c)} -
/// e^{-s(x+c)})` with `s = sqrt(k)`.
///
/// `c` is chosen deterministically so the denominator has no zero on the
/// interval. For `k > 0` the only zero sits at `x = -c = a - 1`. For `k < 0`
/// the zeros are spaced `pi/|s|` apart, so they are centered around the
/// interval midpoint; an interval at least that long cannot avoid one and
/// the caller must fall back to the general route.
pub fn factors_discriminant_const(
    coeff_b: &Expr,
    k: f64,
    x0: f64,
    interval: Interval,
    tol: &Tolerances,
) -> Result<FactorPair> {
    if k == 0.0 {
        return Err(Error::InvalidProblem("constant-discriminant route needs k != 0".into()));
    }
    let s = Complex64::new(k, 0.0).sqrt();
    let c = if k > 0.0 {
        1.0 - interval.lo()
    } else {
        let sigma = (-k).sqrt();
        let max_len = std::f64::consts::PI / sigma;
        if interval.len() >= max_len {
            return Err(Error::IntervalTooLong { len: interval.len(), max: max_len });
        }
        0.5 * max_len - interval.midpoint()
    };

    let w = move |x: f64| {
        let arg = s * (x + c);
        arg.exp() - (-arg).exp()
    };
    let wp = move |x: f64| {
        let arg = s * (x + c);
        s * (arg.exp() + (-arg).exp())
    };

    let half_b = half_b_integral(coeff_b, x0, interval, tol)?;
    let b_fn = expr_fn(coeff_b);
    let e = grid_exp(half_b.clone());

    let g: ComplexFn = {
        let e = e.clone();
        Arc::new(move |x| Ok(e(x)? * w(x)))
    };
    let h: ComplexFn = {
        let e = e.clone();
        Arc::new(move |x| Ok(e(x)? / w(x)))
    };
    let p: ComplexFn = {
        let b_fn = b_fn.clone();
        Arc::new(move |x| Ok(b_fn(x)? / 2.0 + wp(x) / w(x)))
    };
    let q: ComplexFn = {
        let b_fn = b_fn.clone();
        Arc::new(move |x| Ok(b_fn(x)? / 2.0 - wp(x) / w(x)))
    };
    Ok(FactorPair {
        g,
        h,
        p,
        q,
        route: RouteTag::DiscriminantConst,
        riccati_shift: Some(Arc::new(move |x| Ok(-wp(x) / w(x)))),
        free_constant: Some(c),
        riccati_grid: None,
    })
}

/// Factors from a known complementary solution: `h = 1/f`,
/// `g = f e^{Int B}`. Fails if `f` has a zero on the interval.
pub fn factors_from_complementary(
    f: &Expr,
    coeff_b: &Expr,
    x0: f64,
    interval: Interval,
    tol: &Tolerances,
) -> Result<FactorPair> {
    let grid = anchored_grid(interval.lo(), interval.hi(), tol.grid, x0);
    let mut max_mag = 0.0f64;
    let samples: Vec<Complex64> =
        grid.iter().map(|&x| f.eval_real(x)).collect::<Result<Vec<_>>>()?;
    for v in &samples {
        max_mag = max_mag.max(v.norm());
    }
    let zero_tol = 1e-12 * (1.0 + max_mag);
    for (i, v) in samples.iter().enumerate() {
        if v.norm() <= zero_tol {
            return Err(Error::ZeroOnInterval { x: grid[i] });
        }
        if i > 0 && v.im.abs() <= zero_tol && samples[i - 1].im.abs() <= zero_tol {
            // real sign change between adjacent samples
            if samples[i - 1].re.signum() != v.re.signum() {
                return Err(Error::ZeroOnInterval { x: 0.5 * (grid[i - 1] + grid[i]) });
            }
        }
    }

    let full_b = Arc::new(antiderivative(
        {
            let b = coeff_b.clone();
            move |t| b.eval_real(t)
        },
        x0,
        interval.lo(),
        interval.hi(),
        tol.grid,
        tol.quad,
    )?);
    let eb = grid_exp(full_b);
    let f_fn = expr_fn(f);
    let fp = simplify(&differentiate(f));
    let fp_fn = expr_fn(&fp);
    let b_fn = expr_fn(coeff_b);

    let h: ComplexFn = {
        let f_fn = f_fn.clone();
        Arc::new(move |x| {
            let v = f_fn(x)?;
            if v.norm() == 0.0 {
                return Err(Error::Domain { what: "complementary solution zero", x: real(x) });
            }
            Ok(real(1.0) / v)
        })
    };
    let g: ComplexFn = {
        let f_fn = f_fn.clone();
        Arc::new(move |x| Ok(f_fn(x)? * eb(x)?))
    };
    let q: ComplexFn = {
        let f_fn = f_fn.clone();
        let fp_fn = fp_fn.clone();
        Arc::new(move |x| Ok(-fp_fn(x)? / f_fn(x)?))
    };
    let p: ComplexFn = {
        Arc::new(move |x| Ok(b_fn(x)? + fp_fn(x)? / f_fn(x)?))
    };
    Ok(FactorPair {
        g,
        h,
        p,
        q,
        route: RouteTag::Complementary,
        riccati_shift: None,
        free_constant: None,
        riccati_grid: None,
    })
}

/// General route: integrate `Q' = Q^2 - B Q + C` from `(x0, q0)` in both
/// directions, then `h = e^{Int Q}` and `g = e^{Int B - Int Q}`.
///
/// Riccati solutions have movable poles; a magnitude past `cfg.blow_up`
/// aborts with the approximate pole location so the caller can suggest a
/// different `q0`.
pub fn factors_riccati(
    coeff_b: &Expr,
    coeff_c: &Expr,
    cfg: &RiccatiConfig,
    x0: f64,
    interval: Interval,
    tol: &Tolerances,
) -> Result<FactorPair> {
    let rhs = {
        let b = coeff_b.clone();
        let c = coeff_c.clone();
        move |t: f64, y: &[Complex64; 1]| -> Result<[Complex64; 1]> {
            Ok([riccati_rhs(y[0], b.eval_real(t)?, c.eval_real(t)?)])
        }
    };
    let opts = StepperOptions { abs_tol: cfg.tol, rel_tol: cfg.tol, guard: Some(cfg.blow_up) };
    let q_init = [real(cfg.q0)];

    let forward = integrate_dense(&rhs, x0, interval.hi(), q_init, opts)?;
    let backward = integrate_dense(&rhs, x0, interval.lo(), q_init, opts)?;

    let xs = anchored_grid(interval.lo(), interval.hi(), tol.grid, x0);
    let q_values: Vec<Complex64> = xs
        .iter()
        .map(|&x| if x >= x0 { forward.eval(x)[0] } else { backward.eval(x)[0] })
        .collect();
    let q_grid = GridFunction::new(xs, q_values)?;
    let q_arc = Arc::new(q_grid.clone());

    let int_q = Arc::new(antiderivative(
        {
            let q = q_arc.clone();
            move |t| Ok(q.value_at(t))
        },
        x0,
        interval.lo(),
        interval.hi(),
        tol.grid,
        tol.quad,
    )?);
    let int_b = Arc::new(antiderivative(
        {
            let b = coeff_b.clone();
            move |t| b.eval_real(t)
        },
        x0,
        interval.lo(),
        interval.hi(),
        tol.grid,
        tol.quad,
    )?);

    let h = grid_exp(int_q.clone());
    let g: ComplexFn = {
        let int_q = int_q.clone();
        let int_b = int_b.clone();
        Arc::new(move |x| Ok((int_b.value_at(x) - int_q.value_at(x)).exp()))
    };
    let q: ComplexFn = {
        let q = q_arc.clone();
        Arc::new(move |x| Ok(q.value_at(x)))
    };
    let p: ComplexFn = {
        let b_fn = expr_fn(coeff_b);
        let q = q_arc.clone();
        Arc::new(move |x| Ok(b_fn(x)? - q.value_at(x)))
    };
    Ok(FactorPair {
        g,
        h,
        p,
        q,
        route: RouteTag::Riccati,
        riccati_shift: None,
        free_constant: None,
        riccati_grid: Some(q_grid),
    })
}

/// Cumulative `Int_{x0}^{x} B/2` shared by the two discriminant routes.
fn half_b_integral(
    coeff_b: &Expr,
    x0: f64,
    interval: Interval,
    tol: &Tolerances,
) -> Result<Arc<GridFunction>> {
    let b = coeff_b.clone();
    Ok(Arc::new(antiderivative(
        move |t| Ok(b.eval_real(t)? / 2.0),
        x0,
        interval.lo(),
        interval.hi(),
        tol.grid,
        tol.quad,
    )?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use approx::assert_abs_diff_eq;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn riccati_rhs_fixed_points() {
        // q = 1 is a fixed point of q' = q^2 - 1
        assert_eq!(riccati_rhs(real(1.0), real(0.0), real(-1.0)), real(0.0));
        assert_eq!(riccati_rhs(real(0.0), real(0.0), real(0.0)), real(0.0));
        // q = 2 is a constant root for B = 3, C = 2
        assert_eq!(riccati_rhs(real(2.0), real(3.0), real(2.0)), real(0.0));
    }

    #[test]
    fn constant_factors_split_the_characteristic_roots() {
        let fp = factors_constant(3.0, 2.0, 0.0);
        assert_eq!((fp.p)(0.3).unwrap(), real(2.0));
        assert_eq!((fp.q)(0.3).unwrap(), real(1.0));
        assert_abs_diff_eq!((fp.g)(1.0).unwrap().re, 2.0f64.exp().powi(1), epsilon = 1e-12);
        assert_abs_diff_eq!((fp.h)(1.0).unwrap().re, 1.0f64.exp(), epsilon = 1e-12);
    }

    #[test]
    fn constant_factors_repeated_root() {
        let fp = factors_constant(2.0, 1.0, 0.0);
        assert_eq!((fp.p)(0.0).unwrap(), real(1.0));
        assert_eq!((fp.q)(0.0).unwrap(), real(1.0));
    }

    #[test]
    fn constant_factors_complex_roots() {
        let fp = factors_constant(0.0, 1.0, 0.0);
        assert_abs_diff_eq!((fp.p)(0.0).unwrap().im, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!((fp.q)(0.0).unwrap().im, -1.0, epsilon = 1e-14);
        // g(x) = e^{ix} has unit magnitude
        assert_abs_diff_eq!((fp.g)(0.7).unwrap().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn discriminant_zero_factor_shapes() {
        let b = parse("2*x").unwrap();
        let interval = Interval::new(0.0, 2.0).unwrap();
        let fp = factors_discriminant_zero(&b, 0.0, interval, &tols()).unwrap();
        assert_eq!(fp.free_constant, Some(1.0));
        // g = (x+1) e^{x^2/2}
        let x = 1.0;
        assert_abs_diff_eq!((fp.g)(x).unwrap().re, 2.0 * 0.5f64.exp(), epsilon = 1e-7);
        // h = e^{x^2/2}/(x+1)
        assert_abs_diff_eq!((fp.h)(x).unwrap().re, 0.5f64.exp() / 2.0, epsilon = 1e-7);
        // antisymmetry of the split around B/2 at the base point
        let shift = fp.riccati_shift.as_ref().unwrap();
        let qv = (fp.q)(0.0).unwrap();
        let pv = (fp.p)(0.0).unwrap();
        assert_abs_diff_eq!((qv - pv).re, 2.0 * shift(0.0).unwrap().re, epsilon = 1e-12);
        assert_abs_diff_eq!((qv - pv).re, -2.0, epsilon = 1e-12);
    }

    #[test]
    fn discriminant_const_positive_k() {
        let b = parse("0").unwrap();
        let interval = Interval::new(0.0, 2.0).unwrap();
        let fp = factors_discriminant_const(&b, 1.0, 0.0, interval, &tols()).unwrap();
        assert_eq!(fp.free_constant, Some(1.0));
        // w(x) = e^{x+1} - e^{-(x+1)}; B = 0 makes E = 1
        let x = 1.0;
        let w = 2.0f64.exp() - (-2.0f64).exp();
        assert_abs_diff_eq!((fp.g)(x).unwrap().re, w, epsilon = 1e-9);
        assert_abs_diff_eq!((fp.h)(x).unwrap().re, 1.0 / w, epsilon = 1e-9);
    }

    #[test]
    fn discriminant_const_negative_k_uses_sine_factor() {
        let b = parse("0").unwrap();
        let interval = Interval::new(0.0, 1.0).unwrap();
        let fp = factors_discriminant_const(&b, -1.0, 0.0, interval, &tols()).unwrap();
        let c = fp.free_constant.unwrap();
        // w = 2i sin(x + c); no zero inside [0, 1]
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            let w = (fp.g)(x).unwrap();
            assert!(w.norm() > 0.1, "w nearly vanished at {x}");
            assert_abs_diff_eq!(w.im, 2.0 * (x + c).sin(), epsilon = 1e-9);
        }
    }

    #[test]
    fn discriminant_const_rejects_interval_longer_than_period() {
        let b = parse("0").unwrap();
        let interval = Interval::new(0.0, 4.0).unwrap();
        match factors_discriminant_const(&b, -1.0, 0.0, interval, &tols()) {
            Err(Error::IntervalTooLong { max, .. }) => {
                assert_abs_diff_eq!(max, std::f64::consts::PI, epsilon = 1e-12);
            }
            other => panic!("expected IntervalTooLong, got {other:?}"),
        }
    }

    #[test]
    fn complementary_factors_for_euler_equation() {
        // y'' - (2/x) y' + (2/x^2) y = 0 on [1,3] with f = x
        let f = parse("x").unwrap();
        let b = parse("-2/x").unwrap();
        let interval = Interval::new(1.0, 3.0).unwrap();
        let fp = factors_from_complementary(&f, &b, 1.0, interval, &tols()).unwrap();
        // h = 1/x, g = x e^{-2 ln x} = 1/x
        assert_abs_diff_eq!((fp.h)(2.0).unwrap().re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!((fp.g)(2.0).unwrap().re, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn complementary_matches_constant_route() {
        let f = parse("exp(-x)").unwrap();
        let b = parse("3").unwrap();
        let interval = Interval::new(0.0, 2.0).unwrap();
        let fp = factors_from_complementary(&f, &b, 0.0, interval, &tols()).unwrap();
        let reference = factors_constant(3.0, 2.0, 0.0);
        for i in 0..=8 {
            let x = 0.25 * i as f64;
            let a = (fp.h)(x).unwrap();
            let bb = (reference.h)(x).unwrap();
            assert_abs_diff_eq!((a - bb).norm(), 0.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn complementary_with_zero_is_rejected() {
        let f = parse("x").unwrap();
        let b = parse("0").unwrap();
        let interval = Interval::new(-1.0, 1.0).unwrap();
        match factors_from_complementary(&f, &b, -1.0, interval, &tols()) {
            Err(Error::ZeroOnInterval { x }) => assert!(x.abs() < 0.01),
            other => panic!("expected ZeroOnInterval, got {other:?}"),
        }
    }

    #[test]
    fn riccati_constant_fixed_point() {
        let b = parse("0").unwrap();
        let c = parse("-1").unwrap();
        let interval = Interval::new(0.0, 2.0).unwrap();
        let cfg = RiccatiConfig { q0: 1.0, ..Default::default() };
        let fp = factors_riccati(&b, &c, &cfg, 0.0, interval, &tols()).unwrap();
        assert_abs_diff_eq!((fp.q)(0.7).unwrap().re, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!((fp.h)(1.0).unwrap().re, 1.0f64.exp(), epsilon = 1e-7);
        assert_abs_diff_eq!((fp.g)(1.0).unwrap().re, (-1.0f64).exp(), epsilon = 1e-7);
    }

    #[test]
    fn riccati_tanh_branch() {
        let b = parse("0").unwrap();
        let c = parse("-1").unwrap();
        let interval = Interval::new(0.0, 2.0).unwrap();
        let cfg = RiccatiConfig::default(); // q0 = 0 gives Q = -tanh
        let fp = factors_riccati(&b, &c, &cfg, 0.0, interval, &tols()).unwrap();
        assert_abs_diff_eq!((fp.q)(1.0).unwrap().re, -(1.0f64.tanh()), epsilon = 1e-8);
    }

    #[test]
    fn riccati_blow_up_is_located() {
        let b = parse("0").unwrap();
        let c = parse("1").unwrap();
        let interval = Interval::new(0.0, 2.0).unwrap();
        let cfg = RiccatiConfig::default(); // Q = tan x blows up at pi/2
        match factors_riccati(&b, &c, &cfg, 0.0, interval, &tols()) {
            Err(Error::SingularityDetected { x }) => {
                assert!((x - std::f64::consts::FRAC_PI_2).abs() < 0.05, "pole at {x}");
            }
            other => panic!("expected SingularityDetected, got {other:?}"),
        }
    }

    #[test]
    fn gh_product_tracks_exp_integral_b() {
        // spot-check the invariant on a quadrature-backed route
        let b = parse("2*x").unwrap();
        let interval = Interval::new(0.0, 2.0).unwrap();
        let fp = factors_discriminant_zero(&b, 0.0, interval, &tols()).unwrap();
        for i in 0..=10 {
            let x = 0.2 * i as f64;
            let gh = ((fp.g)(x).unwrap() * (fp.h)(x).unwrap()).re;
            let want = (x * x).exp(); // e^{Int 2t dt} = e^{x^2}
            assert!((gh - want).abs() <= 1e-8 * want.abs().max(1.0) * 10.0, "gh at {x}");
        }
    }
}
