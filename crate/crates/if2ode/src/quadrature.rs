//! Definite and cumulative numerical integration.
//!
//! Every indefinite integral in the solution formula is realized as a
//! definite integral from the problem's base point. [`integrate`] is an
//! adaptive Gauss-Kronrod 7/15 rule with bisection; [`antiderivative`]
//! accumulates panel integrals into a [`GridFunction`] that interpolates
//! cubically between samples.

use num_complex::Complex64;

use crate::error::{Error, Result};

// Gauss-Kronrod 7/15 abscissae (positive half) and weights, f64-rounded
// from the QUADPACK dqk15 constants. Odd-index abscissae carry the embedded
// 7-point Gauss rule.
const XGK: [f64; 7] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_DEPTH: u32 = 40;

/// One Gauss-Kronrod 7/15 panel: returns (estimate, error estimate).
fn kronrod_panel<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, &xj) in XGK.iter().enumerate() {
        let dx = half * xj;
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    kronrod *= half;
    gauss *= half;
    Ok((kronrod, (kronrod - gauss).norm()))
}

fn adaptive<F>(f: &F, a: f64, b: f64, eps: f64, depth: u32, achieved: &mut f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let (estimate, err) = kronrod_panel(f, a, b)?;
    if err <= eps || depth >= MAX_DEPTH {
        *achieved += err;
        return Ok(estimate);
    }
    let mid = 0.5 * (a + b);
    let left = adaptive(f, a, mid, 0.5 * eps, depth + 1, achieved)?;
    let right = adaptive(f, mid, b, 0.5 * eps, depth + 1, achieved)?;
    Ok(left + right)
}

/// Adaptive quadrature of a complex-valued integrand over `[a, b]`.
///
/// The estimated absolute error is kept below `tol * (1 + |result|)`;
/// exceeding it after the subdivision budget reports the achieved error.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if tol <= 0.0 {
        return Err(Error::InvalidProblem(format!("quadrature tol must be positive, got {tol}")));
    }
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if a > b {
        return Ok(-integrate(f, b, a, tol)?);
    }
    let (rough, _) = kronrod_panel(&f, a, b)?;
    let eps = tol * (1.0 + rough.norm());
    let mut achieved = 0.0;
    let value = adaptive(&f, a, b, eps, 0, &mut achieved)?;
    let allowed = tol * (1.0 + value.norm());
    if achieved > allowed {
        return Err(Error::ToleranceNotMet { achieved, requested: allowed });
    }
    Ok(value)
}

/// Function sampled on a strictly increasing grid, interpolated cubically.
#[derive(Debug, Clone)]
pub struct GridFunction {
    xs: Vec<f64>,
    values: Vec<Complex64>,
}

impl GridFunction {
    /// Wrap precomputed samples. Abscissae must be strictly increasing and
    /// at least two.
    pub fn new(xs: Vec<f64>, values: Vec<Complex64>) -> Result<GridFunction> {
        if xs.len() < 2 || xs.len() != values.len() {
            return Err(Error::InvalidProblem(format!(
                "grid needs >= 2 matching samples, got {} abscissae / {} values",
                xs.len(),
                values.len()
            )));
        }
        if !xs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidProblem("grid abscissae must be strictly increasing".into()));
        }
        Ok(GridFunction { xs, values })
    }

    /// Sample a function at the given abscissae.
    pub fn sample<F>(f: F, xs: Vec<f64>) -> Result<GridFunction>
    where
        F: Fn(f64) -> Result<Complex64>,
    {
        let values = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        GridFunction::new(xs, values)
    }

    pub fn lo(&self) -> f64 {
        self.xs[0]
    }

    pub fn hi(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Mean grid spacing, used as the finite-difference step.
    pub fn spacing(&self) -> f64 {
        (self.hi() - self.lo()) / (self.len() - 1) as f64
    }

    /// Evaluate the interpolant. Exact at the samples; cubic Lagrange on a
    /// four-point stencil in between. Points outside the grid are clamped.
    pub fn value_at(&self, x: f64) -> Complex64 {
        let n = self.xs.len();
        let x = x.clamp(self.xs[0], self.xs[n - 1]);
        // partition_point returns the first index with xs[i] > x
        let upper = self.xs.partition_point(|&xi| xi <= x);
        if upper > 0 && self.xs[upper - 1] == x {
            return self.values[upper - 1];
        }
        let seg = upper - 1; // x strictly inside (xs[seg], xs[seg+1])
        if n < 4 {
            // linear fallback for minimal grids
            let t = (x - self.xs[seg]) / (self.xs[seg + 1] - self.xs[seg]);
            return self.values[seg] * (1.0 - t) + self.values[seg + 1] * t;
        }
        let start = seg.saturating_sub(1).min(n - 4);
        let xs = &self.xs[start..start + 4];
        let vs = &self.values[start..start + 4];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            let mut weight = 1.0;
            for j in 0..4 {
                if i != j {
                    weight *= (x - xs[j]) / (xs[i] - xs[j]);
                }
            }
            acc += vs[i] * weight;
        }
        acc
    }
}

/// Uniform grid of `n` points over `[lo, hi]` with `x0` guaranteed to be a
/// node (inserted, or snapped onto a nearly coincident node).
pub fn anchored_grid(lo: f64, hi: f64, n: usize, x0: f64) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    let mut xs: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    xs[n - 1] = hi;
    let nearest = ((x0 - lo) / step).round().clamp(0.0, (n - 1) as f64) as usize;
    if xs[nearest] == x0 {
        return xs;
    }
    if (xs[nearest] - x0).abs() <= 1e-12 * (hi - lo) && nearest != 0 && nearest != n - 1 {
        xs[nearest] = x0;
        return xs;
    }
    let at = xs.partition_point(|&xi| xi < x0);
    xs.insert(at, x0);
    xs
}

/// Cumulative integral `F(x) = Int_{x0}^{x} f` sampled on an `n`-point grid
/// over `[lo, hi]`. `F(x0)` is exactly zero; each adjacent-panel increment
/// is computed to `tol`.
pub fn antiderivative<F>(f: F, x0: f64, lo: f64, hi: f64, n: usize, tol: f64) -> Result<GridFunction>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if n < 33 {
        return Err(Error::InvalidProblem(format!("antiderivative grid needs n >= 33, got {n}")));
    }
    if !(lo <= x0 && x0 <= hi) {
        return Err(Error::InvalidProblem(format!("base point {x0} outside [{lo}, {hi}]")));
    }
    let xs = anchored_grid(lo, hi, n, x0);
    let mut cumulative = Vec::with_capacity(xs.len());
    let mut running = Complex64::new(0.0, 0.0);
    cumulative.push(running);
    for w in xs.windows(2) {
        running += integrate(&f, w[0], w[1], tol)?;
        cumulative.push(running);
    }
    let anchor = xs.iter().position(|&xi| xi == x0).expect("x0 is a grid node");
    let offset = cumulative[anchor];
    let values = cumulative.into_iter().map(|v| v - offset).collect();
    GridFunction::new(xs, values)
}

/// Fourth-order central difference of the interpolant at `x`.
pub fn finite_diff(grid: &GridFunction, x: f64) -> Result<Complex64> {
    let h = grid.spacing();
    let slack = 1e-12 * (grid.hi() - grid.lo());
    if x - 2.0 * h < grid.lo() - slack || x + 2.0 * h > grid.hi() + slack {
        return Err(Error::OutOfRange { x, lo: grid.lo() + 2.0 * h, hi: grid.hi() - 2.0 * h });
    }
    let fm2 = grid.value_at(x - 2.0 * h);
    let fm1 = grid.value_at(x - h);
    let fp1 = grid.value_at(x + h);
    let fp2 = grid.value_at(x + 2.0 * h);
    Ok((fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn real(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Result<Complex64> {
        move |x| Ok(Complex64::new(f(x), 0.0))
    }

    #[test]
    fn integrates_monomial() {
        let v = integrate(real(|x| x * x), 0.0, 1.0, 1e-10).unwrap();
        assert_abs_diff_eq!(v.re, 1.0 / 3.0, epsilon = 1e-10);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn integrates_damped_ramp() {
        // Int_0^t s e^{-s} ds = 1 - (t+1) e^{-t}
        let exact = 1.0 - 2.0 * (-1.0f64).exp();
        let v = integrate(real(|s| s * (-s).exp()), 0.0, 1.0, 1e-12).unwrap();
        assert_abs_diff_eq!(v.re, exact, epsilon = 1e-10);
    }

    #[test]
    fn empty_interval_is_zero() {
        let v = integrate(real(|x| x.exp()), 2.5, 2.5, 1e-10).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let fwd = integrate(real(|x| x * x), 0.0, 1.0, 1e-10).unwrap();
        let rev = integrate(real(|x| x * x), 1.0, 0.0, 1e-10).unwrap();
        assert_abs_diff_eq!((fwd + rev).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn additivity_and_linearity() {
        let tol = 1e-10;
        let f = real(|x: f64| (3.0 * x).sin());
        let g = real(|x: f64| x.exp());
        let whole = integrate(&f, 0.0, 2.0, tol).unwrap();
        let split = integrate(&f, 0.0, 0.7, tol).unwrap() + integrate(&f, 0.7, 2.0, tol).unwrap();
        assert_abs_diff_eq!((whole - split).norm(), 0.0, epsilon = 2.0 * tol);

        let combo = integrate(
            |x| Ok(2.5 * f(x)? - 1.25 * g(x)?),
            0.0,
            2.0,
            tol,
        )
        .unwrap();
        let parts = 2.5 * integrate(&f, 0.0, 2.0, tol).unwrap()
            - 1.25 * integrate(&g, 0.0, 2.0, tol).unwrap();
        assert_abs_diff_eq!((combo - parts).norm(), 0.0, epsilon = 2.0 * tol);
    }

    #[test]
    fn domain_error_propagates() {
        let res = integrate(
            |x| {
                if x == 0.5 {
                    Err(Error::Domain { what: "division by zero", x: Complex64::new(x, 0.0) })
                } else {
                    Ok(Complex64::new(1.0, 0.0))
                }
            },
            0.0,
            1.0,
            1e-10,
        );
        assert!(matches!(res, Err(Error::Domain { .. })));
    }

    #[test]
    fn antiderivative_of_one_is_identity() {
        let grid = antiderivative(real(|_| 1.0), 0.0, 0.0, 2.0, 65, 1e-10).unwrap();
        assert_eq!(grid.value_at(0.0), Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(grid.value_at(2.0).re, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(grid.value_at(0.73).re, 0.73, epsilon = 1e-10);
    }

    #[test]
    fn antiderivative_of_exponential() {
        let grid = antiderivative(real(|t| (2.0 * t).exp()), 0.0, 0.0, 1.5, 129, 1e-10).unwrap();
        let exact = (std::f64::consts::E.powi(2) - 1.0) / 2.0;
        assert_abs_diff_eq!(grid.value_at(1.0).re, exact, epsilon = 1e-9);
    }

    #[test]
    fn antiderivative_of_zero_is_exactly_zero() {
        let grid = antiderivative(real(|_| 0.0), 0.5, 0.0, 1.0, 65, 1e-10).unwrap();
        assert!(grid.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn antiderivative_anchors_interior_base_point() {
        let grid = antiderivative(real(|_| 1.0), 0.333, 0.0, 1.0, 65, 1e-10).unwrap();
        assert_eq!(grid.value_at(0.333), Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(grid.value_at(1.0).re, 0.667, epsilon = 1e-10);
        assert_abs_diff_eq!(grid.value_at(0.0).re, -0.333, epsilon = 1e-10);
    }

    #[test]
    fn finite_diff_recovers_cosine() {
        let xs: Vec<f64> = (0..513).map(|i| 3.0 * i as f64 / 512.0).collect();
        let grid = GridFunction::sample(real(|x| x.sin()), xs).unwrap();
        let d = finite_diff(&grid, 1.0).unwrap();
        assert_abs_diff_eq!(d.re, 1.0f64.cos(), epsilon = 1e-6);
    }

    #[test]
    fn finite_diff_of_constant_is_zero() {
        let xs: Vec<f64> = (0..65).map(|i| i as f64 / 64.0).collect();
        let grid = GridFunction::sample(real(|_| 4.25), xs).unwrap();
        assert_abs_diff_eq!(finite_diff(&grid, 0.5).unwrap().norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn finite_diff_of_quadratic() {
        let xs: Vec<f64> = (0..129).map(|i| 2.0 * i as f64 / 128.0).collect();
        let grid = GridFunction::sample(real(|x| x * x), xs).unwrap();
        assert_abs_diff_eq!(finite_diff(&grid, 1.0).unwrap().re, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn finite_diff_rejects_boundary_points() {
        let xs: Vec<f64> = (0..65).map(|i| i as f64 / 64.0).collect();
        let grid = GridFunction::sample(real(|x| x), xs).unwrap();
        assert!(matches!(finite_diff(&grid, 0.005), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn fundamental_theorem_holds() {
        let f = |x: f64| (x * x / 2.0).exp() * (1.5 * x).cos();
        let grid = antiderivative(real(f), 0.0, 0.0, 2.0, 513, 1e-10).unwrap();
        for i in 1..20 {
            let x = 0.1 + (1.8 * i as f64) / 20.0;
            let d = finite_diff(&grid, x).unwrap();
            let want = f(x);
            assert!(
                (d.re - want).abs() <= 1e-6 * (1.0 + want.abs()),
                "FTC mismatch at {x}: {} vs {want}",
                d.re
            );
        }
    }

    #[test]
    fn value_at_is_exact_on_samples() {
        let xs: Vec<f64> = (0..65).map(|i| i as f64 / 64.0).collect();
        let grid = GridFunction::sample(real(|x| x.sin()), xs.clone()).unwrap();
        for &x in &xs {
            assert_eq!(grid.value_at(x), Complex64::new(x.sin(), 0.0));
        }
    }

    #[test]
    fn tolerance_failure_reports_achieved_error() {
        // A kink keeps Gauss-Kronrod from converging at an absurd tolerance.
        let res = integrate(real(|x: f64| (x - 0.5f64.sqrt()).abs().sqrt()), 0.0, 1.0, 1e-15);
        match res {
            Err(Error::ToleranceNotMet { achieved, .. }) => assert!(achieved > 0.0),
            other => panic!("expected ToleranceNotMet, got {other:?}"),
        }
    }
}
